#include "cnav/io/episode_log.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "cnav/config/run_config.hpp"

namespace cnav::io {
namespace {

using nlohmann::json;

json xy(Vec2 p) { return json::array({p.x, p.y}); }

json corridor_json(const corridor::SafeCorridor& c) {
    json sections = json::array();
    for (const auto& s : c.sections) {
        sections.push_back({{"anchor", xy(s.anchor)}, {"left", xy(s.boundary_points[0])},
                            {"right", xy(s.boundary_points[1])}});
    }
    json polygons = json::array();
    for (const auto& poly : c.polygons) {
        json vs = json::array();
        for (const Vec2& v : poly) vs.push_back(xy(v));
        polygons.push_back(std::move(vs));
    }
    return {{"sections", std::move(sections)}, {"polygons", std::move(polygons)}};
}

Vec2 read_xy(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw std::invalid_argument("expected [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

EpisodeLog::EpisodeLog(std::ostream& out, const Provenance& prov, std::string variant, int episode)
    : out_(out), prov_(prov), variant_(std::move(variant)), episode_(episode) {}

void EpisodeLog::write_header(const WorldState& initial) {
    json header = {{"type", "header"},
                   {"config_hash", config::hash_hex(prov_.config_hash)},
                   {"seed", prov_.seed},
                   {"variant", variant_},
                   {"episode", episode_},
                   {"start", xy(initial.start)},
                   {"goal", xy(initial.goal)}};
    if (initial.arena) {
        header["arena"] = {initial.arena->min_x, initial.arena->min_y, initial.arena->max_x, initial.arena->max_y};
    }
    json radii = json::array();
    for (const Obstacle& o : initial.obstacles) radii.push_back(o.radius);
    header["obstacle_radius"] = std::move(radii);
    write(header);
    header_written_ = true;
}

json EpisodeLog::step_record(const WorldState& world, const Events& events) {
    const RobotState& r = world.robot;
    json obstacles = json::array();
    for (const Obstacle& o : world.obstacles) obstacles.push_back({o.center.x, o.center.y});
    json ev = json::array();
    if (events.collision) ev.push_back("collision");
    if (events.goal_reached) ev.push_back("goal_reached");
    if (events.timeout) ev.push_back("timeout");
    return {{"type", "step"},
            {"t", world.time},
            {"robot", {r.x, r.y, r.theta, r.v, r.w}},
            {"obstacles", std::move(obstacles)},
            {"events", std::move(ev)}};
}

json EpisodeLog::decision_record(const eval::DecisionRecord& d) {
    json rec = {{"type", "decision"},
                {"k", d.index},
                {"t", d.time},
                {"action", {d.action.normalized[0], d.action.normalized[1]}},
                {"cmd", {d.action.command.v, d.action.command.w}},
                {"reward",
                 {{"goal", d.reward.r_goal},
                  {"collision", d.reward.r_collision},
                  {"corridor", d.reward.r_corridor},
                  {"total", d.reward.r_total}}},
                {"planning_failed", d.planning_failed}};
    if (d.plan != nullptr) {
        json cands = json::array();
        for (std::size_t rank = 0; rank < d.plan->ranking.size(); ++rank) {
            const auto& c = d.plan->candidates[d.plan->ranking[rank]];
            cands.push_back({{"v", c.v}, {"w", c.w}, {"G", c.total_cost}, {"n_obs", c.n_obs},
                             {"density", c.density_cost}, {"clearance", c.dist_obst_score}});
        }
        rec["candidates"] = std::move(cands);
        json poses = json::array();
        for (const RobotState& p : d.plan->best().poses) poses.push_back(xy(p.position()));
        rec["best_poses"] = std::move(poses);
    }
    if (d.corridor != nullptr) rec["corridor"] = corridor_json(*d.corridor);
    return rec;
}

eval::EpisodeHooks EpisodeLog::hooks() {
    eval::EpisodeHooks h;
    h.on_sim_step = [this](const WorldState& w, const Events& e) {
        if (!header_written_) write_header(w);
        write(step_record(w, e));
    };
    h.on_decision = [this](const eval::DecisionRecord& d) { write(decision_record(d)); };
    return h;
}

void EpisodeLog::finish(const eval::EpisodeResult& r) {
    write({{"type", "result"},
           {"outcome", std::string(eval::to_string(r.outcome))},
           {"path_length", r.path_length},
           {"sim_time", r.sim_time},
           {"avg_speed", r.avg_speed},
           {"decisions", r.decisions},
           {"total_reward", r.total_reward},
           {"planning_failures", r.planning_failures}});
    out_.flush();
}

void EpisodeLog::write(const json& record) { out_ << record.dump() << '\n'; }

Replay replay_log(std::istream& in) {
    Replay replay;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    int step = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) throw LogError(line_no, "not a JSON object");
        try {
            const std::string type = rec.at("type").get<std::string>();
            if (!have_header) {
                if (type != "header") throw LogError(line_no, "first record must be the header");
                const std::string hash = rec.at("config_hash").get<std::string>();
                replay.provenance.config_hash = std::stoull(hash, nullptr, 16);
                replay.provenance.seed = rec.at("seed").get<std::uint64_t>();
                have_header = true;
            } else if (type == "step") {
                const double t = rec.at("t").get<double>();
                const json& r = rec.at("robot");
                if (!r.is_array() || r.size() < 2) throw std::invalid_argument("robot must be [x, y, ...]");
                replay.rows.push_back({"robot", step, t, 0, 0, r[0].get<double>(), r[1].get<double>()});
                int id = 0;
                for (const json& o : rec.at("obstacles")) {
                    const Vec2 p = read_xy(o);
                    replay.rows.push_back({"obstacle", step, t, id++, 0, p.x, p.y});
                }
                ++step;
            } else if (type == "decision") {
                const int k = rec.at("k").get<int>();
                const double t = rec.at("t").get<double>();
                if (rec.contains("corridor")) {
                    int id = 0;
                    for (const json& poly : rec.at("corridor").at("polygons")) {
                        int vertex = 0;
                        for (const json& v : poly) {
                            const Vec2 p = read_xy(v);
                            replay.rows.push_back({"corridor", k, t, id, vertex++, p.x, p.y});
                        }
                        ++id;
                    }
                }
            } else if (type != "result") {
                throw LogError(line_no, "unknown record type '" + type + "'");
            }
        } catch (const LogError&) {
            throw;
        } catch (const std::exception& e) {
            throw LogError(line_no, e.what());
        }
    }
    if (!have_header) throw LogError(line_no + 1, "missing header record");
    return replay;
}

void write_replay_csv(std::ostream& out, const Replay& replay) {
    out << "# config_hash=" << config::hash_hex(replay.provenance.config_hash) << " seed=" << replay.provenance.seed
        << '\n';
    out << "record,index,t,id,vertex,x,y\n";
    for (const ReplayRow& r : replay.rows) {
        out << r.record << ',' << r.index << ',' << format_double(r.time) << ',' << r.id << ',' << r.vertex << ','
            << format_double(r.x) << ',' << format_double(r.y) << '\n';
    }
}

void write_gnuplot_script(std::ostream& out, const std::string& csv_path, const std::string& png_path) {
    out << "set datafile separator ','\n"
           "set terminal pngcairo size 900,900\n"
           "set output '"
        << png_path
        << "'\n"
           "set size ratio -1\n"
           "set key outside\n"
           "csv = '"
        << csv_path
        << "'\n"
           "plot csv every ::2 using ((strcol(1) eq 'corridor') ? $6 : 1/0):7 with lines lc rgb '#a0c4ff' "
           "title 'corridor', \\\n"
           "     csv every ::2 using ((strcol(1) eq 'obstacle') ? $6 : 1/0):7 with dots lc rgb '#e63946' "
           "title 'obstacles', \\\n"
           "     csv every ::2 using ((strcol(1) eq 'robot') ? $6 : 1/0):7 with lines lw 2 lc rgb '#1d3557' "
           "title 'robot'\n";
}

void write_metrics_csv(std::ostream& out, std::uint64_t config_hash, std::span<const std::uint64_t> seeds,
                       std::span<const MetricsRow> rows) {
    out << "# config_hash=" << config::hash_hex(config_hash) << " seed=";
    for (std::size_t i = 0; i < seeds.size(); ++i) out << (i ? ";" : "") << seeds[i];
    out << '\n';
    out << "variant,scenario,seed,success_rate,avg_length_m,avg_speed_mps,episodes,avg_speed_pooled_mps\n";
    const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
    for (const MetricsRow& r : rows) {
        out << r.variant << ',' << r.scenario << ',' << r.seed << ',' << format_double(r.metrics.success_rate) << ','
            << opt(r.metrics.avg_length) << ',' << opt(r.metrics.avg_speed) << ',' << r.metrics.episodes << ','
            << opt(r.metrics.avg_speed_pooled) << '\n';
    }
}

void write_curve_header(std::ostream& out, const Provenance& prov) {
    out << "# config_hash=" << config::hash_hex(prov.config_hash) << " seed=" << prov.seed << '\n';
    out << "episode,return,success,outcome,decisions,path_length,sim_time,critic_loss,buffer_size\n";
}

void write_curve_row(std::ostream& out, int episode, double episode_return, eval::Outcome outcome, int decisions,
                     double path_length, double sim_time, double critic_loss, std::size_t buffer_size) {
    out << episode << ',' << format_double(episode_return) << ',' << (outcome == eval::Outcome::success ? 1 : 0)
        << ',' << eval::to_string(outcome) << ',' << decisions << ',' << format_double(path_length) << ','
        << format_double(sim_time) << ',' << format_double(critic_loss) << ',' << buffer_size << '\n';
}

}  // namespace cnav::io
