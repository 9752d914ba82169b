#pragma once

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnav/eval/episode.hpp"
#include "cnav/eval/metrics.hpp"

namespace cnav::io {

/// Identification written at the top of every output file.
struct Provenance {
    std::uint64_t config_hash{0};
    std::uint64_t seed{0};
};

/// Line-delimited JSON episode log: one header record, one "step" record
/// per simulation step, one "decision" record per decision and a closing
/// "result" record.
class EpisodeLog {
public:
    /// The header record is written with the first simulation step, which
    /// run_episode reports for the initial state.
    EpisodeLog(std::ostream& out, const Provenance& prov, std::string variant, int episode);

    /// Hooks that append step and decision records to this log.
    eval::EpisodeHooks hooks();
    void finish(const eval::EpisodeResult& result);

    static nlohmann::json step_record(const WorldState& world, const Events& events);
    static nlohmann::json decision_record(const eval::DecisionRecord& d);

private:
    void write(const nlohmann::json& record);
    void write_header(const WorldState& initial);
    std::ostream& out_;
    Provenance prov_;
    std::string variant_;
    int episode_;
    bool header_written_{false};
};

/// Log line that failed to parse or lacks required fields.
struct LogError : std::runtime_error {
    std::size_t line;
    LogError(std::size_t l, const std::string& what)
        : std::runtime_error("line " + std::to_string(l) + ": " + what), line(l) {}
};

/// Plot-ready rows: robot path, obstacle tracks and corridor polygons.
struct ReplayRow {
    std::string record;  ///< robot | obstacle | corridor
    int index{0};        ///< step index (robot, obstacle) or decision index (corridor)
    double time{0.0};
    int id{0};           ///< obstacle index or polygon index
    int vertex{0};
    double x{0.0};
    double y{0.0};
};

struct Replay {
    Provenance provenance;
    std::vector<ReplayRow> rows;
};

/// Parses a log; throws LogError with the 1-based line number of the first
/// bad record.
Replay replay_log(std::istream& in);

/// CSV with a "# config_hash=... seed=..." line, a column header and rows.
void write_replay_csv(std::ostream& out, const Replay& replay);

/// gnuplot script drawing the robot path, obstacle tracks and corridors of
/// the CSV at `csv_path`.
void write_gnuplot_script(std::ostream& out, const std::string& csv_path, const std::string& png_path);

/// Metrics CSV row for one (variant, scenario, seed) cell.
struct MetricsRow {
    std::string variant;
    std::string scenario;
    std::uint64_t seed{0};
    eval::Metrics metrics;
};

void write_metrics_csv(std::ostream& out, std::uint64_t config_hash, std::span<const std::uint64_t> seeds,
                       std::span<const MetricsRow> rows);

/// Training curve CSV: header once per file, then one row per episode.
void write_curve_header(std::ostream& out, const Provenance& prov);
void write_curve_row(std::ostream& out, int episode, double episode_return, eval::Outcome outcome, int decisions,
                     double path_length, double sim_time, double critic_loss, std::size_t buffer_size);

std::string format_double(double v);

}  // namespace cnav::io
