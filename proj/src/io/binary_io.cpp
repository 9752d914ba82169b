#include "cnav/io/binary_io.hpp"

#include <bit>
#include <istream>
#include <ostream>

namespace cnav::io {

void BinaryWriter::u64(std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(bytes), 8);
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(const std::string& s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::f64s(std::span<const double> values) {
    u64(values.size());
    for (double v : values) f64(v);
}

std::uint64_t BinaryReader::u64() {
    unsigned char bytes[8];
    if (!in_.read(reinterpret_cast<char*>(bytes), 8)) throw FormatError("unexpected end of binary stream");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
    const std::uint64_t n = u64();
    if (n > (1ULL << 32)) throw FormatError("string length out of range");
    std::string s(n, '\0');
    if (!in_.read(s.data(), static_cast<std::streamsize>(n))) throw FormatError("unexpected end of binary stream");
    return s;
}

std::vector<double> BinaryReader::f64s() {
    const std::uint64_t n = u64();
    if (n > (1ULL << 31)) throw FormatError("array length out of range");
    std::vector<double> values(n);
    for (auto& v : values) v = f64();
    return values;
}

}  // namespace cnav::io
