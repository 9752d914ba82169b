#pragma once

// Data-parallel inner loops used by the dense network layers, the DWA
// density term and the range sensor. Every kernel has a scalar reference
// version; wider variants are picked once at startup from the CPU features
// and must agree with the reference within floating-point reassociation.

#include <cstddef>
#include <span>
#include <string_view>

namespace cnav::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Function table for one instruction-set variant.
struct KernelTable {
    Isa isa;
    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// sum over all (pose, point) pairs of the Euclidean distance.
    double (*sum_pair_distances)(const double* px, const double* py, std::size_t m,
                                 const double* qx, const double* qy, std::size_t n);
    /// Smallest t in [0, max_t] where origin + t*dir enters one of the discs;
    /// max_t when nothing is hit. dir must be unit length. An origin inside
    /// a disc yields 0.
    double (*ray_discs)(double ox, double oy, double dx, double dy, const double* cx,
                        const double* cy, const double* radius, std::size_t n, double max_t);
};

const KernelTable& scalar_kernels();

/// True when the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// Table for a specific variant; falls back to scalar if unavailable.
const KernelTable& kernels_for(Isa isa);

/// Table in use. Chosen on first call: the widest available variant, unless
/// the environment variable CNAV_SIMD=scalar forces the reference path.
const KernelTable& active_kernels();

/// Overrides the dispatch choice (tests and benchmarks).
void set_active_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active_kernels().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace cnav::simd
