#include <atomic>
#include <cstdlib>
#include <string>

#include "cnav/simd/kernels.hpp"

namespace cnav::simd {

#if defined(CNAV_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(CNAV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* choose_default() {
    if (const char* env = std::getenv("CNAV_SIMD"); env != nullptr && std::string(env) == "scalar") {
        return &scalar_kernels();
    }
    return &kernels_for(Isa::avx2);
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{choose_default()};
    return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    if (isa == Isa::scalar) return true;
    static const bool avx2 = cpu_has_avx2();
    return avx2;
}

const KernelTable& kernels_for(Isa isa) {
#if defined(CNAV_HAVE_AVX2)
    if (isa == Isa::avx2 && isa_available(Isa::avx2)) return avx2_kernels();
#endif
    (void)isa;
    return scalar_kernels();
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_relaxed); }

}  // namespace cnav::simd
