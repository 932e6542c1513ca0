#include "mmdust/simd/kernels.hpp"

#include <cstdlib>

namespace mmdust::simd {

#if defined(__x86_64__) && defined(__GNUC__)
const Kernels* avx2_kernels();
#endif
#if defined(__aarch64__)
const Kernels* neon_kernels();
#endif

namespace {

const Kernels* pick(const std::string& name) {
    if (name == "scalar") return &scalar_kernels();
#if defined(__x86_64__) && defined(__GNUC__)
    if ((name == "avx2" || name == "auto") && __builtin_cpu_supports("avx2")) {
        return avx2_kernels();
    }
#endif
#if defined(__aarch64__)
    if (name == "neon" || name == "auto") return neon_kernels();
#endif
    if (name == "auto") return &scalar_kernels();
    return nullptr;
}

const Kernels*& selected() {
    static const Kernels* k = [] {
        const char* env = std::getenv("MMDUST_SIMD");
        const Kernels* chosen = pick(env ? env : "auto");
        return chosen ? chosen : &scalar_kernels();
    }();
    return k;
}

}  // namespace

const Kernels& active() { return *selected(); }

bool select(const std::string& name) {
    const Kernels* k = pick(name);
    if (!k) return false;
    selected() = k;
    return true;
}

}  // namespace mmdust::simd
