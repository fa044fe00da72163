#include <cstdlib>
#include <cstring>

#include "oprlab/kernels.hpp"

namespace oprlab::kernels {
namespace {

Backend detect_default() {
    const char* env = std::getenv("OPRLAB_KERNELS");
    if (env) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
#ifdef OPRLAB_HAVE_AVX2
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::avx2;
#endif
    }
#ifdef OPRLAB_HAVE_AVX2
    if (avx2_supported()) return Backend::avx2;
#endif
    return Backend::scalar;
}

Backend g_backend = detect_default();

}  // namespace

bool avx2_supported() {
#if defined(OPRLAB_HAVE_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Ops& ops() {
#ifdef OPRLAB_HAVE_AVX2
    if (g_backend == Backend::avx2) return avx2_ops;
#endif
    return scalar_ops;
}

Backend active_backend() { return g_backend; }

void select_backend(Backend b) {
#ifdef OPRLAB_HAVE_AVX2
    if (b == Backend::avx2 && avx2_supported()) {
        g_backend = Backend::avx2;
        return;
    }
#endif
    g_backend = Backend::scalar;
}

std::string backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

}  // namespace oprlab::kernels
