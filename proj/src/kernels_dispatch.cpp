#include "acbe/kernels.hpp"

#include <stdexcept>

namespace acbe::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(ACBE_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend pick_default() {
#if defined(ACBE_HAVE_NEON)
    return Backend::neon;
#else
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
#endif
}

Backend g_backend = pick_default();

const Ops* table_for(Backend b) {
    switch (b) {
        case Backend::scalar: return &scalar_ops;
#if defined(ACBE_HAVE_AVX2)
        case Backend::avx2: return &avx2_ops;
#endif
#if defined(ACBE_HAVE_NEON)
        case Backend::neon: return &neon_ops;
#endif
        default: return nullptr;
    }
}

}  // namespace

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2: return cpu_has_avx2();
        case Backend::neon:
#if defined(ACBE_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const Ops& ops() { return *table_for(g_backend); }

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw std::runtime_error("kernel backend '" + backend_name(b) +
                                 "' is not supported on this CPU");
    g_backend = b;
}

std::optional<Backend> parse_backend(std::string_view name) {
    if (name == "auto") return std::nullopt;
    if (name == "scalar") return Backend::scalar;
    if (name == "avx2") return Backend::avx2;
    if (name == "neon") return Backend::neon;
    throw std::runtime_error("unknown kernel backend '" + std::string(name) +
                             "' (expected auto|scalar|avx2|neon)");
}

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

}  // namespace acbe::kernels
