#include "opstep/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace opstep::kern {

// ============================================================================
// Scalar reference kernels
// ============================================================================

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void tridiag_apply_scalar(const double* diag, const double* off,
                          const double* x, double* y, std::size_t n) {
    if (n == 1) {
        y[0] = diag[0] * x[0];
        return;
    }
    y[0] = diag[0] * x[0] + off[0] * x[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        y[i] = diag[i] * x[i] + off[i - 1] * x[i - 1] + off[i] * x[i + 1];
    }
    y[n - 1] = diag[n - 1] * x[n - 1] + off[n - 2] * x[n - 2];
}

void combine2_scalar(double a, const double* x, double b, const double* y,
                     double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a * x[i] + b * y[i];
    }
}

void combine3_scalar(double a, const double* x, double b, const double* y,
                     double c, const double* z, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a * x[i] + b * y[i] + c * z[i];
    }
}

constexpr KernelSet scalar_set = {
    "scalar",
    dot_scalar,
    tridiag_apply_scalar,
    combine2_scalar,
    combine3_scalar,
};

} // namespace

const KernelSet& scalar_kernels() {
    return scalar_set;
}

// ============================================================================
// Runtime dispatch
// ============================================================================

#if defined(OPSTEP_WITH_AVX2)
const KernelSet& avx2_kernel_set(); // defined in kernels_avx2.cpp
#endif
#if defined(OPSTEP_WITH_NEON)
const KernelSet& neon_kernel_set(); // defined in kernels_neon.cpp
#endif

const KernelSet* kernels_by_name(const char* name) {
    if (std::strcmp(name, "scalar") == 0) {
        return &scalar_set;
    }
#if defined(OPSTEP_WITH_AVX2)
    if (std::strcmp(name, "avx2") == 0 &&
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return &avx2_kernel_set();
    }
#endif
#if defined(OPSTEP_WITH_NEON)
    if (std::strcmp(name, "neon") == 0) {
        return &neon_kernel_set();
    }
#endif
    return nullptr;
}

namespace {

const KernelSet& pick_active() {
    if (const char* requested = std::getenv("OPSTEP_KERNELS")) {
        if (const KernelSet* k = kernels_by_name(requested)) {
            return *k;
        }
        // Unknown or unavailable request: fall through to detection.
    }
#if defined(OPSTEP_WITH_AVX2)
    if (const KernelSet* k = kernels_by_name("avx2")) {
        return *k;
    }
#endif
#if defined(OPSTEP_WITH_NEON)
    if (const KernelSet* k = kernels_by_name("neon")) {
        return *k;
    }
#endif
    return scalar_set;
}

} // namespace

const KernelSet& active_kernels() {
    static const KernelSet& active = pick_active();
    return active;
}

} // namespace opstep::kern
