#pragma once

#include <cstddef>

namespace opstep::kern {

/// Table of the low-level array kernels shared by all operator code.
///
/// Two implementations ship: a scalar reference and a SIMD variant
/// (AVX2+FMA on x86-64, NEON on aarch64) selected at runtime. The SIMD
/// variants use fused multiply-add, so results may differ from the scalar
/// reference in the last ulp; equivalence is tested with magnitude-aware
/// tolerances, not bitwise.
struct KernelSet {
    const char* name;

    /// Σ a[i]·b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    /// y = T·x for a symmetric tridiagonal T given by diag (n entries) and
    /// off (n−1 entries): y[i] = diag[i]·x[i] + off[i−1]·x[i−1] + off[i]·x[i+1].
    /// y must not alias x, diag, or off.
    void (*tridiag_apply)(const double* diag, const double* off,
                          const double* x, double* y, std::size_t n);

    /// out[i] = a·x[i] + b·y[i]; out may alias x or y.
    void (*combine2)(double a, const double* x, double b, const double* y,
                     double* out, std::size_t n);

    /// out[i] = a·x[i] + b·y[i] + c·z[i]; out may alias any input.
    void (*combine3)(double a, const double* x, double b, const double* y,
                     double c, const double* z, double* out, std::size_t n);
};

/// Scalar reference kernels (always available).
const KernelSet& scalar_kernels();

/// Best kernel set for the running CPU. Honors the OPSTEP_KERNELS
/// environment variable ("scalar", "avx2", "neon") on first use; falls back
/// to scalar when a requested or detected variant is unavailable.
const KernelSet& active_kernels();

/// Look up a kernel set by name ("scalar", "avx2", "neon").
/// Returns nullptr when that variant is not compiled in or the CPU lacks it.
const KernelSet* kernels_by_name(const char* name);

} // namespace opstep::kern
