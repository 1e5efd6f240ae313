// NEON kernel variants for aarch64, where NEON is a baseline feature and
// needs no extra compiler flags or runtime detection.

#include "opstep/kernels.hpp"

#if defined(OPSTEP_WITH_NEON)

#include <arm_neon.h>

namespace opstep::kern {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    for (; i + 2 <= n; i += 2) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    }
    double s = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void tridiag_apply_neon(const double* diag, const double* off,
                        const double* x, double* y, std::size_t n) {
    if (n == 1) {
        y[0] = diag[0] * x[0];
        return;
    }
    y[0] = diag[0] * x[0] + off[0] * x[1];
    std::size_t i = 1;
    for (; i + 2 < n; i += 2) {
        float64x2_t d  = vld1q_f64(diag + i);
        float64x2_t xm = vld1q_f64(x + i - 1);
        float64x2_t xc = vld1q_f64(x + i);
        float64x2_t xp = vld1q_f64(x + i + 1);
        float64x2_t em = vld1q_f64(off + i - 1);
        float64x2_t ep = vld1q_f64(off + i);
        float64x2_t r = vmulq_f64(ep, xp);
        r = vfmaq_f64(r, em, xm);
        r = vfmaq_f64(r, d, xc);
        vst1q_f64(y + i, r);
    }
    for (; i + 1 < n; ++i) {
        y[i] = diag[i] * x[i] + off[i - 1] * x[i - 1] + off[i] * x[i + 1];
    }
    y[n - 1] = diag[n - 1] * x[n - 1] + off[n - 2] * x[n - 2];
}

void combine2_neon(double a, const double* x, double b, const double* y,
                   double* out, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    float64x2_t vb = vdupq_n_f64(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t r = vmulq_f64(vb, vld1q_f64(y + i));
        r = vfmaq_f64(r, va, vld1q_f64(x + i));
        vst1q_f64(out + i, r);
    }
    for (; i < n; ++i) {
        out[i] = a * x[i] + b * y[i];
    }
}

void combine3_neon(double a, const double* x, double b, const double* y,
                   double c, const double* z, double* out, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    float64x2_t vb = vdupq_n_f64(b);
    float64x2_t vc = vdupq_n_f64(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t r = vmulq_f64(vc, vld1q_f64(z + i));
        r = vfmaq_f64(r, vb, vld1q_f64(y + i));
        r = vfmaq_f64(r, va, vld1q_f64(x + i));
        vst1q_f64(out + i, r);
    }
    for (; i < n; ++i) {
        out[i] = a * x[i] + b * y[i] + c * z[i];
    }
}

constexpr KernelSet neon_set = {
    "neon",
    dot_neon,
    tridiag_apply_neon,
    combine2_neon,
    combine3_neon,
};

} // namespace

const KernelSet& neon_kernel_set() {
    return neon_set;
}

} // namespace opstep::kern

#endif // OPSTEP_WITH_NEON
