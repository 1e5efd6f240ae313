// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma on x86-64 only; callers must verify CPU support before use
// (kernels_by_name does).

#include "opstep/kernels.hpp"

#if defined(OPSTEP_WITH_AVX2)

#include <immintrin.h>

namespace opstep::kern {

namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                               _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                               _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                               _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void tridiag_apply_avx2(const double* diag, const double* off,
                        const double* x, double* y, std::size_t n) {
    if (n == 1) {
        y[0] = diag[0] * x[0];
        return;
    }
    y[0] = diag[0] * x[0] + off[0] * x[1];
    // Interior rows i in [1, n-1): y[i] = d[i]x[i] + e[i-1]x[i-1] + e[i]x[i+1].
    std::size_t i = 1;
    for (; i + 4 < n; i += 4) {
        __m256d d  = _mm256_loadu_pd(diag + i);
        __m256d xm = _mm256_loadu_pd(x + i - 1);
        __m256d xc = _mm256_loadu_pd(x + i);
        __m256d xp = _mm256_loadu_pd(x + i + 1);
        __m256d em = _mm256_loadu_pd(off + i - 1);
        __m256d ep = _mm256_loadu_pd(off + i);
        __m256d r = _mm256_mul_pd(ep, xp);
        r = _mm256_fmadd_pd(em, xm, r);
        r = _mm256_fmadd_pd(d, xc, r);
        _mm256_storeu_pd(y + i, r);
    }
    for (; i + 1 < n; ++i) {
        y[i] = diag[i] * x[i] + off[i - 1] * x[i - 1] + off[i] * x[i + 1];
    }
    y[n - 1] = diag[n - 1] * x[n - 1] + off[n - 2] * x[n - 2];
}

void combine2_avx2(double a, const double* x, double b, const double* y,
                   double* out, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), r);
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) {
        out[i] = a * x[i] + b * y[i];
    }
}

void combine3_avx2(double a, const double* x, double b, const double* y,
                   double c, const double* z, double* out, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    __m256d vb = _mm256_set1_pd(b);
    __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_mul_pd(vc, _mm256_loadu_pd(z + i));
        r = _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), r);
        r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), r);
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) {
        out[i] = a * x[i] + b * y[i] + c * z[i];
    }
}

constexpr KernelSet avx2_set = {
    "avx2",
    dot_avx2,
    tridiag_apply_avx2,
    combine2_avx2,
    combine3_avx2,
};

} // namespace

const KernelSet& avx2_kernel_set() {
    return avx2_set;
}

} // namespace opstep::kern

#endif // OPSTEP_WITH_AVX2
