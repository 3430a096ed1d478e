// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be entered after the dispatcher has verified
// CPU support, so it contains nothing but the vector kernels themselves.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstddef>

namespace topoalign::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sqnorm(const double* a, std::size_t n) {
    return dot(a, a, n);
}

double sqdist(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d, d, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void edge_dots(const double* xa, const double* xb, const double* ya, const double* yb,
               std::size_t n, double& uv, double& uu, double& vv) {
    __m256d auv = _mm256_setzero_pd();
    __m256d auu = _mm256_setzero_pd();
    __m256d avv = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d u = _mm256_sub_pd(_mm256_loadu_pd(xa + i), _mm256_loadu_pd(xb + i));
        __m256d v = _mm256_sub_pd(_mm256_loadu_pd(ya + i), _mm256_loadu_pd(yb + i));
        auv = _mm256_fmadd_pd(u, v, auv);
        auu = _mm256_fmadd_pd(u, u, auu);
        avv = _mm256_fmadd_pd(v, v, avv);
    }
    double suv = hsum(auv), suu = hsum(auu), svv = hsum(avv);
    for (; i < n; ++i) {
        const double u = xa[i] - xb[i];
        const double v = ya[i] - yb[i];
        suv += u * v;
        suu += u * u;
        svv += v * v;
    }
    uv = suv;
    uu = suu;
    vv = svv;
}

void combine_diffs(double cu, const double* xa, const double* xb,
                   double cv, const double* ya, const double* yb,
                   double* out, std::size_t n) {
    const __m256d vcu = _mm256_set1_pd(cu);
    const __m256d vcv = _mm256_set1_pd(cv);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d u = _mm256_sub_pd(_mm256_loadu_pd(xa + i), _mm256_loadu_pd(xb + i));
        __m256d v = _mm256_sub_pd(_mm256_loadu_pd(ya + i), _mm256_loadu_pd(yb + i));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vcu, u, _mm256_mul_pd(vcv, v)));
    }
    for (; i < n; ++i) out[i] = cu * (xa[i] - xb[i]) + cv * (ya[i] - yb[i]);
}

} // namespace topoalign::kernels::avx2

#endif // x86-64
