#include "fsw/kernels.hpp"

#if defined(FSW_HAVE_AVX2)
#include <immintrin.h>

namespace fsw::kernels {
namespace {

void mul(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

// Fused multiply-add rounds once; the scalar path rounds twice, so results
// differ in the last bit.
void mul_add(const double* a, const double* b, double* acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), _mm256_loadu_pd(acc + i));
        _mm256_storeu_pd(acc + i, r);
    }
    for (; i < n; ++i) acc[i] = __builtin_fma(a[i], b[i], acc[i]);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] = __builtin_fma(alpha, x[i], y[i]);
}

void scale(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d s = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) s = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s);
    alignas(32) double l[4];
    _mm256_store_pd(l, s);
    double t = (l[0] + l[2]) + (l[1] + l[3]);
    for (; i < n; ++i) t += a[i] * b[i];
    return t;
}

double max_abs(const double* a, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(a + i)));
    alignas(32) double l[4];
    _mm256_store_pd(l, m);
    double r = __builtin_fmax(__builtin_fmax(l[0], l[1]), __builtin_fmax(l[2], l[3]));
    for (; i < n; ++i) r = __builtin_fmax(r, __builtin_fabs(a[i]));
    return r;
}

void mat_apply(const double* m, int nz, const double* in, double* out, std::size_t plane) {
    // four output rows per pass so every loaded input vector feeds four FMAs
    int i = 0;
    for (; i + 4 <= nz; i += 4) {
        std::size_t p = 0;
        for (; p + 4 <= plane; p += 4) {
            __m256d r0 = _mm256_setzero_pd(), r1 = _mm256_setzero_pd();
            __m256d r2 = _mm256_setzero_pd(), r3 = _mm256_setzero_pd();
            for (int j = 0; j < nz; ++j) {
                const __m256d x = _mm256_loadu_pd(in + j * plane + p);
                r0 = _mm256_fmadd_pd(_mm256_set1_pd(m[(i + 0) * nz + j]), x, r0);
                r1 = _mm256_fmadd_pd(_mm256_set1_pd(m[(i + 1) * nz + j]), x, r1);
                r2 = _mm256_fmadd_pd(_mm256_set1_pd(m[(i + 2) * nz + j]), x, r2);
                r3 = _mm256_fmadd_pd(_mm256_set1_pd(m[(i + 3) * nz + j]), x, r3);
            }
            _mm256_storeu_pd(out + (i + 0) * plane + p, r0);
            _mm256_storeu_pd(out + (i + 1) * plane + p, r1);
            _mm256_storeu_pd(out + (i + 2) * plane + p, r2);
            _mm256_storeu_pd(out + (i + 3) * plane + p, r3);
        }
        for (; p < plane; ++p)
            for (int r = 0; r < 4; ++r) {
                double s = 0.0;
                for (int j = 0; j < nz; ++j) s = __builtin_fma(m[(i + r) * nz + j], in[j * plane + p], s);
                out[(i + r) * plane + p] = s;
            }
    }
    for (; i < nz; ++i) {
        std::size_t p = 0;
        for (; p + 4 <= plane; p += 4) {
            __m256d r0 = _mm256_setzero_pd();
            for (int j = 0; j < nz; ++j)
                r0 = _mm256_fmadd_pd(_mm256_set1_pd(m[i * nz + j]), _mm256_loadu_pd(in + j * plane + p), r0);
            _mm256_storeu_pd(out + i * plane + p, r0);
        }
        for (; p < plane; ++p) {
            double s = 0.0;
            for (int j = 0; j < nz; ++j) s = __builtin_fma(m[i * nz + j], in[j * plane + p], s);
            out[i * plane + p] = s;
        }
    }
}

}  // namespace

const Table* avx2() {
    static const Table t{"avx2", mul, mul_add, axpy, scale, dot, max_abs, mat_apply};
    return &t;
}

}  // namespace fsw::kernels

#else

namespace fsw::kernels {
const Table* avx2() { return nullptr; }
}  // namespace fsw::kernels

#endif
