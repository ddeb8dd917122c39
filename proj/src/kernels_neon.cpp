#include "fsw/kernels.hpp"

#if defined(__ARM_NEON) && defined(__aarch64__)
#include <arm_neon.h>

#include <cmath>

namespace fsw::kernels {
namespace {

void mul(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_add(const double* a, const double* b, double* acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(acc + i, vfmaq_f64(vld1q_f64(acc + i), vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) acc[i] = std::fma(a[i], b[i], acc[i]);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void scale(double alpha, double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

double dot(const double* a, const double* b, std::size_t n) {
    // two registers give the same four-lane layout as the scalar reference
    float64x2_t s01 = vdupq_n_f64(0.0), s23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s01 = vfmaq_f64(s01, vld1q_f64(a + i), vld1q_f64(b + i));
        s23 = vfmaq_f64(s23, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double t = (vgetq_lane_f64(s01, 0) + vgetq_lane_f64(s23, 0)) + (vgetq_lane_f64(s01, 1) + vgetq_lane_f64(s23, 1));
    for (; i < n; ++i) t += a[i] * b[i];
    return t;
}

double max_abs(const double* a, std::size_t n) {
    float64x2_t m = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(a + i)));
    double r = std::fmax(vgetq_lane_f64(m, 0), vgetq_lane_f64(m, 1));
    for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i]));
    return r;
}

void mat_apply(const double* m, int nz, const double* in, double* out, std::size_t plane) {
    for (int i = 0; i < nz; ++i) {
        std::size_t p = 0;
        for (; p + 2 <= plane; p += 2) {
            float64x2_t r = vdupq_n_f64(0.0);
            for (int j = 0; j < nz; ++j) r = vfmaq_f64(r, vdupq_n_f64(m[i * nz + j]), vld1q_f64(in + j * plane + p));
            vst1q_f64(out + i * plane + p, r);
        }
        for (; p < plane; ++p) {
            double s = 0.0;
            for (int j = 0; j < nz; ++j) s = std::fma(m[i * nz + j], in[j * plane + p], s);
            out[i * plane + p] = s;
        }
    }
}

}  // namespace

const Table* neon() {
    static const Table t{"neon", mul, mul_add, axpy, scale, dot, max_abs, mat_apply};
    return &t;
}

}  // namespace fsw::kernels

#else

namespace fsw::kernels {
const Table* neon() { return nullptr; }
}  // namespace fsw::kernels

#endif
