#include "fsw/kernels.hpp"

#include <cmath>

namespace fsw::kernels {
namespace {

void mul(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_add(const double* a, const double* b, double* acc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += a[i] * b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double dot(const double* a, const double* b, std::size_t n) {
    // four interleaved partial sums, same lane layout as the vector paths
    double s[4] = {0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (int l = 0; l < 4; ++l) s[l] += a[i + l] * b[i + l];
    double t = (s[0] + s[2]) + (s[1] + s[3]);
    for (; i < n; ++i) t += a[i] * b[i];
    return t;
}

double max_abs(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i]));
    return m;
}

void mat_apply(const double* m, int nz, const double* in, double* out, std::size_t plane) {
    for (int i = 0; i < nz; ++i) {
        double* o = out + i * plane;
        for (std::size_t p = 0; p < plane; ++p) o[p] = 0.0;
        for (int j = 0; j < nz; ++j) {
            const double c = m[i * nz + j];
            if (c == 0.0) continue;
            const double* x = in + j * plane;
            for (std::size_t p = 0; p < plane; ++p) o[p] += c * x[p];
        }
    }
}

}  // namespace

const Table& scalar() {
    static const Table t{"scalar", mul, mul_add, axpy, scale, dot, max_abs, mat_apply};
    return t;
}

}  // namespace fsw::kernels
