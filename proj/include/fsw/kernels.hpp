#pragma once

#include <cstddef>

namespace fsw::kernels {

// Flat arrays of doubles. All routines allow out to alias an input of the
// same length (elementwise ops only; mat_apply requires distinct buffers).
struct Table {
    const char* name;
    // out = a * b
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    // acc += a * b
    void (*mul_add)(const double* a, const double* b, double* acc, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // x *= alpha
    void (*scale)(double alpha, double* x, std::size_t n);
    // sum a*b, pairwise order fixed per implementation
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*max_abs)(const double* a, std::size_t n);
    // out[i*plane + p] = sum_j m[i*nz + j] * in[j*plane + p]
    void (*mat_apply)(const double* m, int nz, const double* in, double* out, std::size_t plane);
};

const Table& scalar();
const Table* avx2();  // nullptr when not compiled in
const Table* neon();  // nullptr when not compiled in

// Chosen once at first use: best supported table unless FSW_KERNELS=scalar.
const Table& active();

}  // namespace fsw::kernels
