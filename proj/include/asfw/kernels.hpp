#pragma once

#include <cstddef>

// Dense vector kernels used in the simplex tableau updates and model
// evaluation. A scalar reference implementation is always available;
// on x86-64 an AVX2/FMA variant is selected at runtime when the CPU
// supports it. The two are equivalence-tested against each other.

namespace asfw::kernels {

// Scalar reference kernels.
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);  // y += alpha * x
void scale_scalar(double* x, double alpha, std::size_t n);

// Dispatched entry points (scalar or AVX2, chosen once at startup).
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double* x, double alpha, std::size_t n);

// Name of the backend selected at runtime ("scalar", "avx2").
const char* active_backend();

}  // namespace asfw::kernels
