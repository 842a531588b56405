#pragma once

#include <complex>

namespace lp::fft {

// Complex-to-complex transforms on a periodic grid with n points per axis,
// dim in {1,2}. forward computes X_k = sum_m x_m e^{-2pi i k.m/n} (no
// normalization); backward is the conjugate-sign inverse (no 1/n^d either).
// Plans are cached per (dim, n, sign); execution is thread-safe.
void forward(int dim, int n, const std::complex<double>* in, std::complex<double>* out);
void backward(int dim, int n, const std::complex<double>* in, std::complex<double>* out);

}  // namespace lp::fft
