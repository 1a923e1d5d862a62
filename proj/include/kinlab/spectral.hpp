#pragma once

#include <complex>
#include <vector>

namespace kinlab {

// Discrete Fourier analysis for real periodic data on a uniform grid over
// one unit period.  Sizes are small (<= a few thousand), so we use an exact
// radix-2 FFT for powers of two and a plain O(n^2) transform otherwise;
// both are single-threaded and bit-deterministic.

// Forward transform, unnormalized: F_k = sum_j f_j exp(-2*pi*i*j*k/n).
std::vector<std::complex<double>> dft(const std::vector<double>& f);

// Inverse of dft (includes the 1/n factor); imaginary parts are discarded.
std::vector<double> idft_real(std::vector<std::complex<double>> spectrum);

// Signed integer frequency of bin k for length n (k <= n/2 ? k : k - n).
int signed_frequency(int k, int n);

// Spectral d/dx for unit-period data; the Nyquist mode is zeroed (odd
// derivative has no consistent real representation there).
std::vector<double> spectral_derivative(const std::vector<double>& f);

// Spectral d^2/dx^2 for unit-period data (Nyquist mode kept: even
// derivative is representable).
std::vector<double> spectral_second_derivative(const std::vector<double>& f);

// Zero-mean U solving -coef * U'' = src - mean(src) on the unit torus.
std::vector<double> solve_poisson_zero_mean(const std::vector<double>& src,
                                            double coef);

// U solving U - coef * U'' = src on the unit torus (screened operator;
// includes the constant mode, no normalization needed).
std::vector<double> solve_screened(const std::vector<double>& src, double coef);

// Dense matrix of spectral_second_derivative as a circulant (row-major,
// n x n), for use inside Newton solvers.
std::vector<double> second_derivative_matrix(int n);

}  // namespace kinlab
