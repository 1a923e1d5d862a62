#include "kinlab/spectral.hpp"

#include <cmath>

#include "kinlab/errors.hpp"

namespace kinlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT; sign = -1 forward, +1 inverse (no 1/n).
void fft_pow2(std::vector<std::complex<double>>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        // Twiddle from cos/sin directly (not by recurrence) for accuracy.
        std::complex<double> w(std::cos(ang * static_cast<double>(k)),
                               std::sin(ang * static_cast<double>(k)));
        std::complex<double> u = a[i + k];
        std::complex<double> t = a[i + k + len / 2] * w;
        a[i + k] = u + t;
        a[i + k + len / 2] = u - t;
      }
    }
  }
}

std::vector<std::complex<double>> dft_naive(
    const std::vector<std::complex<double>>& a, int sign) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> s(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double ang = sign * kTwoPi * static_cast<double>(j * k % n) /
                   static_cast<double>(n);
      s += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = s;
  }
  return out;
}

std::vector<std::complex<double>> transform(
    std::vector<std::complex<double>> a, int sign) {
  if (a.size() < 2) return a;
  if (is_pow2(a.size())) {
    fft_pow2(a, sign);
    return a;
  }
  return dft_naive(a, sign);
}

}  // namespace

std::vector<std::complex<double>> dft(const std::vector<double>& f) {
  std::vector<std::complex<double>> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = f[i];
  return transform(std::move(a), -1);
}

std::vector<double> idft_real(std::vector<std::complex<double>> spectrum) {
  const std::size_t n = spectrum.size();
  std::vector<std::complex<double>> a = transform(std::move(spectrum), +1);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real() / static_cast<double>(n);
  return out;
}

int signed_frequency(int k, int n) { return k <= n / 2 ? k : k - n; }

std::vector<double> spectral_derivative(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  if (n < 4) throw ArgumentError("spectral_derivative needs n >= 4");
  std::vector<std::complex<double>> F = dft(f);
  for (int k = 0; k < n; ++k) {
    int m = signed_frequency(k, n);
    if (n % 2 == 0 && k == n / 2) {
      F[k] = 0.0;
    } else {
      F[k] *= std::complex<double>(0.0, kTwoPi * m);
    }
  }
  return idft_real(std::move(F));
}

std::vector<double> spectral_second_derivative(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  if (n < 4) throw ArgumentError("spectral_second_derivative needs n >= 4");
  std::vector<std::complex<double>> F = dft(f);
  for (int k = 0; k < n; ++k) {
    double kap = kTwoPi * signed_frequency(k, n);
    F[k] *= -kap * kap;
  }
  return idft_real(std::move(F));
}

std::vector<double> solve_poisson_zero_mean(const std::vector<double>& src,
                                            double coef) {
  const int n = static_cast<int>(src.size());
  if (n < 4) throw ArgumentError("solve_poisson_zero_mean needs n >= 4");
  if (!(coef > 0.0)) throw ArgumentError("poisson coefficient must be positive");
  std::vector<std::complex<double>> F = dft(src);
  F[0] = 0.0;  // drop the mean: zero-mean solution of -coef U'' = src - mean
  for (int k = 1; k < n; ++k) {
    double kap = kTwoPi * signed_frequency(k, n);
    F[k] /= coef * kap * kap;
  }
  return idft_real(std::move(F));
}

std::vector<double> solve_screened(const std::vector<double>& src, double coef) {
  const int n = static_cast<int>(src.size());
  if (n < 4) throw ArgumentError("solve_screened needs n >= 4");
  if (!(coef > 0.0)) throw ArgumentError("screening coefficient must be positive");
  std::vector<std::complex<double>> F = dft(src);
  for (int k = 0; k < n; ++k) {
    double kap = kTwoPi * signed_frequency(k, n);
    F[k] /= 1.0 + coef * kap * kap;
  }
  return idft_real(std::move(F));
}

std::vector<double> second_derivative_matrix(int n) {
  if (n < 4) throw ArgumentError("second_derivative_matrix needs n >= 4");
  // The operator is a circulant: compute its first column by applying it to
  // the first unit vector, then shift.
  std::vector<double> e0(n, 0.0);
  e0[0] = 1.0;
  std::vector<double> col = spectral_second_derivative(e0);
  std::vector<double> mat(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      mat[static_cast<std::size_t>(i) * n + j] = col[(i - j + n) % n];
  return mat;
}

}  // namespace kinlab
