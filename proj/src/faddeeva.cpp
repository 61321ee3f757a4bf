#include "cptsim/faddeeva.hpp"

#include <array>
#include <cmath>

namespace cpt {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr int kTerms = 48;  // rational-approximation order

// Weideman-style rational approximation: expand (L^2 + t^2) exp(-t^2) in
// the Moebius variable Z = (L + iz)/(L - iz); coefficients come from a
// discrete Fourier transform over the mapped grid, computed once.
struct WeidemanCoeffs {
  double L;
  std::array<double, kTerms> a;  // a[m-1] multiplies Z^(m-1)
};

WeidemanCoeffs compute_coeffs() {
  WeidemanCoeffs c;
  const int n = kTerms;
  const int m = 2 * n;
  const int m2 = 4 * n;
  c.L = std::sqrt(n / std::sqrt(2.0));

  // g = fftshift([0, f(k)]) with k = -m+1 .. m-1 and t = L tan(theta/2).
  std::array<double, 4 * kTerms> g{};
  for (int k = -m + 1; k <= m - 1; ++k) {
    const double theta = k * M_PI / m;
    const double t = c.L * std::tan(0.5 * theta);
    const double f = std::exp(-t * t) * (c.L * c.L + t * t);
    const int j = k + m;          // index in [0, f] vector, 1-based part
    const int shifted = (j + m) % m2;
    g[shifted] = f;
  }

  for (int coef = 1; coef <= n; ++coef) {
    double re = 0.0;
    for (int j = 0; j < m2; ++j) {
      if (g[j] == 0.0) continue;
      re += g[j] * std::cos(2.0 * M_PI * j * coef / m2);
    }
    c.a[coef - 1] = re / m2;
  }
  return c;
}

const WeidemanCoeffs& coeffs() {
  static const WeidemanCoeffs c = compute_coeffs();
  return c;
}

std::complex<double> weideman(std::complex<double> z) {
  const auto& c = coeffs();
  const std::complex<double> iz(-z.imag(), z.real());
  const std::complex<double> lmiz = c.L - iz;
  const std::complex<double> zz = (c.L + iz) / lmiz;
  std::complex<double> p(c.a[kTerms - 1], 0.0);
  for (int m = kTerms - 2; m >= 0; --m) p = p * zz + c.a[m];
  return 2.0 * p / (lmiz * lmiz) + (1.0 / kSqrtPi) / lmiz;
}

// Laplace continued fraction, accurate in the far wing.
std::complex<double> continued_fraction(std::complex<double> z) {
  constexpr int depth = 16;
  std::complex<double> f = z;
  for (int n = depth; n >= 1; --n) f = z - (0.5 * n) / f;
  return std::complex<double>(0.0, 1.0 / kSqrtPi) / f;
}

}  // namespace

std::complex<double> faddeeva_w(std::complex<double> z) {
  if (z.imag() < 0.0) {
    // w(z) = 2 exp(-z^2) - w(-z); only lightly used, overflows for
    // strongly negative imaginary parts.
    const std::complex<double> e = std::exp(-z * z);
    return 2.0 * e - faddeeva_w(-z);
  }
  if (std::norm(z) >= 64.0) return continued_fraction(z);
  return weideman(z);
}

}  // namespace cpt
