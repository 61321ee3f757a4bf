#pragma once

#include <complex>

namespace cpt {

// Scaled complex error function w(z) = exp(-z^2) erfc(-iz), intended for
// Im z >= 0 (the Voigt domain).  Rational approximation in the interior,
// Laplace continued fraction in the far wing; relative error of Re w is
// below 1e-6 over the Voigt parameter domain (verified against a
// quadrature oracle in the tests).
std::complex<double> faddeeva_w(std::complex<double> z);

}  // namespace cpt
