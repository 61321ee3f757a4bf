#pragma once

#include <span>

#include "cptsim/spectroscopy.hpp"

namespace cpt {

// Peak-normalized Voigt: amplitude is the height above background at the
// line center, so contrast = amplitude / background directly.
struct VoigtParams {
  double center = 0.0;         // rad/s
  double gaussianSigma = 0.0;  // rad/s, >= 0
  double lorentzGamma = 0.0;   // rad/s, HWHM, >= 0
  double amplitude = 0.0;      // > 0 for a transparency peak
  double background = 0.0;

  void validate() const;
};

// Unit-peak Voigt kernel K(u), K(0) = 1; degenerates to a pure
// Lorentzian / Gaussian when one width vanishes.
double voigt_unit(double u, double sigma, double gamma);

// background + amplitude * K(x - center).
double voigt(double x, const VoigtParams& p);

// Full width at half maximum by bisection on both sides of the center
// (authoritative; the closed-form approximation is only a cross-check).
double fwhm_of(const VoigtParams& p);

// 0.5346 fL + sqrt(0.2166 fL^2 + fG^2); ~0.02% accurate, used as a
// sanity cross-check and for initialization.
double fwhm_approximation(double sigma, double gamma);

struct FitResult {
  VoigtParams params;
  double contrast = 0.0;      // amplitude / background
  double fwhm = 0.0;          // rad/s
  double residualNorm = 0.0;  // RMS residual
  bool converged = false;
  int iterations = 0;
};

// Damped least-squares Voigt fit.  Initialization: background from the
// outer 10% of points, center/amplitude from the peak, widths from the
// half-max crossings split evenly between sigma and gamma.  Converges
// when the relative parameter step drops below 1e-8 (max 200
// iterations); throws DegenerateData on flat input.
FitResult fit_voigt(std::span<const double> x, std::span<const double> y);
FitResult fit_voigt(const Spectrum& spectrum);

}  // namespace cpt
