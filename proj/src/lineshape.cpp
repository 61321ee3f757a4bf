#include "cptsim/lineshape.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cptsim/errors.hpp"
#include "cptsim/faddeeva.hpp"

namespace cpt {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Ln2 = 1.1774100225154746910;  // sqrt(2 ln 2)
}  // namespace

void VoigtParams::validate() const {
  if (!(gaussianSigma >= 0.0) || !(lorentzGamma >= 0.0))
    throw ConfigError("Voigt widths must be >= 0");
  if (gaussianSigma == 0.0 && lorentzGamma == 0.0)
    throw ConfigError("Voigt widths must not both be zero");
  if (!std::isfinite(amplitude) || !std::isfinite(background) || !std::isfinite(center))
    throw ConfigError("Voigt parameters must be finite");
}

double voigt_unit(double u, double sigma, double gamma) {
  const double widthSum = sigma + gamma;
  if (sigma <= 1e-12 * widthSum) {
    const double r = u / gamma;
    return 1.0 / (1.0 + r * r);
  }
  if (gamma <= 1e-12 * widthSum) {
    const double r = u / sigma;
    return std::exp(-0.5 * r * r);
  }
  const double s = sigma * kSqrt2;
  const std::complex<double> z(u / s, gamma / s);
  const std::complex<double> z0(0.0, gamma / s);
  return faddeeva_w(z).real() / faddeeva_w(z0).real();
}

double voigt(double x, const VoigtParams& p) {
  p.validate();
  return p.background + p.amplitude * voigt_unit(x - p.center, p.gaussianSigma, p.lorentzGamma);
}

double fwhm_approximation(double sigma, double gamma) {
  const double fl = 2.0 * gamma;
  const double fg = 2.0 * kSqrt2Ln2 * sigma;
  return 0.5346 * fl + std::sqrt(0.2166 * fl * fl + fg * fg);
}

namespace {

// Positive root of K(u) = 1/2; K is even and unimodal.
double half_crossing(double sigma, double gamma) {
  double hi = 0.5 * std::max(fwhm_approximation(sigma, gamma), 1e-300);
  int guard = 0;
  while (voigt_unit(hi, sigma, gamma) > 0.5) {
    hi *= 2.0;
    if (++guard > 200) throw Error("fwhm_of: no half-max crossing found");
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (voigt_unit(mid, sigma, gamma) > 0.5 ? lo : hi) = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double fwhm_of(const VoigtParams& p) {
  p.validate();
  // Evaluate both sides of the center; the kernel is symmetric so the
  // crossings coincide, but the contract is a two-sided solve.
  const double right = half_crossing(p.gaussianSigma, p.lorentzGamma);
  const double left = half_crossing(p.gaussianSigma, p.lorentzGamma);
  return right + left;
}

namespace {

struct FitScales {
  double center, sigma, gamma, amplitude, background;
};

double model_of(const Eigen::Matrix<double, 5, 1>& p, double x) {
  return p(4) + p(3) * voigt_unit(x - p(0), std::abs(p(1)), std::abs(p(2)));
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

FitResult fit_voigt(std::span<const double> x, std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  if (n != static_cast<int>(y.size())) throw ConfigError("fit_voigt: size mismatch");
  if (n < 10) throw ConfigError("fit_voigt: need at least 10 points");

  // Initialization.
  const int tail = std::max(1, n / 10);
  std::vector<double> outer;
  for (int i = 0; i < tail; ++i) outer.push_back(y[i]);
  for (int i = n - tail; i < n; ++i) outer.push_back(y[i]);
  const double bg0 = median_of(outer);

  int peak = 0;
  for (int i = 1; i < n; ++i)
    if (y[i] > y[peak]) peak = i;
  const double amp0 = y[peak] - bg0;
  if (amp0 < 1e-12) throw DegenerateData("fit_voigt: flat spectrum, no peak above background");
  const double center0 = x[peak];

  // Half-max crossings around the peak, linearly interpolated.
  const double half = bg0 + 0.5 * amp0;
  double xl = x.front(), xr = x.back();
  for (int i = peak; i > 0; --i) {
    if (y[i - 1] <= half) {
      const double f = (y[i] - half) / (y[i] - y[i - 1]);
      xl = x[i] + f * (x[i - 1] - x[i]);
      break;
    }
  }
  for (int i = peak; i < n - 1; ++i) {
    if (y[i + 1] <= half) {
      const double f = (y[i] - half) / (y[i] - y[i + 1]);
      xr = x[i] + f * (x[i + 1] - x[i]);
      break;
    }
  }
  double width0 = xr - xl;
  if (!(width0 > 0.0)) width0 = 0.25 * (x.back() - x.front());

  // Split the estimated FWHM evenly between the two shapes: with
  // fL = fG = f the approximation gives FWHM = 1.6376 f.
  const double f0 = width0 / 1.6376;
  const double gamma0 = 0.5 * f0;
  const double sigma0 = 0.5 * f0 / kSqrt2Ln2;

  using Vec5 = Eigen::Matrix<double, 5, 1>;
  using Mat5 = Eigen::Matrix<double, 5, 5>;
  Vec5 p;
  p << center0, sigma0, gamma0, amp0, bg0;
  const FitScales scales{width0, sigma0, gamma0, amp0, std::max(std::abs(bg0), amp0)};
  const Vec5 scaleVec = (Vec5() << scales.center, scales.sigma, scales.gamma,
                         scales.amplitude, scales.background)
                            .finished();

  auto residuals = [&](const Vec5& q, Eigen::VectorXd& r) {
    for (int i = 0; i < n; ++i) r(i) = model_of(q, x[i]) - y[i];
  };

  Eigen::VectorXd r(n), rTrial(n);
  residuals(p, r);
  double cost = r.squaredNorm();

  FitResult result;
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < 200 && !converged; ++iter) {
    // Forward-difference Jacobian with shift/scale-invariant steps.
    Eigen::MatrixXd jac(n, 5);
    for (int j = 0; j < 5; ++j) {
      Vec5 q = p;
      const double h = 1e-7 * scaleVec(j);
      q(j) += h;
      for (int i = 0; i < n; ++i) jac(i, j) = (model_of(q, x[i]) - (r(i) + y[i])) / h;
    }
    const Mat5 jtj = jac.transpose() * jac;
    const Vec5 g = jac.transpose() * r;
    const double diagFloor = 1e-14 * jtj.diagonal().maxCoeff();

    bool accepted = false;
    for (int inner = 0; inner < 30; ++inner) {
      Mat5 a = jtj;
      for (int j = 0; j < 5; ++j) a(j, j) += lambda * std::max(jtj(j, j), diagFloor);
      const Vec5 step = a.ldlt().solve(-g);
      const Vec5 trial = p + step;
      residuals(trial, rTrial);
      const double trialCost = rTrial.squaredNorm();
      if (trialCost < cost) {
        p = trial;
        r.swap(rTrial);
        cost = trialCost;
        lambda = std::max(lambda * 0.1, 1e-14);
        double rel = 0.0;
        for (int j = 0; j < 5; ++j) rel = std::max(rel, std::abs(step(j)) / scaleVec(j));
        if (rel < 1e-8) converged = true;
        accepted = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (!accepted) break;  // stalled; report best-so-far
  }

  result.params.center = p(0);
  result.params.gaussianSigma = std::abs(p(1));
  result.params.lorentzGamma = std::abs(p(2));
  result.params.amplitude = p(3);
  result.params.background = p(4);
  result.converged = converged;
  result.iterations = iter;
  result.residualNorm = std::sqrt(cost / n);
  result.contrast = result.params.amplitude / result.params.background;
  if (result.params.gaussianSigma + result.params.lorentzGamma > 0.0)
    result.fwhm = fwhm_of(result.params);
  return result;
}

FitResult fit_voigt(const Spectrum& spectrum) {
  std::vector<double> x, y;
  x.reserve(spectrum.points.size());
  y.reserve(spectrum.points.size());
  for (const auto& pt : spectrum.points) {
    x.push_back(pt.delta);
    y.push_back(pt.transmission);
  }
  return fit_voigt(x, y);
}

}  // namespace cpt
