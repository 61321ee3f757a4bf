#include <doctest.h>

#include <cmath>
#include <vector>

#include "cptsim/constants.hpp"
#include "cptsim/errors.hpp"
#include "cptsim/spectroscopy.hpp"

using namespace cpt;

namespace {

// Mild-stiffness paper-like parameters (fast solves, same code paths).
ModelParams lab_params(double sigmaRabi, double piRabi) {
  ModelParams p = default_params();
  p.gammaExc = kTwoPi * 1e5;
  p.gammaPop = kTwoPi * 400.0;
  p.gammaCoh = kTwoPi * 500.0;
  p.offResDetuning = kTwoPi * 5e5;
  p.mode(ModeId::SigmaA).rabi = sigmaRabi;
  p.mode(ModeId::SigmaB).rabi = sigmaRabi;
  p.mode(ModeId::PiA).rabi = piRabi;
  p.mode(ModeId::PiB).rabi = piRabi;
  return p;
}

AbsorptionScale scale_of(double kappa) {
  AbsorptionScale s;
  s.kappa = kappa;
  return s;
}

// Two-level reduction: Clock2 <-> CptExcited driven by SigmaA; every
// other level is drained so the kernel stays one-dimensional and the
// 2x2 block obeys the bare Bloch equations.
std::vector<LindbladChannel> two_level_channels(double gamma) {
  return {{ChannelKind::Decay, Level::CptExcited, Level::Clock2, gamma},
          {ChannelKind::GroundMix, Level::Clock1, Level::Clock2, gamma},
          {ChannelKind::GroundMix, Level::Trap, Level::Clock2, gamma},
          {ChannelKind::Decay, Level::PiExcited, Level::Clock2, gamma},
          {ChannelKind::Decay, Level::OffRes1, Level::Clock2, gamma},
          {ChannelKind::Decay, Level::OffRes2, Level::Clock2, gamma}};
}

}  // namespace

TEST_CASE("geometry validation") {
  CellGeometry g;
  g.validate();
  g.repumpStart = 0.02;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = CellGeometry{};
  g.slices = 2;
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("inert modes absorb nothing") {
  const ModelParams p = lab_params(0.0, 0.0);
  const auto alpha = absorption_coefficients(thermal_state(), p, scale_of(100.0));
  CHECK(alpha[0] == 0.0);
  CHECK(alpha[1] == 0.0);
}

TEST_CASE("kappa = 0 transmits everything") {
  const ModelParams p = lab_params(kTwoPi * 2e4, kTwoPi * 1e4);
  const auto prop = propagate_cell(p, CellGeometry{}, scale_of(0.0));
  CHECK(prop.transmission == 1.0);
}

TEST_CASE("uniform medium reproduces Beer-Lambert with feedback off") {
  ModelParams p = lab_params(kTwoPi * 2e4, 0.0);
  p.delta = kTwoPi * 3e3;
  CellGeometry geom;  // pi off, so the repump window is irrelevant
  const auto prop = propagate_cell(p, geom, scale_of(40.0), false);
  // all slices see identical parameters -> identical alpha
  const double a0 = prop.slices.front().alpha[0];
  const double a1 = prop.slices.front().alpha[1];
  for (const auto& s : prop.slices) {
    CHECK(s.alpha[0] == a0);
    CHECK(s.alpha[1] == a1);
  }
  const double expected = 0.5 * (std::exp(-a0 * geom.length) + std::exp(-a1 * geom.length));
  CHECK(std::abs(prop.transmission - expected) <= 1e-12);
}

TEST_CASE("segmented transmission factorizes with feedback off") {
  ModelParams p = lab_params(kTwoPi * 2.5e4, kTwoPi * 3e4);
  p.delta = kTwoPi * 1.5e3;
  const AbsorptionScale scale = scale_of(55.0);

  CellGeometry full;
  full.length = 0.018;
  full.repumpStart = 0.006;
  full.repumpEnd = 0.012;
  full.slices = 48;
  const double tFull = propagate_cell(p, full, scale, false).transmission;

  // per-mode segment transmissions multiply; total mixes the two modes,
  // so factorize mode by mode
  CellGeometry dark;
  dark.length = 0.006;
  dark.repumpStart = dark.repumpEnd = 0.0;
  dark.slices = 16;
  CellGeometry lit = dark;
  lit.repumpStart = 0.0;
  lit.repumpEnd = lit.length;

  const auto segDark = propagate_cell(p, dark, scale, false);
  const auto segLit = propagate_cell(p, lit, scale, false);
  auto modeT = [&](const PropagationResult& r, int k) {
    return std::exp(-r.slices.front().alpha[k] * 0.006);
  };
  const double expected = 0.5 * (modeT(segDark, 0) * modeT(segLit, 0) * modeT(segDark, 0) +
                                 modeT(segDark, 1) * modeT(segLit, 1) * modeT(segDark, 1));
  CHECK(std::abs(tFull - expected) <= 1e-12);
}

TEST_CASE("repump window has no effect when the pi modes are off") {
  ModelParams p = lab_params(kTwoPi * 2e4, 0.0);
  p.delta = kTwoPi * 2e3;
  const AbsorptionScale scale = scale_of(60.0);
  CellGeometry a;
  CellGeometry b;
  b.repumpStart = 0.0;
  b.repumpEnd = 0.0;
  const auto ta = propagate_cell(p, a, scale).transmission;
  const auto tb = propagate_cell(p, b, scale).transmission;
  CHECK(ta == tb);  // bit-identical slice parameters
}

TEST_CASE("dark state gives perfect transparency in the lambda sub-model") {
  ModelParams p = default_params();
  p.gammaExc = kTwoPi * 1e6;
  const double omega = kTwoPi * 5e4;
  p.mode(ModeId::SigmaA).rabi = omega;
  p.mode(ModeId::SigmaB).rabi = omega;
  p.gammaCoh = 0.0;
  p.delta = 0.0;

  std::vector<LindbladChannel> channels = {
      {ChannelKind::Decay, Level::CptExcited, Level::Clock1, 0.5 * p.gammaExc},
      {ChannelKind::Decay, Level::CptExcited, Level::Clock2, 0.5 * p.gammaExc},
      {ChannelKind::Decay, Level::PiExcited, Level::Clock1, p.gammaExc},
      {ChannelKind::Decay, Level::OffRes1, Level::Clock2, p.gammaExc},
      {ChannelKind::Decay, Level::OffRes2, Level::Clock1, p.gammaExc},
      {ChannelKind::GroundMix, Level::Trap, Level::Clock1, p.gammaPop}};
  const auto rho = steady_state(build_liouvillian(build_hamiltonian(p), channels));

  const double kappa = 100.0;
  const auto alpha = absorption_coefficients(rho, p, scale_of(kappa));
  const double bound = 1e-10 * kappa * p.gammaExc / omega;
  CHECK(std::abs(alpha[0]) <= bound);
  CHECK(std::abs(alpha[1]) <= bound);
}

TEST_CASE("two-level saturation follows the analytic 1/(1+s) curve") {
  // Steady-state Bloch equations for a resonantly driven two-level pair
  // with decay gamma: rho_ee = W^2/(gamma^2 + 2 W^2) and
  // Im rho_ge = gamma W/(gamma^2 + 2 W^2), so the normalized response
  // 2 Im rho_ge / W equals (2/gamma) / (1 + s) with s = 2 W^2/gamma^2.
  ModelParams p = default_params();
  p.gammaExc = kTwoPi * 2e5;
  const double kappa = 75.0;
  const double alpha0 = 2.0 * kappa;  // analytic s -> 0 limit

  for (double s = 0.01; s <= 100.0; s *= 1.8) {
    const double omega = p.gammaExc * std::sqrt(0.5 * s);
    p.mode(ModeId::SigmaA).rabi = omega;
    const auto l =
        build_liouvillian(build_hamiltonian(p), two_level_channels(p.gammaExc));
    const auto rho = steady_state(l);
    const auto alpha = absorption_coefficients(rho, p, scale_of(kappa));
    CHECK(std::abs(alpha[0] / alpha0 - 1.0 / (1.0 + s)) <= 1e-8);
    CHECK(alpha[1] == 0.0);
  }
}

TEST_CASE("spectrum is symmetric for the symmetric sub-model") {
  // pi off, equal Rabi, zero one-photon detunings; the default branching
  // and thermal weights are already 1 <-> 2 symmetric.
  ModelParams p = lab_params(kTwoPi * 2e4, 0.0);
  std::vector<double> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(kTwoPi * 300.0 * i);
  const Spectrum spec = scan_spectrum(p, CellGeometry{}, scale_of(45.0), grid);
  const int n = static_cast<int>(spec.points.size());
  for (int i = 0; i < n / 2; ++i) {
    CHECK(std::abs(spec.points[i].transmission - spec.points[n - 1 - i].transmission) <=
          1e-9);
  }
  // CPT peak at zero detuning
  CHECK(spec.points[n / 2].transmission > spec.points.front().transmission);
}

TEST_CASE("scan_spectrum validates the grid and is job-count invariant") {
  const ModelParams p = lab_params(kTwoPi * 2e4, 0.0);
  CHECK_THROWS_AS(scan_spectrum(p, CellGeometry{}, scale_of(1.0), {}), ConfigError);
  CHECK_THROWS_AS(scan_spectrum(p, CellGeometry{}, scale_of(1.0), {0.0, 0.0}), ConfigError);

  std::vector<double> grid;
  for (int i = -6; i <= 6; ++i) grid.push_back(kTwoPi * 500.0 * i);
  const Spectrum s1 = scan_spectrum(p, CellGeometry{}, scale_of(45.0), grid, true, 1);
  const Spectrum s4 = scan_spectrum(p, CellGeometry{}, scale_of(45.0), grid, true, 4);
  for (size_t i = 0; i < grid.size(); ++i)
    CHECK(s1.points[i].transmission == s4.points[i].transmission);
}

TEST_CASE("slice-count refinement is converged at the default") {
  ModelParams p = lab_params(kTwoPi * 3e4, kTwoPi * 2e4);
  p.delta = 0.0;
  const AbsorptionScale scale = scale_of(50.0);
  CellGeometry g48;
  CellGeometry g96;
  g96.slices = 96;
  const double t48 = propagate_cell(p, g48, scale).transmission;
  const double t96 = propagate_cell(p, g96, scale).transmission;
  CHECK(std::abs(t96 - t48) / t96 < 1e-4);
}

TEST_CASE("kappa calibration hits the target transparency") {
  ModelParams p = lab_params(kTwoPi * 5e3, 0.0);  // small signal
  p.delta = kTwoPi * 5e4;                         // far from the CPT resonance
  const CellGeometry geom;

  const AbsorptionScale unity = calibrate_absorption_scale(p, geom, 1.0);
  CHECK(unity.kappa == 0.0);

  const AbsorptionScale scale = calibrate_absorption_scale(p, geom, 0.4);
  CHECK(scale.kappa > 0.0);
  CHECK(std::abs(propagate_cell(p, geom, scale).transmission - 0.4) <= 1e-6);

  // monotone non-increasing in kappa
  double last = 1.0;
  for (double k = 0.0; k <= 2.0 * scale.kappa; k += 0.5 * scale.kappa) {
    const double t = propagate_cell(p, geom, scale_of(k)).transmission;
    CHECK(t <= last + 1e-15);
    CHECK(t > 0.0);
    CHECK(t <= 1.0);
    last = t;
  }

  ModelParams withPi = p;
  withPi.mode(ModeId::PiA).rabi = 1.0;
  CHECK_THROWS_AS(calibrate_absorption_scale(withPi, geom, 0.4), ConfigError);
  CHECK_THROWS_AS(calibrate_absorption_scale(p, geom, 1.5), ConfigError);
}

TEST_CASE("halving the length squares the transparency with feedback off") {
  ModelParams p = lab_params(kTwoPi * 8e3, 0.0);
  p.delta = kTwoPi * 4e4;
  const AbsorptionScale scale = scale_of(60.0);
  CellGeometry full;
  full.repumpStart = full.repumpEnd = 0.0;
  CellGeometry half = full;
  half.length = 0.5 * full.length;
  const double tFull = propagate_cell(p, full, scale, false).transmission;
  const double tHalf = propagate_cell(p, half, scale, false).transmission;
  CHECK(std::abs(tHalf * tHalf - tFull) <= 1e-9);
}
