#include <doctest.h>

#include <cmath>
#include <random>

#include "cptsim/constants.hpp"
#include "cptsim/errors.hpp"
#include "cptsim/liouvillian.hpp"

using namespace cpt;

namespace {

StateVec vec_of(const DensityMatrix& rho) { return Eigen::Map<const StateVec>(rho.data()); }

StateVec trace_row() {
  StateVec v = StateVec::Zero();
  for (int i = 0; i < kLevels; ++i) v(i * kLevels + i) = Complex(1.0);
  return v;
}

// Random parameter set with mild stiffness (rate ratios ~1e3) so the
// fixed-step RK4 oracle stays affordable; the steady state depends only
// on rate ratios, so these exercise the same code paths as the full-
// stiffness regime.
ModelParams random_params(std::mt19937& rng, bool withPi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelParams p = default_params();
  p.gammaExc = kTwoPi * (3e4 + 5e4 * u(rng));
  p.gammaPop = kTwoPi * (300.0 + 600.0 * u(rng));
  p.gammaCoh = kTwoPi * (200.0 + 800.0 * u(rng));
  p.offResDetuning = kTwoPi * (5e4 + 1.5e5 * u(rng));
  p.delta = kTwoPi * 2e3 * (u(rng) - 0.5);
  p.mode(ModeId::SigmaA).rabi = kTwoPi * 2e4 * u(rng);
  p.mode(ModeId::SigmaB).rabi = kTwoPi * 2e4 * u(rng);
  if (withPi) {
    p.mode(ModeId::PiA).rabi = kTwoPi * 1.5e4 * u(rng);
    p.mode(ModeId::PiB).rabi = kTwoPi * 1.5e4 * u(rng);
  }
  return p;
}

DensityMatrix random_hermitian(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  DensityMatrix a;
  for (int r = 0; r < kLevels; ++r)
    for (int c = 0; c < kLevels; ++c) a(r, c) = Complex(n(rng), n(rng));
  return 0.5 * (a + a.adjoint()).eval();
}

}  // namespace

TEST_CASE("assemble_channels layout") {
  const ModelParams p = default_params();
  const auto channels = assemble_channels(p);

  int decay = 0, mix = 0, dephase = 0;
  double outOfCpt = 0.0;
  bool forbidden = false;
  for (const auto& ch : channels) {
    switch (ch.kind) {
      case ChannelKind::Decay:
        ++decay;
        if (ch.from == Level::CptExcited) outOfCpt += ch.rate;
        if (ch.from == Level::OffRes1 && ch.to == Level::Clock1) forbidden = true;
        if (ch.from == Level::OffRes2 && ch.to == Level::Clock2) forbidden = true;
        break;
      case ChannelKind::GroundMix:
        ++mix;
        break;
      case ChannelKind::Dephase:
        ++dephase;
        break;
    }
  }
  CHECK(decay == 10);  // 3 + 3 + 2 + 2 allowed branches
  CHECK(mix == 6);
  CHECK(dephase == 2);
  CHECK(!forbidden);
  CHECK(std::abs(outOfCpt - p.gammaExc) <= 1e-12 * p.gammaExc);
}

TEST_CASE("zero hamiltonian and channels give the zero superoperator") {
  const Superoperator l = build_liouvillian(Mat7::Zero(), {});
  CHECK(l.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trace preservation and hermiticity preservation on random inputs") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p = random_params(rng, trial % 2 == 0);
    const Superoperator l = build_liouvillian(build_hamiltonian(p), assemble_channels(p));
    const double norm = l.cwiseAbs().maxCoeff();

    // vec(I)^T L = 0: the identity row-vector is a left null vector.
    const Eigen::Matrix<Complex, 1, kDim> left = trace_row().transpose() * l;
    CHECK(left.cwiseAbs().maxCoeff() <= 1e-10 * norm);

    // L maps Hermitian to Hermitian.
    const DensityMatrix rho = random_hermitian(rng);
    const StateVec out = l * vec_of(rho);
    const DensityMatrix drho = Eigen::Map<const DensityMatrix>(out.data());
    CHECK((drho - drho.adjoint()).cwiseAbs().maxCoeff() <=
          1e-10 * norm * rho.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("two-level decay toy matches the closed form") {
  // Restrict to Clock2 <-> CptExcited with a single decay channel; other
  // levels stay empty, pinned by drain channels for uniqueness.
  const double gamma = kTwoPi * 1e4;
  std::vector<LindbladChannel> channels = {
      {ChannelKind::Decay, Level::CptExcited, Level::Clock2, gamma}};
  const Superoperator l = build_liouvillian(Mat7::Zero(), channels);

  DensityMatrix rho0 = DensityMatrix::Zero();
  rho0(idx(Level::CptExcited), idx(Level::CptExcited)) = 1.0;

  const double t = 3.0 / gamma;
  const double dt = 0.005 / gamma;
  const DensityMatrix rhoT = evolve(rho0, l, t, dt);
  const double expected = std::exp(-gamma * t);
  CHECK(std::abs(rhoT(idx(Level::CptExcited), idx(Level::CptExcited)).real() - expected) <=
        1e-8);
  CHECK(std::abs(rhoT(idx(Level::Clock2), idx(Level::Clock2)).real() - (1.0 - expected)) <=
        1e-8);
}

TEST_CASE("projector dephasing decays the clock coherence at gamma2") {
  const double gamma2 = kTwoPi * 250.0;
  std::vector<LindbladChannel> channels = {
      {ChannelKind::Dephase, Level::Clock1, Level::Clock1, gamma2},
      {ChannelKind::Dephase, Level::Clock2, Level::Clock2, gamma2}};
  const Superoperator l = build_liouvillian(Mat7::Zero(), channels);

  DensityMatrix rho0 = DensityMatrix::Zero();
  rho0(idx(Level::Clock1), idx(Level::Clock1)) = 0.5;
  rho0(idx(Level::Clock2), idx(Level::Clock2)) = 0.5;
  rho0(idx(Level::Clock1), idx(Level::Clock2)) = 0.5;
  rho0(idx(Level::Clock2), idx(Level::Clock1)) = 0.5;

  const double t = 2.0 / gamma2;
  const DensityMatrix rhoT = evolve(rho0, l, t, 0.002 / gamma2);
  const double expected = 0.5 * std::exp(-gamma2 * t);
  CHECK(std::abs(rhoT(idx(Level::Clock1), idx(Level::Clock2)).real() - expected) <= 1e-10);
  // populations untouched by pure dephasing
  CHECK(rhoT(idx(Level::Clock1), idx(Level::Clock1)).real() == doctest::Approx(0.5));
}

TEST_CASE("ground mixing alone dephases rho12 at gamma1 (2 - w1 - w2) / 2") {
  const ModelParams p = default_params();
  std::vector<LindbladChannel> channels;
  for (const auto& ch : assemble_channels(p))
    if (ch.kind == ChannelKind::GroundMix) channels.push_back(ch);
  const Superoperator l = build_liouvillian(Mat7::Zero(), channels);

  DensityMatrix rho0 = DensityMatrix::Zero();
  rho0(idx(Level::Clock1), idx(Level::Clock1)) = 0.5;
  rho0(idx(Level::Clock2), idx(Level::Clock2)) = 0.5;
  rho0(idx(Level::Clock1), idx(Level::Clock2)) = 0.5;
  rho0(idx(Level::Clock2), idx(Level::Clock1)) = 0.5;

  const double rate = p.gammaPop * (2.0 - 1.0 / 8.0 - 1.0 / 8.0) / 2.0;
  const double t = 1.0 / rate;
  const DensityMatrix rhoT = evolve(rho0, l, t, 0.002 / rate);
  CHECK(rhoT(idx(Level::Clock1), idx(Level::Clock2)).real() ==
        doctest::Approx(0.5 * std::exp(-rate * t)).epsilon(1e-8));
}

TEST_CASE("zero-field steady state is the thermal state") {
  const ModelParams p = default_params();
  const Superoperator l = build_liouvillian(build_hamiltonian(p), assemble_channels(p));
  const DensityMatrix rho = steady_state(l);
  CHECK((rho - thermal_state()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("lambda sub-model pumps into a perfect dark state") {
  // Clock1/Clock2/CptExcited only, gamma2 = 0, delta = 0, equal Rabi;
  // unused levels are pinned by drain channels so the kernel stays
  // one-dimensional.
  ModelParams p = default_params();
  p.gammaExc = kTwoPi * 1e6;
  const double omega = kTwoPi * 5e4;
  p.mode(ModeId::SigmaA).rabi = omega;
  p.mode(ModeId::SigmaB).rabi = omega;

  std::vector<LindbladChannel> channels = {
      {ChannelKind::Decay, Level::CptExcited, Level::Clock1, 0.5 * p.gammaExc},
      {ChannelKind::Decay, Level::CptExcited, Level::Clock2, 0.5 * p.gammaExc},
      {ChannelKind::Decay, Level::PiExcited, Level::Clock1, p.gammaExc},
      {ChannelKind::Decay, Level::OffRes1, Level::Clock2, p.gammaExc},
      {ChannelKind::Decay, Level::OffRes2, Level::Clock1, p.gammaExc},
      {ChannelKind::GroundMix, Level::Trap, Level::Clock1, p.gammaPop}};
  const Superoperator l = build_liouvillian(build_hamiltonian(p), channels);
  const DensityMatrix rho = steady_state(l);

  CHECK(rho(idx(Level::CptExcited), idx(Level::CptExcited)).real() <= 1e-10);
  CHECK(std::abs(std::imag(rho(idx(Level::Clock1), idx(Level::CptExcited)))) <= 1e-10);
  CHECK(std::abs(std::imag(rho(idx(Level::Clock2), idx(Level::CptExcited)))) <= 1e-10);
  // the dark state of equal Rabi: (|1> - |2>)/sqrt(2) up to phase
  CHECK(rho(idx(Level::Clock1), idx(Level::Clock1)).real() == doctest::Approx(0.5));
  CHECK(rho(idx(Level::Clock1), idx(Level::Clock2)).real() == doctest::Approx(-0.5));
}

TEST_CASE("steady state equals the long-time integration oracle") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 4; ++trial) {
    const ModelParams p = random_params(rng, trial % 2 == 0);
    const Superoperator l = build_liouvillian(build_hamiltonian(p), assemble_channels(p));
    const DensityMatrix direct = steady_state(l);

    const double slowest = std::min({p.gammaPop, p.gammaExc, std::max(p.gammaCoh, p.gammaPop)});
    const double t = 50.0 / slowest;
    const double dt = 0.5 / l.cwiseAbs().rowwise().sum().real().maxCoeff();
    const DensityMatrix integrated = evolve(thermal_state(), l, t, dt);
    CHECK((direct - integrated).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("decoupled system raises SingularSystem") {
  std::vector<LindbladChannel> channels = {
      {ChannelKind::Decay, Level::CptExcited, Level::Clock2, kTwoPi * 1e4}};
  const Superoperator l = build_liouvillian(Mat7::Zero(), channels);
  CHECK_THROWS_AS(steady_state(l), SingularSystem);
}

TEST_CASE("evolve identities") {
  const DensityMatrix rho0 = thermal_state();
  CHECK((evolve(rho0, Superoperator::Zero(), 0.0, 1.0) - rho0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((evolve(rho0, Superoperator::Zero(), 3.7, 0.1) - rho0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unstable step raises StepTooLarge") {
  const double gamma = kTwoPi * 1e4;
  std::vector<LindbladChannel> channels = {
      {ChannelKind::Decay, Level::CptExcited, Level::Clock2, gamma},
      {ChannelKind::GroundMix, Level::Clock2, Level::Clock1, gamma},
      {ChannelKind::GroundMix, Level::Clock1, Level::Clock2, gamma}};
  DensityMatrix rho0 = DensityMatrix::Zero();
  rho0(idx(Level::CptExcited), idx(Level::CptExcited)) = 1.0;
  const Superoperator l = build_liouvillian(Mat7::Zero(), channels);
  CHECK_THROWS_AS(evolve(rho0, l, 3000.0 / gamma, 300.0 / gamma), StepTooLarge);
}

TEST_CASE("fixed point residual and uniqueness across random sets") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams p = random_params(rng, true);
    const Superoperator l = build_liouvillian(build_hamiltonian(p), assemble_channels(p));
    const DensityMatrix rho = steady_state(l);
    const StateVec residual = l * vec_of(rho);
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + l.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("validate_state diagnostics") {
  const auto good = validate_state(thermal_state());
  CHECK(good.ok());
  CHECK(good.traceError <= 1e-15);
  CHECK(good.hermError == 0.0);
  CHECK(good.minEigenvalue == doctest::Approx(0.0).epsilon(1e-15));

  DensityMatrix bad = thermal_state();
  bad(0, 0) += 0.1;
  const auto diag = validate_state(bad);
  CHECK(!diag.traceOk);
  CHECK(diag.traceError == doctest::Approx(0.1));
}
