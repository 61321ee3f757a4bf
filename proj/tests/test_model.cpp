#include <doctest.h>

#include <random>

#include "cptsim/constants.hpp"
#include "cptsim/errors.hpp"
#include "cptsim/model.hpp"

using namespace cpt;

TEST_CASE("thermal state populations") {
  const DensityMatrix rho = thermal_state();
  CHECK(rho(idx(Level::Clock1), idx(Level::Clock1)).real() == doctest::Approx(1.0 / 8.0));
  CHECK(rho(idx(Level::Clock2), idx(Level::Clock2)).real() == doctest::Approx(1.0 / 8.0));
  CHECK(rho(idx(Level::Trap), idx(Level::Trap)).real() == doctest::Approx(6.0 / 8.0));
  CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-15);
  // diagonal non-negative implies positive semidefinite here
  for (int i = 0; i < kLevels; ++i) CHECK(rho(i, i).real() >= 0.0);
  for (int i = 0; i < kLevels; ++i)
    for (int j = 0; j < kLevels; ++j)
      if (i != j) CHECK(rho(i, j) == Complex(0.0));
}

TEST_CASE("empty hamiltonian") {
  ModelParams p = default_params();
  p.offResDetuning = 0.0;
  const Mat7 h = build_hamiltonian(p);
  CHECK(h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single sigma coupling appears on the Clock1-CptExcited edge") {
  ModelParams p = default_params();
  p.offResDetuning = 0.0;
  const double omega = kTwoPi * 1e5;
  p.mode(ModeId::SigmaB).rabi = omega;
  const Mat7 h = build_hamiltonian(p);
  for (int r = 0; r < kLevels; ++r) {
    for (int c = 0; c < kLevels; ++c) {
      const bool edge = (r == idx(Level::Clock1) && c == idx(Level::CptExcited)) ||
                        (r == idx(Level::CptExcited) && c == idx(Level::Clock1));
      if (edge)
        CHECK(h(r, c) == Complex(0.5 * omega));
      else
        CHECK(h(r, c) == Complex(0.0));
    }
  }
}

TEST_CASE("delta moves only the Clock1 diagonal") {
  ModelParams p = default_params();
  p.mode(ModeId::SigmaA).rabi = kTwoPi * 2e5;
  p.mode(ModeId::SigmaB).rabi = kTwoPi * 1e5;
  p.mode(ModeId::PiA).rabi = kTwoPi * 3e5;
  const Mat7 base = build_hamiltonian(p);
  p.delta = kTwoPi * 1000.0;
  const Mat7 shifted = build_hamiltonian(p);
  const Mat7 diff = shifted - base;
  CHECK(diff(idx(Level::Clock1), idx(Level::Clock1)).real() ==
        doctest::Approx(kTwoPi * 1000.0).epsilon(1e-14));
  for (int r = 0; r < kLevels; ++r)
    for (int c = 0; c < kLevels; ++c)
      if (!(r == idx(Level::Clock1) && c == idx(Level::Clock1)))
        CHECK(std::abs(diff(r, c)) == 0.0);
}

TEST_CASE("hamiltonian is exactly hermitian with the expected zero structure") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    ModelParams p = default_params();
    for (auto& m : p.modes) {
      m.rabi = kTwoPi * 1e6 * u(rng);
      m.detuning = kTwoPi * 1e5 * (u(rng) - 0.5);
    }
    p.delta = kTwoPi * 1e4 * (u(rng) - 0.5);
    const Mat7 h = build_hamiltonian(p);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);

    auto allowed = [](int r, int c) {
      auto is = [&](Level a, Level b) {
        return (r == idx(a) && c == idx(b)) || (r == idx(b) && c == idx(a));
      };
      return is(Level::Clock1, Level::CptExcited) || is(Level::Clock2, Level::CptExcited) ||
             is(Level::Trap, Level::PiExcited) || is(Level::Clock1, Level::OffRes2) ||
             is(Level::Clock2, Level::OffRes1);
    };
    for (int r = 0; r < kLevels; ++r)
      for (int c = 0; c < kLevels; ++c)
        if (r != c && !allowed(r, c)) CHECK(std::abs(h(r, c)) == 0.0);
  }
}

TEST_CASE("doubling every rabi doubles the off-diagonal and fixes the diagonal") {
  ModelParams p = default_params();
  p.mode(ModeId::SigmaA).rabi = kTwoPi * 1.1e5;
  p.mode(ModeId::SigmaB).rabi = kTwoPi * 0.9e5;
  p.mode(ModeId::PiA).rabi = kTwoPi * 2.2e5;
  p.mode(ModeId::PiB).rabi = kTwoPi * 1.7e5;
  p.delta = kTwoPi * 500.0;
  const Mat7 h1 = build_hamiltonian(p);
  for (auto& m : p.modes) m.rabi *= 2.0;
  const Mat7 h2 = build_hamiltonian(p);
  for (int r = 0; r < kLevels; ++r) {
    for (int c = 0; c < kLevels; ++c) {
      if (r == c)
        CHECK(h2(r, c) == h1(r, c));
      else
        CHECK(std::abs(h2(r, c) - 2.0 * h1(r, c)) <= 1e-12 * std::abs(h1(r, c)));
    }
  }
}

TEST_CASE("default branching table is row stochastic with forbidden zeros") {
  const BranchingTable t = default_branching_table();
  t.validate();
  for (const auto& row : t.b) {
    double sum = 0.0;
    for (double v : row) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  CHECK(t(Level::OffRes1, Level::Clock1) == 0.0);
  CHECK(t(Level::OffRes2, Level::Clock2) == 0.0);
}

TEST_CASE("default branching matches the committed fixture") {
  const BranchingTable fixture =
      load_branching_table(std::string(CPTSIM_SOURCE_DIR) + "/data/branching_d1.txt");
  const BranchingTable def = default_branching_table();
  for (int e = 0; e < 4; ++e)
    for (int g = 0; g < 3; ++g)
      CHECK(def.b[e][g] == doctest::Approx(fixture.b[e][g]).epsilon(1e-6));
}

TEST_CASE("parameter validation rejects bad input") {
  ModelParams p = default_params();
  p.mode(ModeId::SigmaA).rabi = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = default_params();
  p.gammaPop = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = default_params();
  p.branching(Level::OffRes1, Level::Clock1) = 0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = default_params();
  p.thermalWeights = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
