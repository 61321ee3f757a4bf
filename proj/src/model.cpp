#include "cptsim/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "cptsim/constants.hpp"
#include "cptsim/errors.hpp"

namespace cpt {

int ground_slot(Level g) {
  switch (g) {
    case Level::Clock1: return 0;
    case Level::Clock2: return 1;
    case Level::Trap: return 2;
    default: throw Error("ground_slot: not a ground level");
  }
}

int excited_slot(Level e) {
  switch (e) {
    case Level::CptExcited: return 0;
    case Level::PiExcited: return 1;
    case Level::OffRes1: return 2;
    case Level::OffRes2: return 3;
    default: throw Error("excited_slot: not an excited level");
  }
}

FieldMode make_mode(ModeId id, double rabi, double detuning) {
  FieldMode m;
  m.id = id;
  m.rabi = rabi;
  m.detuning = detuning;
  switch (id) {
    case ModeId::SigmaA:
      m.ground = Level::Clock2;
      m.excited = Level::CptExcited;
      break;
    case ModeId::SigmaB:
      m.ground = Level::Clock1;
      m.excited = Level::CptExcited;
      break;
    case ModeId::PiA:
    case ModeId::PiB:
      m.ground = Level::Trap;
      m.excited = Level::PiExcited;
      break;
  }
  return m;
}

void BranchingTable::validate() const {
  for (const auto& row : b) {
    double sum = 0.0;
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("branching entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("branching row does not sum to 1");
  }
  if ((*this)(Level::OffRes1, Level::Clock1) != 0.0)
    throw ConfigError("branching: forbidden OffRes1->Clock1 channel must be 0");
  if ((*this)(Level::OffRes2, Level::Clock2) != 0.0)
    throw ConfigError("branching: forbidden OffRes2->Clock2 channel must be 0");
}

BranchingTable default_branching_table() {
  // Lumped 16-level D1 decay strengths; exact values are small rationals
  // (data/branching_d1.txt).
  BranchingTable t;
  t.b[excited_slot(Level::CptExcited)] = {1.0 / 4.0, 1.0 / 4.0, 1.0 / 2.0};
  t.b[excited_slot(Level::PiExcited)] = {1.0 / 9.0, 1.0 / 9.0, 7.0 / 9.0};
  t.b[excited_slot(Level::OffRes1)] = {0.0, 1.0 / 3.0, 2.0 / 3.0};
  t.b[excited_slot(Level::OffRes2)] = {1.0 / 3.0, 0.0, 2.0 / 3.0};
  return t;
}

BranchingTable load_branching_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open branching table: " + path);
  BranchingTable t;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "level") continue;  // column header
    if (row >= 4) throw ConfigError("branching table has more than 4 rows: " + path);
    for (int c = 0; c < 3; ++c) {
      if (!(ss >> t.b[row][c]))
        throw ConfigError("branching table row '" + tag + "' is short: " + path);
    }
    ++row;
  }
  if (row != 4) throw ConfigError("branching table has fewer than 4 rows: " + path);
  t.validate();
  return t;
}

void ModelParams::validate() const {
  for (const auto& m : modes) {
    if (!(m.rabi >= 0.0)) throw ConfigError("mode rabi must be >= 0");
    if (!std::isfinite(m.rabi) || !std::isfinite(m.detuning))
      throw ConfigError("mode parameters must be finite");
  }
  if (mode(ModeId::SigmaA).id != ModeId::SigmaA || mode(ModeId::SigmaB).id != ModeId::SigmaB ||
      mode(ModeId::PiA).id != ModeId::PiA || mode(ModeId::PiB).id != ModeId::PiB)
    throw ConfigError("modes out of order");
  branching.validate();
  if (!(gammaPop > 0.0)) throw ConfigError("gammaPop must be > 0");
  if (!(gammaExc > 0.0)) throw ConfigError("gammaExc must be > 0");
  if (!(gammaCoh >= 0.0)) throw ConfigError("gammaCoh must be >= 0");
  if (!(density >= 0.0)) throw ConfigError("density must be >= 0");
  double wsum = std::accumulate(thermalWeights.begin(), thermalWeights.end(), 0.0);
  if (std::abs(wsum - 1.0) > 1e-12) throw ConfigError("thermalWeights must sum to 1");
  for (double w : thermalWeights)
    if (!(w >= 0.0)) throw ConfigError("thermalWeights must be >= 0");
}

ModelParams default_params() {
  ModelParams p;
  p.gammaExc = total_excited_linewidth(kBufferPressureTorr);
  p.branching = default_branching_table();
  p.gammaPop = kTwoPi * 200.0;
  p.gammaCoh = kTwoPi * 300.0;
  p.density = kDensityPerM3;
  p.offResDetuning = kExcitedHyperfineSplitting;
  return p;
}

namespace {

struct Edge {
  int a, b;
};

// Coupling edges implied by the fixed mode layout: resonant pairs plus
// the off-resonant pi couplings.
std::vector<Edge> coupling_edges(const ModelParams& p) {
  std::vector<Edge> edges;
  for (const auto& m : p.modes) edges.push_back({idx(m.ground), idx(m.excited)});
  edges.push_back({idx(Level::Clock2), idx(Level::OffRes1)});  // PiA off-resonant
  edges.push_back({idx(Level::Clock1), idx(Level::OffRes2)});  // PiB off-resonant
  return edges;
}

// A time-independent rotating frame exists only if the distinct coupling
// edges form a forest.  Fixed layout satisfies this; guard for
// extensibility.
void assert_acyclic(const std::vector<Edge>& edges) {
  std::array<int, kLevels> parent;
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    auto key = std::minmax(e.a, e.b);
    if (std::find(seen.begin(), seen.end(), std::pair<int, int>(key)) != seen.end())
      continue;  // same physical edge driven by more than one mode
    seen.emplace_back(key);
    int ra = find(e.a), rb = find(e.b);
    if (ra == rb) throw ConfigError("field-coupling graph has a cycle; no static frame");
    parent[ra] = rb;
  }
}

}  // namespace

Mat7 build_hamiltonian(const ModelParams& params) {
  params.validate();
  assert_acyclic(coupling_edges(params));

  const FieldMode& sa = params.mode(ModeId::SigmaA);
  const FieldMode& sb = params.mode(ModeId::SigmaB);
  const FieldMode& pa = params.mode(ModeId::PiA);
  const FieldMode& pb = params.mode(ModeId::PiB);

  Mat7 h = Mat7::Zero();

  // Frame: Clock2 is the phase reference; frequencies propagate along
  // the coupling tree.  Mode detunings are static offsets, delta is the
  // Raman scan variable and lands on Clock1 only.
  h(idx(Level::Clock1), idx(Level::Clock1)) = params.delta + sb.detuning - sa.detuning;
  h(idx(Level::CptExcited), idx(Level::CptExcited)) = -sa.detuning;

  // Both pi sidebands drive Trap-PiExcited; the effective drive uses the
  // Rabi sum and the Rabi-weighted detuning.
  const double piRabi = pa.rabi + pb.rabi;
  const double piDet = piRabi > 0.0
                           ? (pa.rabi * pa.detuning + pb.rabi * pb.detuning) / piRabi
                           : 0.5 * (pa.detuning + pb.detuning);
  h(idx(Level::PiExcited), idx(Level::PiExcited)) = -piDet;

  // Off-resonant pi levels: light is blue of Clock2-OffRes1 and red of
  // Clock1-OffRes2 by the excited hyperfine splitting.
  h(idx(Level::OffRes1), idx(Level::OffRes1)) = -(params.offResDetuning + pa.detuning);
  h(idx(Level::OffRes2), idx(Level::OffRes2)) = params.offResDetuning - pb.detuning;

  auto couple = [&h](Level g, Level e, double rabi) {
    int a = std::min(idx(g), idx(e));
    int b = std::max(idx(g), idx(e));
    h(a, b) += 0.5 * rabi;
  };
  couple(sa.ground, sa.excited, sa.rabi);
  couple(sb.ground, sb.excited, sb.rabi);
  couple(Level::Trap, Level::PiExcited, piRabi);
  couple(Level::Clock2, Level::OffRes1, pa.rabi);
  couple(Level::Clock1, Level::OffRes2, pb.rabi);

  // Mirror the upper triangle; exact Hermiticity by construction.
  for (int r = 0; r < kLevels; ++r)
    for (int c = r + 1; c < kLevels; ++c) h(c, r) = std::conj(h(r, c));
  return h;
}

DensityMatrix thermal_state() {
  DensityMatrix rho = DensityMatrix::Zero();
  rho(idx(Level::Clock1), idx(Level::Clock1)) = 1.0 / 8.0;
  rho(idx(Level::Clock2), idx(Level::Clock2)) = 1.0 / 8.0;
  rho(idx(Level::Trap), idx(Level::Trap)) = 6.0 / 8.0;
  return rho;
}

}  // namespace cpt
