#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string>

namespace cpt {

inline constexpr int kLevels = 7;
inline constexpr int kDim = kLevels * kLevels;

using Complex = std::complex<double>;
using Mat7 = Eigen::Matrix<Complex, kLevels, kLevels>;
using DensityMatrix = Mat7;

// Effective level scheme.  Ground manifold: Clock1, Clock2, Trap.
// Excited manifold: CptExcited, PiExcited, OffRes1, OffRes2.
enum class Level : int {
  Clock1 = 0,      // |1> = F=1, mF=0
  Clock2 = 1,      // |2> = F=2, mF=0
  CptExcited = 2,  // |3> = F'=2, mF=1
  Trap = 3,        // |4> = lumped mF!=0 ground
  PiExcited = 4,   // |5> = lumped mF!=0 excited
  OffRes1 = 5,     // |6> = F'=1, mF=0
  OffRes2 = 6,     // |7> = F'=2, mF=0
};

inline constexpr int idx(Level l) { return static_cast<int>(l); }

inline constexpr std::array<Level, 3> kGroundLevels = {Level::Clock1, Level::Clock2,
                                                       Level::Trap};
inline constexpr std::array<Level, 4> kExcitedLevels = {Level::CptExcited, Level::PiExcited,
                                                        Level::OffRes1, Level::OffRes2};

constexpr bool is_ground(Level l) {
  return l == Level::Clock1 || l == Level::Clock2 || l == Level::Trap;
}
constexpr bool is_excited(Level l) { return !is_ground(l); }

// Index of a level within its manifold (used by the branching table).
int ground_slot(Level g);
int excited_slot(Level e);

enum class ModeId : int { SigmaA = 0, SigmaB = 1, PiA = 2, PiB = 3 };

// One optical mode.  `ground`/`excited` is the resonantly driven pair;
// the pi modes additionally carry a fixed off-resonant coupling
// (PiA: Clock2-OffRes1, PiB: Clock1-OffRes2) constructed by
// build_hamiltonian.  `detuning` is the one-photon detuning of the
// resonant drive.
struct FieldMode {
  ModeId id = ModeId::SigmaA;
  double rabi = 0.0;      // rad/s, >= 0; 0 means inert
  double detuning = 0.0;  // rad/s
  Level ground = Level::Clock2;
  Level excited = Level::CptExcited;
};

FieldMode make_mode(ModeId id, double rabi = 0.0, double detuning = 0.0);

// Spontaneous branching probabilities b[e][g], rows in excited_slot
// order (CptExcited, PiExcited, OffRes1, OffRes2), columns in
// ground_slot order (Clock1, Clock2, Trap).
struct BranchingTable {
  std::array<std::array<double, 3>, 4> b{};

  double operator()(Level e, Level g) const { return b[excited_slot(e)][ground_slot(g)]; }
  double& operator()(Level e, Level g) { return b[excited_slot(e)][ground_slot(g)]; }

  // Rows sum to 1 within 1e-12, all entries in [0,1], forbidden pi
  // channels (OffRes1->Clock1, OffRes2->Clock2) are zero.
  void validate() const;
};

// Effective branching obtained by lumping the 16-level D1 decay
// strengths; see data/branching_d1.txt and scripts/gen_branching_table.py.
BranchingTable default_branching_table();

// Reads a fixture in the data/branching_d1.txt format.
BranchingTable load_branching_table(const std::string& path);

struct ModelParams {
  std::array<FieldMode, 4> modes = {
      make_mode(ModeId::SigmaA), make_mode(ModeId::SigmaB),
      make_mode(ModeId::PiA), make_mode(ModeId::PiB)};
  double delta = 0.0;     // two-photon (Raman) detuning, rad/s
  double gammaExc;        // total excited decay rate Gamma', rad/s
  BranchingTable branching;
  double gammaPop;        // ground population relaxation gamma_1, rad/s
  double gammaCoh;        // extra clock-coherence dephasing gamma_2, rad/s
  std::array<double, 3> thermalWeights = {1.0 / 8.0, 1.0 / 8.0, 6.0 / 8.0};
  double density;         // atoms per m^3
  double offResDetuning;  // effective |Delta_off| of the off-resonant pi couplings, rad/s

  FieldMode& mode(ModeId m) { return modes[static_cast<int>(m)]; }
  const FieldMode& mode(ModeId m) const { return modes[static_cast<int>(m)]; }

  void validate() const;
};

// Paper-regime defaults with all fields off.
ModelParams default_params();

// Rotating-frame RWA Hamiltonian.  Hermitian by construction: the upper
// triangle is filled and mirrored.  Off-diagonal structure is exactly
// the mode coupling graph; delta sits on the Clock1 diagonal, the
// off-resonant pi levels sit at -Delta_off (OffRes1) and +Delta_off
// (OffRes2).
Mat7 build_hamiltonian(const ModelParams& params);

// Unpolarized thermal ground state: populations (1/8, 1/8, 6/8) on
// (Clock1, Clock2, Trap).
DensityMatrix thermal_state();

}  // namespace cpt
