#pragma once

#include <vector>

#include "cptsim/model.hpp"

namespace cpt {

// Superoperator acting on column-vectorized density matrices:
// vec stacks columns, so vec index of rho(r, c) is c*7 + r, which is
// exactly Eigen's default column-major layout.  Under this convention
//   vec(A rho B) = (B^T kron A) vec(rho),
// hence the coherent part is -i (I kron H - H^T kron I).
using Superoperator = Eigen::Matrix<Complex, kDim, kDim>;
using StateVec = Eigen::Matrix<Complex, kDim, 1>;

enum class ChannelKind { Decay, Dephase, GroundMix };

// Jump operator |to><from| for Decay/GroundMix, |level><level| for
// Dephase (from == to == level).
struct LindbladChannel {
  ChannelKind kind;
  Level from;
  Level to;
  double rate;  // rad/s, >= 0
};

// Channels for a parameter set:
//  - Decay(e->g) at Gamma' * b[e][g] for every allowed branch;
//  - GroundMix(g->g') at gamma_1 * w[g'] for g != g', whose zero-field
//    fixed point is exactly thermalWeights;
//  - Dephase on Clock1 and Clock2 at gamma_2 each, which adds a total
//    extra decay of exactly gamma_2 to the clock coherence rho_12
//    (gamma_2/2 from each projector).
std::vector<LindbladChannel> assemble_channels(const ModelParams& params);

// L = -i (I kron H - H^T kron I) + sum_k rate_k D[c_k].
Superoperator build_liouvillian(const Mat7& hamiltonian,
                                const std::vector<LindbladChannel>& channels);

// Adds only the coherent commutator part to an existing superoperator
// (dissipative part is independent of the fields, so cell propagation
// rebuilds just this piece per slice).
void add_coherent(Superoperator& target, const Mat7& hamiltonian);

// Dissipative part alone.
Superoperator build_dissipator(const std::vector<LindbladChannel>& channels);

struct SteadyStateOptions {
  // Minimum allowed min/max pivot-magnitude ratio of the LU factor;
  // below this the trace-replaced system counts as rank deficient.
  double pivotRatioMin = 1e-12;
};

// Unique trace-1 kernel element of L, via dense LU on the system with
// the (Clock1,Clock1) row replaced by the trace constraint.  The result
// is projected to exact Hermiticity and validated.
// Throws SingularSystem / NonPhysicalState.
DensityMatrix steady_state(const Superoperator& liouvillian,
                           const SteadyStateOptions& opts = {});

// Classical fixed-step RK4 for dvec(rho)/dt = L vec(rho); returns
// rho(t), re-Hermitized.  Stability requires roughly dt * ||L||_max
// * 7 < 2.8; trace drift beyond 1e-6 raises StepTooLarge.
DensityMatrix evolve(const DensityMatrix& rho0, const Superoperator& liouvillian, double t,
                     double dt);

struct StateDiagnostics {
  double traceError;    // |tr rho - 1|
  double hermError;     // max |rho - rho^dagger|
  double minEigenvalue;
  bool traceOk;    // <= 1e-10
  bool hermOk;     // <= 1e-12
  bool positive;   // min eigenvalue >= -1e-9
  bool ok() const { return traceOk && hermOk && positive; }
};

StateDiagnostics validate_state(const DensityMatrix& rho);

}  // namespace cpt
