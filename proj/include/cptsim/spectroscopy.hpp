#pragma once

#include <array>
#include <vector>

#include "cptsim/liouvillian.hpp"
#include "cptsim/model.hpp"

namespace cpt {

struct CellGeometry {
  double length = 0.018;       // m
  double repumpStart = 0.006;  // m
  double repumpEnd = 0.012;    // m
  int slices = 48;

  void validate() const;
};

// Overall absorption scale kappa (1/m per unit of the dimensionless
// per-transition response), calibrated against the measured small-signal
// transparency; physical prefactors (dipole moments, density) are
// absorbed here.
struct AbsorptionScale {
  double kappa = 0.0;
  double targetTransparency = 1.0;  // calibration metadata
  double density = 0.0;
};

struct SpectrumPoint {
  double delta;                         // rad/s
  double transmission;                  // (0, 1]
  std::array<double, 2> perModeAlpha;   // SigmaA, SigmaB at cell entry, 1/m
};

struct Spectrum {
  std::vector<SpectrumPoint> points;
};

// Inert-mode threshold: sigma modes weaker than this contribute no
// absorption (avoids 0/0 in the linear-response ratio).
inline double inert_rabi_threshold(const ModelParams& p) { return 1e-6 * p.gammaExc; }

// Linear-response absorption per sigma mode:
//   alpha_k = kappa * Gamma' * 2 Im rho(g, e) / Omega_k
// (in-quadrature driven coherence over drive), 0 for inert modes.
std::array<double, 2> absorption_coefficients(const DensityMatrix& rho,
                                              const ModelParams& params,
                                              const AbsorptionScale& scale);

struct SliceRecord {
  double z0, z1;
  bool repumped;
  std::array<double, 2> alpha;   // 1/m, per sigma mode
  std::array<double, 2> rabiIn;  // sigma Rabi entering the slice (attenuated when feedback on)
};

struct PropagationResult {
  double transmission;
  std::vector<SliceRecord> slices;
};

// Slices the cell, solves the local steady state per slice (pi modes on
// only inside [repumpStart, repumpEnd)), attenuates each sigma mode by
// Beer-Lambert across the slice.  With feedback on (default) the local
// Rabi frequencies track the attenuated intensities; with feedback off
// every slice is solved at the entry Rabi values (analytic-oracle mode).
PropagationResult propagate_cell(const ModelParams& params, const CellGeometry& geom,
                                 const AbsorptionScale& scale, bool feedback = true);

// Transmission vs two-photon detuning over a strictly increasing grid.
// Points are independent; jobs > 1 evaluates them in a worker pool with
// order-preserving assembly.
Spectrum scan_spectrum(const ModelParams& params, const CellGeometry& geom,
                       const AbsorptionScale& scale, const std::vector<double>& deltaGrid,
                       bool feedback = true, int jobs = 1);

// Bisects kappa until the cell transmission matches targetTransparency
// within 1e-6.  Caller supplies small-signal conditions: pi modes off,
// delta far from the CPT resonance.
AbsorptionScale calibrate_absorption_scale(const ModelParams& params, const CellGeometry& geom,
                                           double targetTransparency);

}  // namespace cpt
