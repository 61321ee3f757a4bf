#pragma once

#include <string>
#include <vector>

#include "cptsim/lineshape.hpp"
#include "cptsim/spectroscopy.hpp"

namespace cpt {

// Bridge from reported beam intensities to model Rabi frequencies:
// Rabi = const * sqrt(intensity), with separate constants for the
// sigma (CPT) and pi (repump) beams.  Power splits between the two
// sidebands of each beam as (sidebandSplit, 1 - sidebandSplit).
struct IntensityMap {
  std::vector<double> cptIntensities;     // uW/cm^2
  std::vector<double> repumpIntensities;  // uW/cm^2
  double sigmaRabiPerSqrtIntensity = 0.0;  // rad/s per sqrt(uW/cm^2)
  double piRabiPerSqrtIntensity = 0.0;
  double sidebandSplit = 0.5;

  void validate() const;
};

// Applies beam intensities to a parameter set.
ModelParams with_intensities(const ModelParams& base, const IntensityMap& map,
                             double cptIntensity, double repumpIntensity);

// Heuristic CPT linewidth (power-broadened) used to size scan grids.
double cpt_linewidth_estimate(const ModelParams& params);

struct DeltaGridSpec {
  int points = 201;
  double span = 0.0;    // full span, rad/s; 0 selects auto (20x expected FWHM)
  double center = 0.0;  // rad/s
  int maxWidenRounds = 4;

  std::vector<double> make(double expectedFwhm) const;
};

struct CellOutcome {
  double cptIntensity = 0.0;
  double repumpIntensity = 0.0;
  bool ok = false;
  std::string error;  // failure marker when !ok
  FitResult fit;
};

struct SweepResult {
  size_t nCpt = 0;
  size_t nRepump = 0;
  std::vector<CellOutcome> cells;  // row-major [iCpt * nRepump + iRepump]

  const CellOutcome& at(size_t iCpt, size_t iRepump) const {
    return cells[iCpt * nRepump + iRepump];
  }
};

// Scans one (CPT, repump) operating point and fits the resonance.  The
// grid auto-widens while the fitted FWHM exceeds a third of the span.
CellOutcome evaluate_cell(const ModelParams& base, const CellGeometry& geom,
                          const AbsorptionScale& scale, const IntensityMap& map,
                          double cptIntensity, double repumpIntensity,
                          const DeltaGridSpec& grid, bool feedback = true);

// Full contrast/FWHM grid over map.cptIntensities x map.repumpIntensities.
// Per-cell failures are recorded, never fatal.  jobs > 1 distributes
// cells over a worker pool with results keyed by grid index.
SweepResult run_repump_sweep(const IntensityMap& map, const ModelParams& base,
                             const CellGeometry& geom, const AbsorptionScale& scale,
                             const DeltaGridSpec& grid, bool feedback = true, int jobs = 1);

// Same campaign with the repump beams off (single column).
SweepResult run_no_repump(const IntensityMap& map, const ModelParams& base,
                          const CellGeometry& geom, const AbsorptionScale& scale,
                          const DeltaGridSpec& grid, bool feedback = true, int jobs = 1);

struct CalibrationPoint {
  double cptIntensity;
  double repumpIntensity;
  double contrast;
};

struct CalibrationOptions {
  int maxOuter = 100;
  double relTol = 1e-3;       // stop when both coordinates move less than this
  double bracketFactor = 2.5; // golden-section bracket around the current value
  int lineSearchEvals = 24;
  DeltaGridSpec grid{61, 0.0, 0.0, 4};
  bool feedback = true;
  int jobs = 1;
};

struct CalibrationResult {
  double piRabiPerSqrtIntensity = 0.0;
  double offResDetuning = 0.0;
  double residual = 0.0;  // final summed squared contrast error
  bool converged = false;
  int iterations = 0;
};

// Fits the two effective repump scalars (pi Rabi constant and
// off-resonant detuning) to a measured contrast dataset by coordinate
// descent with golden-section line searches.
CalibrationResult calibrate_repump_rabi(const std::vector<CalibrationPoint>& dataset,
                                        const ModelParams& base, const CellGeometry& geom,
                                        const AbsorptionScale& scale, const IntensityMap& map,
                                        const CalibrationOptions& opts = {});

struct OverlapPrediction {
  double bestContrast = 0.0;
  double bestCptIntensity = 0.0;
  double bestRepumpIntensity = 0.0;
  double bestFwhm = 0.0;
  double noRepumpBestContrast = 0.0;
  double noRepumpBestCptIntensity = 0.0;
  double improvementFactor = 0.0;
  // Alternative figure of merit: max contrast / FWHM.
  double bestRatioContrast = 0.0;
  double bestRatioCptIntensity = 0.0;
  double bestRatioRepumpIntensity = 0.0;
  SweepResult sweep;
};

// Optimum contrast with the repump window covering the whole cell,
// compared against the no-repump optimum over the same CPT intensities.
OverlapPrediction predict_full_overlap(const ModelParams& base, const CellGeometry& geom,
                                       const AbsorptionScale& scale, const IntensityMap& map,
                                       const DeltaGridSpec& grid, bool feedback = true,
                                       int jobs = 1);

}  // namespace cpt
