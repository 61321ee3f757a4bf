#pragma once

#include <string>
#include <vector>

#include "cptsim/experiments.hpp"
#include "cptsim/model.hpp"
#include "cptsim/spectroscopy.hpp"

namespace cpt {

// Flat sectioned key-value config with explicit unit suffixes in every
// key (_hz/_khz/_mhz/_ghz are plain frequencies converted to angular
// rad/s on load, _mm to metres, _per_cc to per m^3; intensities stay in
// uW/cm^2).  Unknown keys are rejected.
struct RunConfig {
  ModelParams params;    // field Rabi frequencies left at 0; set via intensities
  CellGeometry geom;
  IntensityMap map;
  DeltaGridSpec grid;

  std::string campaign;
  std::string outDir = "out";
  int jobs = 1;
  bool feedback = true;
  unsigned long seed = 0;

  double targetTransparency = 0.40;
  double smallSignalCptIntensity = 10.0;  // uW/cm^2
  double smallSignalDelta;                // rad/s
  double kappaOverride = -1.0;            // >= 0 skips the bisection
  std::string datasetCsv;

  double bZmG = 20.0;  // recorded for provenance; no dynamics in the 7-level model

  std::string configText;  // raw document
  std::string configHash;  // fnv-1a over configText

  static RunConfig load_file(const std::string& path);
  static RunConfig load_string(const std::string& text);
};

}  // namespace cpt
