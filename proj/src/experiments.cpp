#include "cptsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cptsim/errors.hpp"
#include "cptsim/parallel.hpp"

namespace cpt {

void IntensityMap::validate() const {
  if (cptIntensities.empty()) throw ConfigError("cptIntensities must not be empty");
  for (double v : cptIntensities)
    if (!(v >= 0.0)) throw ConfigError("intensities must be >= 0");
  for (double v : repumpIntensities)
    if (!(v >= 0.0)) throw ConfigError("intensities must be >= 0");
  if (!(sigmaRabiPerSqrtIntensity >= 0.0) || !(piRabiPerSqrtIntensity >= 0.0))
    throw ConfigError("Rabi calibration constants must be >= 0");
  if (!(sidebandSplit >= 0.0 && sidebandSplit <= 1.0))
    throw ConfigError("sidebandSplit must be in [0, 1]");
}

ModelParams with_intensities(const ModelParams& base, const IntensityMap& map,
                             double cptIntensity, double repumpIntensity) {
  ModelParams p = base;
  const double s = map.sidebandSplit;
  p.mode(ModeId::SigmaA).rabi = map.sigmaRabiPerSqrtIntensity * std::sqrt(s * cptIntensity);
  p.mode(ModeId::SigmaB).rabi =
      map.sigmaRabiPerSqrtIntensity * std::sqrt((1.0 - s) * cptIntensity);
  p.mode(ModeId::PiA).rabi = map.piRabiPerSqrtIntensity * std::sqrt(s * repumpIntensity);
  p.mode(ModeId::PiB).rabi =
      map.piRabiPerSqrtIntensity * std::sqrt((1.0 - s) * repumpIntensity);
  return p;
}

double cpt_linewidth_estimate(const ModelParams& params) {
  double sq = 0.0;
  for (const auto& m : params.modes) sq += m.rabi * m.rabi;
  return 2.0 * params.gammaCoh + sq / params.gammaExc;
}

std::vector<double> DeltaGridSpec::make(double expectedFwhm) const {
  if (points < 2) throw ConfigError("delta grid needs at least 2 points");
  const double full = span > 0.0 ? span : 20.0 * expectedFwhm;
  if (!(full > 0.0)) throw ConfigError("delta grid span must be positive");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = center - 0.5 * full + full * i / (points - 1);
  return grid;
}

CellOutcome evaluate_cell(const ModelParams& base, const CellGeometry& geom,
                          const AbsorptionScale& scale, const IntensityMap& map,
                          double cptIntensity, double repumpIntensity,
                          const DeltaGridSpec& grid, bool feedback) {
  CellOutcome out;
  out.cptIntensity = cptIntensity;
  out.repumpIntensity = repumpIntensity;
  try {
    const ModelParams params = with_intensities(base, map, cptIntensity, repumpIntensity);
    DeltaGridSpec g = grid;
    const double est = cpt_linewidth_estimate(params);
    const bool adaptive = grid.span <= 0.0;
    if (adaptive) g.span = 20.0 * est;
    for (int round = 0;; ++round) {
      const Spectrum spectrum =
          scan_spectrum(params, geom, scale, g.make(est), feedback, 1);
      out.fit = fit_voigt(spectrum);
      if (adaptive && round < grid.maxWidenRounds && out.fit.fwhm > g.span / 3.0) {
        g.span *= 2.0;  // Voigt fits need wings
        continue;
      }
      break;
    }
    out.ok = out.fit.converged;
    if (!out.ok) out.error = "fit did not converge";
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

SweepResult run_repump_sweep(const IntensityMap& map, const ModelParams& base,
                             const CellGeometry& geom, const AbsorptionScale& scale,
                             const DeltaGridSpec& grid, bool feedback, int jobs) {
  map.validate();
  if (map.repumpIntensities.empty())
    throw ConfigError("run_repump_sweep: repumpIntensities must not be empty");
  SweepResult result;
  result.nCpt = map.cptIntensities.size();
  result.nRepump = map.repumpIntensities.size();
  result.cells.resize(result.nCpt * result.nRepump);
  parallel_for(static_cast<int>(result.cells.size()), jobs, [&](int i) {
    const size_t iCpt = i / result.nRepump;
    const size_t iRp = i % result.nRepump;
    result.cells[i] = evaluate_cell(base, geom, scale, map, map.cptIntensities[iCpt],
                                    map.repumpIntensities[iRp], grid, feedback);
  });
  return result;
}

SweepResult run_no_repump(const IntensityMap& map, const ModelParams& base,
                          const CellGeometry& geom, const AbsorptionScale& scale,
                          const DeltaGridSpec& grid, bool feedback, int jobs) {
  IntensityMap noRepump = map;
  noRepump.repumpIntensities = {0.0};
  return run_repump_sweep(noRepump, base, geom, scale, grid, feedback, jobs);
}

namespace {

// Golden-section minimum of f over [lo, hi].
template <typename F>
double golden_section(F&& f, double lo, double hi, int evals) {
  constexpr double invPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invPhi * (b - a);
  double x2 = a + invPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < evals; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invPhi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

CalibrationResult calibrate_repump_rabi(const std::vector<CalibrationPoint>& dataset,
                                        const ModelParams& base, const CellGeometry& geom,
                                        const AbsorptionScale& scale, const IntensityMap& map,
                                        const CalibrationOptions& opts) {
  std::set<double> cptSet, rpSet;
  for (const auto& pt : dataset) {
    cptSet.insert(pt.cptIntensity);
    rpSet.insert(pt.repumpIntensity);
  }
  if (cptSet.size() < 2 || rpSet.size() < 4)
    throw ConfigError(
        "calibrate_repump_rabi: need >= 2 CPT intensities x >= 4 repump intensities");

  auto objective = [&](double piConst, double offRes) {
    ModelParams params = base;
    params.offResDetuning = offRes;
    IntensityMap m = map;
    m.piRabiPerSqrtIntensity = piConst;
    double sum = 0.0;
    for (const auto& pt : dataset) {
      const CellOutcome cell = evaluate_cell(params, geom, scale, m, pt.cptIntensity,
                                             pt.repumpIntensity, opts.grid, opts.feedback);
      if (!cell.ok) {
        sum += 1e3;  // failed cells dominate the objective
        continue;
      }
      const double d = cell.fit.contrast - pt.contrast;
      sum += d * d;
    }
    return sum;
  };

  CalibrationResult result;
  double piConst = map.piRabiPerSqrtIntensity;
  double offRes = base.offResDetuning;
  double best = objective(piConst, offRes);
  bool improvedEver = false;

  int outer = 0;
  for (; outer < opts.maxOuter; ++outer) {
    double move = 0.0;

    // Line searches run in log space; both scalars are positive scales.
    for (int coord = 0; coord < 2; ++coord) {
      const double current = coord == 0 ? piConst : offRes;
      const double lo = std::log(current / opts.bracketFactor);
      const double hi = std::log(current * opts.bracketFactor);
      auto f = [&](double u) {
        const double v = std::exp(u);
        return coord == 0 ? objective(v, offRes) : objective(piConst, v);
      };
      const double u = golden_section(f, lo, hi, opts.lineSearchEvals);
      const double candidate = std::exp(u);
      const double value = coord == 0 ? objective(candidate, offRes)
                                      : objective(piConst, candidate);
      if (value < best * (1.0 - 1e-12)) {
        best = value;
        improvedEver = true;
        move = std::max(move, std::abs(candidate - current) / current);
        (coord == 0 ? piConst : offRes) = candidate;
      }
    }

    if (move < opts.relTol) {
      ++outer;
      break;
    }
  }

  result.piRabiPerSqrtIntensity = piConst;
  result.offResDetuning = offRes;
  result.residual = best;
  result.iterations = outer;
  result.converged = improvedEver || best <= 1e-12 * dataset.size();
  return result;
}

OverlapPrediction predict_full_overlap(const ModelParams& base, const CellGeometry& geom,
                                       const AbsorptionScale& scale, const IntensityMap& map,
                                       const DeltaGridSpec& grid, bool feedback, int jobs) {
  CellGeometry full = geom;
  full.repumpStart = 0.0;
  full.repumpEnd = full.length;

  OverlapPrediction pred;
  pred.sweep = run_repump_sweep(map, base, full, scale, grid, feedback, jobs);

  const SweepResult noRepump = run_no_repump(map, base, full, scale, grid, feedback, jobs);
  for (const auto& cell : noRepump.cells) {
    if (cell.ok && cell.fit.contrast > pred.noRepumpBestContrast) {
      pred.noRepumpBestContrast = cell.fit.contrast;
      pred.noRepumpBestCptIntensity = cell.cptIntensity;
    }
  }

  double bestRatio = 0.0;
  for (const auto& cell : pred.sweep.cells) {
    if (!cell.ok) continue;
    if (cell.fit.contrast > pred.bestContrast) {
      pred.bestContrast = cell.fit.contrast;
      pred.bestCptIntensity = cell.cptIntensity;
      pred.bestRepumpIntensity = cell.repumpIntensity;
      pred.bestFwhm = cell.fit.fwhm;
    }
    if (cell.fit.fwhm > 0.0 && cell.fit.contrast / cell.fit.fwhm > bestRatio) {
      bestRatio = cell.fit.contrast / cell.fit.fwhm;
      pred.bestRatioContrast = cell.fit.contrast;
      pred.bestRatioCptIntensity = cell.cptIntensity;
      pred.bestRatioRepumpIntensity = cell.repumpIntensity;
    }
  }
  pred.improvementFactor = pred.noRepumpBestContrast > 0.0
                               ? pred.bestContrast / pred.noRepumpBestContrast
                               : 0.0;
  return pred;
}

}  // namespace cpt
