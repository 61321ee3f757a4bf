// Command-line front end: loads a config, runs one campaign, writes CSV
// and SVG outputs plus a run manifest.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cptsim/config.hpp"
#include "cptsim/constants.hpp"
#include "cptsim/csv.hpp"
#include "cptsim/errors.hpp"
#include "cptsim/experiments.hpp"
#include "cptsim/lineshape.hpp"
#include "cptsim/liouvillian.hpp"
#include "cptsim/svg.hpp"

namespace fs = std::filesystem;
using namespace cpt;

namespace {

const char* kVersion = "cptsim 0.1.0";

const std::vector<std::string> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                           "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::vector<std::string> base_comments(const RunConfig& cfg, const AbsorptionScale& scale) {
  std::vector<std::string> c;
  c.push_back(std::string(kVersion));
  c.push_back("config_hash=" + cfg.configHash);
  c.push_back("kappa_per_m=" + format_g17(scale.kappa));
  std::istringstream in(cfg.configText);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    c.push_back("cfg: " + line);
  }
  return c;
}

void write_manifest(const RunConfig& cfg, const AbsorptionScale& scale,
                    const std::vector<std::string>& outputs) {
  std::ostringstream m;
  m << kVersion << "\n";
  m << "campaign = " << cfg.campaign << "\n";
  m << "config_hash = " << cfg.configHash << "\n";
  m << "kappa_per_m = " << format_g17(scale.kappa) << "\n";
  m << "jobs = " << cfg.jobs << "\n";
  m << "feedback = " << (cfg.feedback ? "true" : "false") << "\n";
  m << "outputs =";
  for (const auto& o : outputs) m << ' ' << o;
  m << "\n";
  m << "--- config ---\n" << cfg.configText;
  write_text_file(join_path(cfg.outDir, "run_manifest.txt"), m.str());
}

AbsorptionScale resolve_scale(const RunConfig& cfg) {
  if (cfg.kappaOverride >= 0.0) {
    AbsorptionScale s;
    s.kappa = cfg.kappaOverride;
    s.targetTransparency = cfg.targetTransparency;
    s.density = cfg.params.density;
    return s;
  }
  ModelParams ss = with_intensities(cfg.params, cfg.map, cfg.smallSignalCptIntensity, 0.0);
  ss.delta = cfg.smallSignalDelta;
  return calibrate_absorption_scale(ss, cfg.geom, cfg.targetTransparency);
}

double first_repump(const RunConfig& cfg) {
  return cfg.map.repumpIntensities.empty() ? 0.0 : cfg.map.repumpIntensities.front();
}

int sweep_exit_code(const SweepResult& sweep) {
  size_t ok = 0;
  for (const auto& cell : sweep.cells) ok += cell.ok ? 1 : 0;
  const double fraction = sweep.cells.empty() ? 1.0 : double(ok) / sweep.cells.size();
  return fraction >= 0.9 ? 0 : 4;
}

int cmd_steady_state(const RunConfig& cfg, const AbsorptionScale& scale) {
  ModelParams params =
      with_intensities(cfg.params, cfg.map, cfg.map.cptIntensities.front(), first_repump(cfg));
  params.delta = cfg.grid.center;
  const auto liouville = build_liouvillian(build_hamiltonian(params), assemble_channels(params));
  const DensityMatrix rho = steady_state(liouville);
  const auto diag = validate_state(rho);
  const auto alpha = absorption_coefficients(rho, params, scale);

  std::ostringstream out;
  for (const auto& c : base_comments(cfg, scale)) out << "# " << c << "\n";
  out << "quantity,value\n";
  const char* names[kLevels] = {"pop_clock1", "pop_clock2", "pop_cpt_excited", "pop_trap",
                                "pop_pi_excited", "pop_offres1", "pop_offres2"};
  for (int i = 0; i < kLevels; ++i)
    out << names[i] << ',' << format_g17(rho(i, i).real()) << "\n";
  out << "abs_clock_coherence,"
      << format_g17(std::abs(rho(idx(Level::Clock1), idx(Level::Clock2)))) << "\n";
  out << "alpha_sigma_a_per_m," << format_g17(alpha[0]) << "\n";
  out << "alpha_sigma_b_per_m," << format_g17(alpha[1]) << "\n";
  out << "trace_error," << format_g17(diag.traceError) << "\n";
  out << "herm_error," << format_g17(diag.hermError) << "\n";
  out << "min_eigenvalue," << format_g17(diag.minEigenvalue) << "\n";
  write_text_file(join_path(cfg.outDir, "state.csv"), out.str());
  write_manifest(cfg, scale, {"state.csv"});
  return 0;
}

int cmd_spectrum(const RunConfig& cfg, const AbsorptionScale& scale) {
  ModelParams params =
      with_intensities(cfg.params, cfg.map, cfg.map.cptIntensities.front(), first_repump(cfg));
  DeltaGridSpec grid = cfg.grid;
  if (grid.span <= 0.0) grid.span = 20.0 * cpt_linewidth_estimate(params);
  const auto deltas = grid.make(cpt_linewidth_estimate(params));
  const Spectrum spectrum = scan_spectrum(params, cfg.geom, scale, deltas, cfg.feedback, cfg.jobs);
  const FitResult fit = fit_voigt(spectrum);

  auto comments = base_comments(cfg, scale);
  comments.push_back("cpt_intensity_uW_cm2=" + format_g17(cfg.map.cptIntensities.front()));
  comments.push_back("repump_intensity_uW_cm2=" + format_g17(first_repump(cfg)));
  comments.push_back("sigma_a_rabi_rad_s=" + format_g17(params.mode(ModeId::SigmaA).rabi));
  comments.push_back("sigma_b_rabi_rad_s=" + format_g17(params.mode(ModeId::SigmaB).rabi));
  comments.push_back("pi_a_rabi_rad_s=" + format_g17(params.mode(ModeId::PiA).rabi));
  comments.push_back("pi_b_rabi_rad_s=" + format_g17(params.mode(ModeId::PiB).rabi));
  write_spectrum_csv(join_path(cfg.outDir, "spectrum.csv"), spectrum, comments);
  write_fit_csv(join_path(cfg.outDir, "fit.csv"), fit, comments);

  SvgPlot plot;
  plot.title = "CPT spectrum";
  plot.xlabel = "two-photon detuning (kHz)";
  plot.ylabel = "transmission";
  std::vector<double> xs, ys, yf;
  for (const auto& pt : spectrum.points) {
    xs.push_back(pt.delta / kTwoPi / 1e3);
    ys.push_back(pt.transmission);
    yf.push_back(voigt(pt.delta, fit.params));
  }
  plot.add(xs, ys, kPalette[0], "model", true);
  plot.add(xs, yf, kPalette[1], "Voigt fit");
  plot.write(join_path(cfg.outDir, "spectrum.svg"));

  write_manifest(cfg, scale, {"spectrum.csv", "fit.csv", "spectrum.svg"});
  std::cout << "fit: contrast = " << fit.contrast
            << ", fwhm = " << fit.fwhm / kTwoPi << " Hz, converged = " << fit.converged
            << "\n";
  return 0;
}

void plot_sweep(const RunConfig& cfg, const SweepResult& sweep, bool contrastPanel,
                const std::string& path) {
  SvgPlot plot;
  plot.title = contrastPanel ? "CPT contrast vs repump intensity" : "CPT FWHM vs repump intensity";
  plot.xlabel = "repump intensity (uW/cm^2)";
  plot.ylabel = contrastPanel ? "contrast" : "FWHM (kHz)";
  for (size_t i = 0; i < sweep.nCpt; ++i) {
    std::vector<double> xs, ys;
    for (size_t j = 0; j < sweep.nRepump; ++j) {
      const auto& cell = sweep.at(i, j);
      if (!cell.ok) continue;
      xs.push_back(cell.repumpIntensity);
      ys.push_back(contrastPanel ? cell.fit.contrast : cell.fit.fwhm / kTwoPi / 1e3);
    }
    std::ostringstream label;
    label << format_g17(cfg.map.cptIntensities[i]) << " uW/cm^2";
    plot.add(xs, ys, kPalette[i % kPalette.size()], label.str(), true);
  }
  plot.write(path);
}

int cmd_sweep_repump(const RunConfig& cfg, const AbsorptionScale& scale) {
  const SweepResult sweep = run_repump_sweep(cfg.map, cfg.params, cfg.geom, scale, cfg.grid,
                                             cfg.feedback, cfg.jobs);
  write_sweep_csv(join_path(cfg.outDir, "sweep.csv"), sweep, base_comments(cfg, scale));
  plot_sweep(cfg, sweep, true, join_path(cfg.outDir, "contrast_vs_repump.svg"));
  plot_sweep(cfg, sweep, false, join_path(cfg.outDir, "fwhm_vs_repump.svg"));
  write_manifest(cfg, scale, {"sweep.csv", "contrast_vs_repump.svg", "fwhm_vs_repump.svg"});
  return sweep_exit_code(sweep);
}

int cmd_sweep_cpt(const RunConfig& cfg, const AbsorptionScale& scale) {
  const SweepResult noRepump =
      run_no_repump(cfg.map, cfg.params, cfg.geom, scale, cfg.grid, cfg.feedback, cfg.jobs);
  write_sweep_csv(join_path(cfg.outDir, "sweep_cpt.csv"), noRepump, base_comments(cfg, scale));

  bool haveRepump = false;
  for (double r : cfg.map.repumpIntensities) haveRepump |= r > 0.0;

  SweepResult repumpSweep;
  std::vector<CellOutcome> bestPerCpt;
  if (haveRepump) {
    repumpSweep = run_repump_sweep(cfg.map, cfg.params, cfg.geom, scale, cfg.grid, cfg.feedback,
                                   cfg.jobs);
    for (size_t i = 0; i < repumpSweep.nCpt; ++i) {
      CellOutcome best;
      for (size_t j = 0; j < repumpSweep.nRepump; ++j) {
        const auto& cell = repumpSweep.at(i, j);
        if (cell.ok && (!best.ok || cell.fit.contrast > best.fit.contrast)) best = cell;
      }
      best.cptIntensity = cfg.map.cptIntensities[i];
      bestPerCpt.push_back(best);
    }
    SweepResult bestSweep;
    bestSweep.nCpt = bestPerCpt.size();
    bestSweep.nRepump = 1;
    bestSweep.cells = bestPerCpt;
    write_sweep_csv(join_path(cfg.outDir, "best_repump.csv"), bestSweep,
                    base_comments(cfg, scale));
  }

  for (bool contrastPanel : {true, false}) {
    SvgPlot plot;
    plot.title = contrastPanel ? "CPT contrast vs CPT intensity" : "CPT FWHM vs CPT intensity";
    plot.xlabel = "CPT intensity (uW/cm^2)";
    plot.ylabel = contrastPanel ? "contrast" : "FWHM (kHz)";
    std::vector<double> xs, ys;
    for (const auto& cell : noRepump.cells) {
      if (!cell.ok) continue;
      xs.push_back(cell.cptIntensity);
      ys.push_back(contrastPanel ? cell.fit.contrast : cell.fit.fwhm / kTwoPi / 1e3);
    }
    plot.add(xs, ys, kPalette[0], "no repump", true);
    if (haveRepump) {
      std::vector<double> xb, yb;
      for (const auto& cell : bestPerCpt) {
        if (!cell.ok) continue;
        xb.push_back(cell.cptIntensity);
        yb.push_back(contrastPanel ? cell.fit.contrast : cell.fit.fwhm / kTwoPi / 1e3);
      }
      plot.add(xb, yb, kPalette[1], "best repump", true);
    }
    plot.write(join_path(cfg.outDir,
                         contrastPanel ? "contrast_vs_cpt.svg" : "fwhm_vs_cpt.svg"));
  }

  std::vector<std::string> outputs = {"sweep_cpt.csv", "contrast_vs_cpt.svg",
                                      "fwhm_vs_cpt.svg"};
  if (haveRepump) outputs.push_back("best_repump.csv");
  write_manifest(cfg, scale, outputs);
  return sweep_exit_code(noRepump);
}

int cmd_calibrate(const RunConfig& cfg, const AbsorptionScale& scale) {
  std::ostringstream out;
  for (const auto& c : base_comments(cfg, scale)) out << "# " << c << "\n";
  out << "quantity,value\n";
  out << "kappa_per_m," << format_g17(scale.kappa) << "\n";
  out << "target_transparency," << format_g17(scale.targetTransparency) << "\n";

  if (!cfg.datasetCsv.empty()) {
    const auto dataset = read_calibration_csv(cfg.datasetCsv);
    CalibrationOptions opts;
    opts.jobs = cfg.jobs;
    opts.feedback = cfg.feedback;
    const CalibrationResult fit =
        calibrate_repump_rabi(dataset, cfg.params, cfg.geom, scale, cfg.map, opts);
    out << "pi_rabi_per_sqrt_uW_cm2_rad_s," << format_g17(fit.piRabiPerSqrtIntensity) << "\n";
    out << "off_res_detuning_rad_s," << format_g17(fit.offResDetuning) << "\n";
    out << "residual," << format_g17(fit.residual) << "\n";
    out << "converged," << (fit.converged ? 1 : 0) << "\n";
    out << "iterations," << fit.iterations << "\n";
  }
  write_text_file(join_path(cfg.outDir, "calibration.csv"), out.str());
  write_manifest(cfg, scale, {"calibration.csv"});
  return 0;
}

int cmd_predict_full_overlap(const RunConfig& cfg, const AbsorptionScale& scale) {
  const OverlapPrediction pred = predict_full_overlap(cfg.params, cfg.geom, scale, cfg.map,
                                                      cfg.grid, cfg.feedback, cfg.jobs);
  write_sweep_csv(join_path(cfg.outDir, "full_overlap_sweep.csv"), pred.sweep,
                  base_comments(cfg, scale));

  std::ostringstream out;
  for (const auto& c : base_comments(cfg, scale)) out << "# " << c << "\n";
  out << "optimum_contrast,optimum_cpt_uW_cm2,optimum_repump_uW_cm2,optimum_fwhm_rad_s,"
         "no_repump_optimum_contrast,improvement_factor,"
         "ratio_optimum_contrast,ratio_optimum_cpt_uW_cm2,ratio_optimum_repump_uW_cm2\n";
  out << format_g17(pred.bestContrast) << ',' << format_g17(pred.bestCptIntensity) << ','
      << format_g17(pred.bestRepumpIntensity) << ',' << format_g17(pred.bestFwhm) << ','
      << format_g17(pred.noRepumpBestContrast) << ',' << format_g17(pred.improvementFactor)
      << ',' << format_g17(pred.bestRatioContrast) << ','
      << format_g17(pred.bestRatioCptIntensity) << ','
      << format_g17(pred.bestRatioRepumpIntensity) << "\n";
  write_text_file(join_path(cfg.outDir, "prediction.csv"), out.str());
  write_manifest(cfg, scale, {"prediction.csv", "full_overlap_sweep.csv"});
  std::cout << "full-overlap optimum contrast = " << pred.bestContrast
            << ", improvement factor = " << pred.improvementFactor << "\n";
  return sweep_exit_code(pred.sweep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPT clock resonance simulator"};
  std::string configPath, outDir, campaign;
  int jobs = 0;
  bool noFeedback = false;
  app.add_option("--config", configPath, "config file path")->required();
  app.add_option("--out", outDir, "output directory (overrides run.out_dir)");
  app.add_option("--jobs", jobs, "worker count (overrides run.jobs)");
  app.add_option("--campaign", campaign,
                 "steady-state | spectrum | sweep-repump | sweep-cpt | calibrate | "
                 "predict-full-overlap");
  app.add_flag("--no-feedback", noFeedback, "disable intensity feedback along the cell");
  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = RunConfig::load_file(configPath);
    if (!outDir.empty()) cfg.outDir = outDir;
    if (jobs > 0) cfg.jobs = jobs;
    if (!campaign.empty()) cfg.campaign = campaign;
    if (noFeedback) cfg.feedback = false;
    if (cfg.campaign.empty())
      throw ConfigError("no campaign selected (set run.campaign or pass --campaign)");
    fs::create_directories(cfg.outDir);

    const AbsorptionScale scale = resolve_scale(cfg);

    if (cfg.campaign == "steady-state") return cmd_steady_state(cfg, scale);
    if (cfg.campaign == "spectrum") return cmd_spectrum(cfg, scale);
    if (cfg.campaign == "sweep-repump") return cmd_sweep_repump(cfg, scale);
    if (cfg.campaign == "sweep-cpt") return cmd_sweep_cpt(cfg, scale);
    if (cfg.campaign == "calibrate") return cmd_calibrate(cfg, scale);
    if (cfg.campaign == "predict-full-overlap") return cmd_predict_full_overlap(cfg, scale);
    throw ConfigError("unknown campaign: " + cfg.campaign);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SingularSystem& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const NonPhysicalState& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
