#include "cptsim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cptsim/errors.hpp"

namespace cpt {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

void emit_comments(std::ofstream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << "\n";
}

}  // namespace

void write_spectrum_csv(const std::string& path, const Spectrum& spectrum,
                        const std::vector<std::string>& comments) {
  auto out = open_out(path);
  emit_comments(out, comments);
  out << "delta_rad_s,transmission\n";
  for (const auto& pt : spectrum.points)
    out << format_g17(pt.delta) << ',' << format_g17(pt.transmission) << "\n";
}

void write_fit_csv(const std::string& path, const FitResult& fit,
                   const std::vector<std::string>& comments) {
  auto out = open_out(path);
  emit_comments(out, comments);
  out << "contrast,fwhm_rad_s,center_rad_s,sigma_rad_s,gamma_rad_s,background,residual,"
         "converged\n";
  out << format_g17(fit.contrast) << ',' << format_g17(fit.fwhm) << ','
      << format_g17(fit.params.center) << ',' << format_g17(fit.params.gaussianSigma) << ','
      << format_g17(fit.params.lorentzGamma) << ',' << format_g17(fit.params.background) << ','
      << format_g17(fit.residualNorm) << ',' << (fit.converged ? 1 : 0) << "\n";
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep,
                     const std::vector<std::string>& comments) {
  auto out = open_out(path);
  emit_comments(out, comments);
  out << "cpt_intensity_uW_cm2,repump_intensity_uW_cm2,contrast,fwhm_rad_s,converged\n";
  for (const auto& cell : sweep.cells) {
    out << format_g17(cell.cptIntensity) << ',' << format_g17(cell.repumpIntensity) << ',';
    if (cell.ok)
      out << format_g17(cell.fit.contrast) << ',' << format_g17(cell.fit.fwhm) << ",1\n";
    else
      out << "nan,nan,0\n";
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
}

std::vector<CalibrationPoint> read_calibration_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open calibration dataset: " + path);
  std::vector<CalibrationPoint> points;
  std::string line;
  bool headerSeen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!headerSeen) {  // header row
      headerSeen = true;
      continue;
    }
    std::istringstream ss(line);
    CalibrationPoint pt{};
    char comma;
    if (!(ss >> pt.cptIntensity >> comma >> pt.repumpIntensity >> comma >> pt.contrast))
      throw ConfigError("bad calibration dataset row: " + line);
    points.push_back(pt);
  }
  if (points.empty()) throw ConfigError("calibration dataset is empty: " + path);
  return points;
}

}  // namespace cpt
