#include "cptsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cptsim/constants.hpp"
#include "cptsim/csv.hpp"
#include "cptsim/errors.hpp"

namespace cpt {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

class Doc {
 public:
  explicit Doc(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[' && t.back() == ']') {
        section = trim(t.substr(1, t.size() - 2));
        continue;
      }
      size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      std::string full = section.empty() ? key : section + "." + key;
      if (values_.count(full))
        throw ConfigError("duplicate config key: " + full);
      values_[full] = value;
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    consumed_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_double(key, it->second);
  }

  int get_int(const std::string& key, int fallback) {
    double v = get_double(key, fallback);
    return static_cast<int>(v);
  }

  bool get_bool(const std::string& key, bool fallback) {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key " + key + ": expected boolean, got '" + v + "'");
  }

  std::vector<double> get_list(const std::string& key) {
    consumed_.insert(key);
    auto it = values_.find(key);
    std::vector<double> out;
    if (it == values_.end()) return out;
    std::string item;
    std::istringstream ss(it->second);
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      out.push_back(parse_double(key, item));
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      (void)value;
      if (!consumed_.count(key)) throw ConfigError("unknown config key: " + key);
    }
  }

 private:
  static double parse_double(const std::string& key, const std::string& text) {
    try {
      size_t pos = 0;
      double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": expected number, got '" + text + "'");
    }
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

double angular(double plainHz) { return kTwoPi * plainHz; }

}  // namespace

RunConfig RunConfig::load_string(const std::string& text) {
  Doc doc(text);
  RunConfig cfg;
  cfg.configText = text;
  cfg.configHash = hex64(fnv1a64(text));

  // [model]
  const double gammaNat = angular(doc.get_double("model.gamma_nat_mhz", 5.75) * 1e6);
  const double pressure = doc.get_double("model.pressure_torr", kBufferPressureTorr);
  const double broadening =
      angular(doc.get_double("model.n2_broadening_mhz_per_torr", 17.8) * 1e6);
  cfg.params = default_params();
  cfg.params.gammaExc = doc.has("model.gamma_exc_mhz")
                            ? angular(doc.get_double("model.gamma_exc_mhz", 0.0) * 1e6)
                            : gammaNat + broadening * pressure;
  cfg.params.gammaPop = angular(doc.get_double("model.gamma_pop_hz",
                                               cfg.params.gammaPop / kTwoPi));
  cfg.params.gammaCoh = angular(doc.get_double("model.gamma_coh_hz",
                                               cfg.params.gammaCoh / kTwoPi));
  cfg.params.offResDetuning = angular(
      doc.get_double("model.off_res_detuning_mhz", cfg.params.offResDetuning / kTwoPi / 1e6) *
      1e6);
  cfg.params.density = doc.get_double("model.density_per_cc", kDensityPerCm3) * 1e6;
  cfg.params.mode(ModeId::SigmaA).detuning =
      angular(doc.get_double("model.sigma_a_detuning_khz", 0.0) * 1e3);
  cfg.params.mode(ModeId::SigmaB).detuning =
      angular(doc.get_double("model.sigma_b_detuning_khz", 0.0) * 1e3);
  cfg.params.mode(ModeId::PiA).detuning =
      angular(doc.get_double("model.pi_a_detuning_khz", 0.0) * 1e3);
  cfg.params.mode(ModeId::PiB).detuning =
      angular(doc.get_double("model.pi_b_detuning_khz", 0.0) * 1e3);
  const std::string branchingPath = doc.get_string("model.branching_table", "");
  if (!branchingPath.empty()) cfg.params.branching = load_branching_table(branchingPath);
  cfg.bZmG = doc.get_double("model.b_z_mg", 20.0);

  // [cell]
  cfg.geom.length = doc.get_double("cell.length_mm", 18.0) * 1e-3;
  cfg.geom.repumpStart = doc.get_double("cell.repump_start_mm", 6.0) * 1e-3;
  cfg.geom.repumpEnd = doc.get_double("cell.repump_end_mm", 12.0) * 1e-3;
  cfg.geom.slices = doc.get_int("cell.slices", 48);
  cfg.geom.validate();

  // [scan]
  cfg.grid.points = doc.get_int("scan.delta_points", 201);
  cfg.grid.span = angular(doc.get_double("scan.delta_span_khz", 0.0) * 1e3);
  cfg.grid.center = angular(doc.get_double("scan.delta_center_khz", 0.0) * 1e3);
  cfg.grid.maxWidenRounds = doc.get_int("scan.max_widen_rounds", 4);
  if (doc.has("scan.fmod_center_ghz")) {
    // delta = 2 * (2 pi f_mod) - hyperfine splitting (sidebands at +-f_mod)
    const double fmod = doc.get_double("scan.fmod_center_ghz", 0.0) * 1e9;
    cfg.grid.center = 2.0 * angular(fmod) - kGroundHyperfineSplitting;
  }
  if (cfg.grid.points < 2) throw ConfigError("scan.delta_points must be >= 2");

  // [intensity]
  cfg.map.cptIntensities = doc.get_list("intensity.cpt_uW_cm2");
  cfg.map.repumpIntensities = doc.get_list("intensity.repump_uW_cm2");
  cfg.map.sigmaRabiPerSqrtIntensity =
      doc.get_double("intensity.sigma_rabi_per_sqrt_uW_cm2_rad_s", 0.0);
  cfg.map.piRabiPerSqrtIntensity =
      doc.get_double("intensity.pi_rabi_per_sqrt_uW_cm2_rad_s", 0.0);
  cfg.map.sidebandSplit = doc.get_double("intensity.sideband_split", 0.5);

  // [calibration]
  cfg.targetTransparency = doc.get_double("calibration.target_transparency", 0.40);
  cfg.smallSignalCptIntensity = doc.get_double("calibration.small_signal_cpt_uW_cm2", 10.0);
  cfg.smallSignalDelta = angular(doc.get_double("calibration.small_signal_delta_khz", 50.0) * 1e3);
  cfg.kappaOverride = doc.get_double("calibration.kappa_per_m", -1.0);
  cfg.datasetCsv = doc.get_string("calibration.dataset_csv", "");

  // [run]
  cfg.campaign = doc.get_string("run.campaign", "");
  cfg.outDir = doc.get_string("run.out_dir", "out");
  cfg.jobs = doc.get_int("run.jobs", 1);
  cfg.feedback = doc.get_bool("run.feedback", true);
  cfg.seed = static_cast<unsigned long>(doc.get_double("run.seed", 0.0));

  doc.reject_unknown();

  cfg.params.validate();
  if (cfg.map.cptIntensities.empty())
    throw ConfigError("config: intensity.cpt_uW_cm2 must list at least one intensity");
  cfg.map.validate();
  if (cfg.jobs < 1) throw ConfigError("config: run.jobs must be >= 1");
  return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_string(ss.str());
}

}  // namespace cpt
