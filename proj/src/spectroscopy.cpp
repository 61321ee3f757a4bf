#include "cptsim/spectroscopy.hpp"

#include <cmath>
#include <sstream>

#include "cptsim/errors.hpp"
#include "cptsim/parallel.hpp"

namespace cpt {

void CellGeometry::validate() const {
  if (!(length > 0.0)) throw ConfigError("cell length must be > 0");
  if (!(0.0 <= repumpStart && repumpStart <= repumpEnd && repumpEnd <= length))
    throw ConfigError("require 0 <= repumpStart <= repumpEnd <= length");
  if (slices < 3) throw ConfigError("need at least 3 slices");
}

std::array<double, 2> absorption_coefficients(const DensityMatrix& rho,
                                              const ModelParams& params,
                                              const AbsorptionScale& scale) {
  const double eps = inert_rabi_threshold(params);
  std::array<double, 2> alpha{0.0, 0.0};
  const ModeId sigmaModes[2] = {ModeId::SigmaA, ModeId::SigmaB};
  for (int k = 0; k < 2; ++k) {
    const FieldMode& m = params.mode(sigmaModes[k]);
    if (m.rabi < eps) continue;
    const double response = 2.0 * std::imag(rho(idx(m.ground), idx(m.excited))) / m.rabi;
    alpha[k] = scale.kappa * params.gammaExc * response;
  }
  return alpha;
}

PropagationResult propagate_cell(const ModelParams& params, const CellGeometry& geom,
                                 const AbsorptionScale& scale, bool feedback) {
  geom.validate();
  params.validate();
  if (!(scale.kappa >= 0.0)) throw ConfigError("kappa must be >= 0");

  // Decay/mixing/dephasing channels do not depend on the fields, so the
  // dissipative superoperator is shared by all slices.
  const Superoperator dissipator = build_dissipator(assemble_channels(params));

  const double dz = geom.length / geom.slices;
  const double entryRabiA = params.mode(ModeId::SigmaA).rabi;
  const double entryRabiB = params.mode(ModeId::SigmaB).rabi;
  double rabiA = entryRabiA;
  double rabiB = entryRabiB;
  double intensityA = entryRabiA * entryRabiA;  // arbitrary units; ratios only
  double intensityB = entryRabiB * entryRabiB;
  const double intensityIn = intensityA + intensityB;

  PropagationResult result;
  result.slices.reserve(geom.slices);

  ModelParams local = params;
  for (int j = 0; j < geom.slices; ++j) {
    const double z0 = j * dz;
    const double mid = (j + 0.5) * dz;
    const bool repumped = mid >= geom.repumpStart && mid < geom.repumpEnd;

    local.mode(ModeId::SigmaA).rabi = feedback ? rabiA : entryRabiA;
    local.mode(ModeId::SigmaB).rabi = feedback ? rabiB : entryRabiB;
    local.mode(ModeId::PiA).rabi = repumped ? params.mode(ModeId::PiA).rabi : 0.0;
    local.mode(ModeId::PiB).rabi = repumped ? params.mode(ModeId::PiB).rabi : 0.0;

    Superoperator liouville = dissipator;
    add_coherent(liouville, build_hamiltonian(local));

    DensityMatrix rho;
    try {
      rho = steady_state(liouville);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " (slice " << j << ", z = " << mid << " m)";
      if (dynamic_cast<const SingularSystem*>(&e)) throw SingularSystem(msg.str());
      throw NonPhysicalState(msg.str());
    }

    const auto alpha = absorption_coefficients(rho, local, scale);
    result.slices.push_back({z0, z0 + dz, repumped, alpha,
                             {local.mode(ModeId::SigmaA).rabi, local.mode(ModeId::SigmaB).rabi}});

    intensityA *= std::exp(-alpha[0] * dz);
    intensityB *= std::exp(-alpha[1] * dz);
    rabiA *= std::exp(-0.5 * alpha[0] * dz);
    rabiB *= std::exp(-0.5 * alpha[1] * dz);
  }

  result.transmission =
      intensityIn > 0.0 ? (intensityA + intensityB) / intensityIn : 1.0;
  return result;
}

Spectrum scan_spectrum(const ModelParams& params, const CellGeometry& geom,
                       const AbsorptionScale& scale, const std::vector<double>& deltaGrid,
                       bool feedback, int jobs) {
  if (deltaGrid.empty()) throw ConfigError("delta grid must not be empty");
  for (size_t i = 1; i < deltaGrid.size(); ++i)
    if (!(deltaGrid[i] > deltaGrid[i - 1]))
      throw ConfigError("delta grid must be strictly increasing");

  Spectrum spectrum;
  spectrum.points.resize(deltaGrid.size());
  parallel_for(static_cast<int>(deltaGrid.size()), jobs, [&](int i) {
    ModelParams local = params;
    local.delta = deltaGrid[i];
    PropagationResult prop;
    try {
      prop = propagate_cell(local, geom, scale, feedback);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " (delta = " << deltaGrid[i] << " rad/s)";
      if (dynamic_cast<const SingularSystem*>(&e)) throw SingularSystem(msg.str());
      if (dynamic_cast<const NonPhysicalState*>(&e)) throw NonPhysicalState(msg.str());
      throw Error(msg.str());
    }
    spectrum.points[i] = {deltaGrid[i], prop.transmission, prop.slices.front().alpha};
  });
  return spectrum;
}

AbsorptionScale calibrate_absorption_scale(const ModelParams& params, const CellGeometry& geom,
                                           double targetTransparency) {
  if (!(targetTransparency > 0.0 && targetTransparency <= 1.0))
    throw ConfigError("targetTransparency must be in (0, 1]");
  if (params.mode(ModeId::PiA).rabi != 0.0 || params.mode(ModeId::PiB).rabi != 0.0)
    throw ConfigError("calibrate_absorption_scale requires pi modes off");

  AbsorptionScale scale;
  scale.targetTransparency = targetTransparency;
  scale.density = params.density;
  if (targetTransparency == 1.0) return scale;  // kappa = 0

  auto transmission = [&](double kappa) {
    AbsorptionScale s = scale;
    s.kappa = kappa;
    return propagate_cell(params, geom, s).transmission;
  };

  double lo = 0.0;                  // T(lo) = 1 >= target
  double hi = 1.0 / geom.length;
  int guard = 0;
  while (transmission(hi) > targetTransparency) {
    hi *= 2.0;
    if (++guard > 200)
      throw ConfigError("calibrate_absorption_scale: target transparency unreachable");
  }

  // Transmission is monotone non-increasing in kappa.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double t = transmission(mid);
    if (std::abs(t - targetTransparency) <= 1e-6) {
      scale.kappa = mid;
      return scale;
    }
    (t > targetTransparency ? lo : hi) = mid;
  }
  scale.kappa = 0.5 * (lo + hi);
  return scale;
}

}  // namespace cpt
