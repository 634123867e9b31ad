// Copyright 2026 The atomlaser Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Physical parameters and the reduced (adiabatically eliminated) model of a
// Raman outcoupler: the free-atom dispersion omega0(k), the momentum-selective
// coupling Omega0(k) = Omega * phi0(k - k_kick) and the optical mode frequency.

#ifndef ATOMLASER_MODEL_HPP_
#define ATOMLASER_MODEL_HPP_

#include <cmath>
#include <numbers>

#include "atomlaser/common.hpp"
#include "atomlaser/grids.hpp"

namespace atomlaser {

struct PhysicalParams {
  double mass = 1.4e-25;              // kg
  double trap_frequency = 0.25;       // rad/s
  double kick_wavenumber = 1.6e7;     // rad/m, |k23 - k13| (per beam |k_j - k_0| for the OPO)
  double coupling = 90.0;             // rad/s, amplitude Omega of Omega0(k)
  double optical_frequency = 20.0;    // rad/s, omega_a
  double pump_drive = 0.0;            // 1/s, chi * beta (twin-beam source only)
  bool pump_detuning_matched = true;  // omega_p - 2(omega - Delta2) = 2 omega_a
  double pump_mismatch = 0.0;         // rad/s, added to 2 omega_a when not matched

  void validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(mass)) throw DomainError("mass must be positive");
    if (!positive(trap_frequency)) throw DomainError("trap frequency must be positive");
    if (!positive(kick_wavenumber)) throw DomainError("kick wavenumber must be positive");
    if (!(coupling >= 0.0) || !std::isfinite(coupling)) throw DomainError("coupling must be >= 0");
    if (!std::isfinite(optical_frequency)) throw DomainError("optical frequency must be finite");
    if (!(pump_drive >= 0.0) || !std::isfinite(pump_drive)) throw DomainError("pump drive must be >= 0");
    if (!std::isfinite(pump_mismatch)) throw DomainError("pump mismatch must be finite");
  }

  /// Pump frequency measured from twice the atomic rotating frame; the pump
  /// term carries exp(-i * pump_offset() * t).
  double pump_offset() const {
    return 2.0 * optical_frequency + (pump_detuning_matched ? 0.0 : pump_mismatch);
  }
};

/// Single-probe defaults.
inline PhysicalParams default_params() { return PhysicalParams{}; }

/// Twin-beam (OPO) defaults: stronger coupling plus the parametric pump.
inline PhysicalParams default_opo_params() {
  PhysicalParams p;
  p.coupling = 108.0;
  p.pump_drive = 80.0;
  return p;
}

/// sigma with sigma^2 = m omega_t / hbar; |phi0(k)|^2 ~ exp(-k^2 / sigma^2).
inline double condensate_sigma(const PhysicalParams& p) {
  return std::sqrt(p.mass * p.trap_frequency / kHbar);
}

/// RMS momentum width of |phi0|^2, sqrt(m omega_t / 2 hbar).
inline double condensate_momentum_width(const PhysicalParams& p) {
  return std::sqrt(p.mass * p.trap_frequency / (2.0 * kHbar));
}

class ReducedModel {
 public:
  explicit ReducedModel(PhysicalParams params) : params_(params) {
    params_.validate();
    sigma_sq_ = params_.mass * params_.trap_frequency / kHbar;
    norm_ = std::pow(1.0 / (std::numbers::pi * sigma_sq_), 0.25);
    kick_energy_ = kinetic(params_.kick_wavenumber);
  }

  const PhysicalParams& params() const { return params_; }
  double omega_a() const { return params_.optical_frequency; }

  /// hbar k^2 / 2m in rad/s.
  double kinetic(double k) const { return kHbar * k * k / (2.0 * params_.mass); }

  /// Resonance-matched dispersion; omega0(k_kick) == omega_a exactly.
  double omega0(double k) const { return (kinetic(k) - kick_energy_) + params_.optical_frequency; }

  /// omega0(k) - omega_a.
  double detuning(double k) const { return kinetic(k) - kick_energy_; }

  /// Harmonic ground state in momentum space, unit normalised in k.
  double phi0(double k) const { return norm_ * std::exp(-k * k / (2.0 * sigma_sq_)); }

  /// Coupling centred on the kicked momentum k_kick + offset.
  double coupling_at(double k, double centre) const { return params_.coupling * phi0(k - centre); }

  double Omega0(double k) const { return coupling_at(k, params_.kick_wavenumber); }

 private:
  PhysicalParams params_;
  double sigma_sq_ = 0.0;
  double norm_ = 0.0;
  double kick_energy_ = 0.0;
};

/// Condensate wavefunction phi0 sampled on `grid`.
inline MomentumField condensate_phi0(const PhysicalParams& params, const MomentumGrid& grid) {
  const double width = condensate_momentum_width(params);
  if (width / grid.dk() < 8.0) {
    throw ResolutionError("grid spacing " + std::to_string(grid.dk()) +
                          " rad/m resolves the condensate width " + std::to_string(width) +
                          " rad/m with fewer than 8 samples");
  }
  const ReducedModel model(params);
  CVector v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = model.phi0(grid.k(i));
  return {grid, std::move(v)};
}

/// Outcoupling strength for which a quarter Rabi period equals the time a kicked
/// atom needs to leave the condensate:
///   Omega ~ pi hbar k / (4 m sqrt(2 hbar / (m omega_t))).
inline double optimal_omega_estimate(const PhysicalParams& p) {
  p.validate();
  const double width = std::sqrt(2.0 * kHbar / (p.mass * p.trap_frequency));
  return std::numbers::pi * kHbar * p.kick_wavenumber / (4.0 * p.mass * width);
}

}  // namespace atomlaser

#endif  // ATOMLASER_MODEL_HPP_
