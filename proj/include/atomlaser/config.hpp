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

// Scenario configuration: flat `key = value` text with dotted sections.
//
//   scenario = flux-squeezing
//   physics.coupling = 144      # rad/s
//   grid.n = 512
//
// '#' starts a comment. Unknown keys, duplicate keys and malformed values are
// errors that name the offending key.

#ifndef ATOMLASER_CONFIG_HPP_
#define ATOMLASER_CONFIG_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "atomlaser/common.hpp"
#include "atomlaser/csv.hpp"
#include "atomlaser/grids.hpp"
#include "atomlaser/model.hpp"
#include "atomlaser/observables.hpp"
#include "atomlaser/optics.hpp"

namespace atomlaser {

enum class Scenario { single_pulse, variance_vs_time, flux_squeezing, omega_sweep, opo_twin_beams, epr };

inline constexpr Scenario kAllScenarios[] = {Scenario::single_pulse,  Scenario::variance_vs_time,
                                             Scenario::flux_squeezing, Scenario::omega_sweep,
                                             Scenario::opo_twin_beams, Scenario::epr};

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::single_pulse: return "single-pulse";
    case Scenario::variance_vs_time: return "variance-vs-time";
    case Scenario::flux_squeezing: return "flux-squeezing";
    case Scenario::omega_sweep: return "omega-sweep";
    case Scenario::opo_twin_beams: return "opo-twin-beams";
    case Scenario::epr: return "epr";
  }
  return "?";
}

inline Scenario parse_scenario(std::string_view s) {
  for (Scenario sc : kAllScenarios) {
    if (to_string(sc) == s) return sc;
  }
  throw ConfigError("scenario", "unknown scenario '" + std::string(s) +
                                    "' (expected single-pulse, variance-vs-time, flux-squeezing, "
                                    "omega-sweep, opo-twin-beams or epr)");
}

inline bool is_opo(Scenario s) { return s == Scenario::opo_twin_beams || s == Scenario::epr; }

struct OpticsConfig {
  OpticalStateKind kind = OpticalStateKind::coherent;
  double alpha_sq = 1000.0;
  double r = 1.38;
  std::uint64_t n = 1000;

  OpticalStateMoments moments(OpticalStateKind k) const {
    switch (k) {
      case OpticalStateKind::coherent: return coherent(alpha_sq);
      case OpticalStateKind::fock: return fock(n);
      case OpticalStateKind::squeezed: return squeezed(alpha_sq, r);
    }
    return coherent(alpha_sq);
  }
  OpticalStateMoments moments() const { return moments(kind); }
};

struct ScenarioConfig {
  Scenario scenario = Scenario::single_pulse;
  PhysicalParams physics;
  std::size_t grid_n = 512;  // per band for the twin-beam scenarios
  double k_halfwidth = 8e4;
  double dt = 1e-4;
  double t_final = 0.2;
  std::vector<double> snapshot_times;  // overrides output_interval when set
  double output_interval = 1e-3;
  bool interaction_picture = true;
  OpticsConfig optics;
  double x0 = 1.5e-3;
  double epr_inner = 0.8e-3;
  double epr_outer = 1.8e-3;
  CarrierConvention epr_carrier = CarrierConvention::signed_beam;
  double density_extent = 3e-3;  // twin-beam density sampled on [-extent, extent]
  std::size_t density_points = 241;
  std::vector<double> sweep_couplings{18.0, 45.0, 90.0, 144.0, 200.0, 270.0};
  std::string output_directory = "out";
  bool output_f_matrix = false;

  /// Output times: the explicit list, else every output_interval from 0 plus t_final.
  std::vector<double> times() const {
    if (!snapshot_times.empty()) return snapshot_schedule(t_final, snapshot_times);
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor(t_final / output_interval * (1.0 + 1e-12)));
    for (long i = 0; i <= count; ++i) out.push_back(static_cast<double>(i) * output_interval);
    if (t_final - out.back() > 1e-9 * output_interval) out.push_back(t_final);
    return out;
  }

  PropagatorOptions propagator() const {
    PropagatorOptions o;
    o.frame = interaction_picture ? Frame::interaction : Frame::lab;
    return o;
  }

  MomentumGrid single_grid() const { return MomentumGrid(grid_n, physics.kick_wavenumber, k_halfwidth); }
  MomentumLattice opo_lattice() const { return atomlaser::opo_lattice(physics, grid_n, k_halfwidth); }

  EprWindow epr_window() const {
    return {epr_inner, epr_outer, physics.kick_wavenumber, physics.optical_frequency, epr_carrier};
  }

  void validate() const;
};

inline ScenarioConfig default_config(Scenario s) {
  ScenarioConfig c;
  c.scenario = s;
  if (is_opo(s)) {
    c.physics = default_opo_params();
    c.grid_n = 256;
    c.k_halfwidth = 5e4;
    c.output_interval = 5e-3;
  } else if (s == Scenario::single_pulse) {
    c.output_interval = 5e-3;
  }
  return c;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

inline std::uint64_t parse_count(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

inline bool parse_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<double> parse_list(const std::string& key, std::string_view v) {
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    if (item.empty()) throw ConfigError(key, "empty list entry");
    out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_number(v[i]);
  return out;
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

struct KeySpec {
  std::function<void(ScenarioConfig&, const std::string&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <class Member>
KeySpec number_key(Member member) {
  return {[member](ScenarioConfig& c, const std::string& k, std::string_view v) {
            member(c) = parse_double(k, v);
          },
          [member](const ScenarioConfig& c) { return format_number(member(c)); }};
}

template <class Member>
KeySpec bool_key(Member member) {
  return {[member](ScenarioConfig& c, const std::string& k, std::string_view v) { member(c) = parse_bool(k, v); },
          [member](const ScenarioConfig& c) { return format_bool(member(c)); }};
}

template <class Member>
KeySpec count_key(Member member) {
  return {[member](ScenarioConfig& c, const std::string& k, std::string_view v) {
            member(c) = static_cast<std::remove_cvref_t<decltype(member(c))>>(parse_count(k, v));
          },
          [member](const ScenarioConfig& c) {
            return std::to_string(member(c));
          }};
}

template <class Member>
KeySpec list_key(Member member) {
  return {[member](ScenarioConfig& c, const std::string& k, std::string_view v) { member(c) = parse_list(k, v); },
          [member](const ScenarioConfig& c) { return format_list(member(c)); }};
}

inline const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = [] {
    std::map<std::string, KeySpec> t;
    t["scenario"] = {[](ScenarioConfig& c, const std::string&, std::string_view v) { c.scenario = parse_scenario(v); },
                     [](const ScenarioConfig& c) { return std::string(to_string(c.scenario)); }};
    t["physics.mass"] = number_key([](auto& c) -> auto& { return c.physics.mass; });
    t["physics.trap_frequency"] = number_key([](auto& c) -> auto& { return c.physics.trap_frequency; });
    t["physics.kick_wavenumber"] = number_key([](auto& c) -> auto& { return c.physics.kick_wavenumber; });
    t["physics.coupling"] = number_key([](auto& c) -> auto& { return c.physics.coupling; });
    t["physics.optical_frequency"] =
        number_key([](auto& c) -> auto& { return c.physics.optical_frequency; });
    t["physics.pump_drive"] = number_key([](auto& c) -> auto& { return c.physics.pump_drive; });
    t["physics.pump_detuning_matched"] =
        bool_key([](auto& c) -> auto& { return c.physics.pump_detuning_matched; });
    t["physics.pump_mismatch"] = number_key([](auto& c) -> auto& { return c.physics.pump_mismatch; });
    t["grid.n"] = count_key([](auto& c) -> auto& { return c.grid_n; });
    t["grid.k_halfwidth"] = number_key([](auto& c) -> auto& { return c.k_halfwidth; });
    t["integrator.dt"] = number_key([](auto& c) -> auto& { return c.dt; });
    t["integrator.t_final"] = number_key([](auto& c) -> auto& { return c.t_final; });
    t["integrator.snapshot_times"] = list_key([](auto& c) -> auto& { return c.snapshot_times; });
    t["integrator.output_interval"] = number_key([](auto& c) -> auto& { return c.output_interval; });
    t["integrator.interaction_picture"] = bool_key([](auto& c) -> auto& { return c.interaction_picture; });
    t["optics.type"] = {[](ScenarioConfig& c, const std::string& k, std::string_view v) {
                          if (v == "coherent") c.optics.kind = OpticalStateKind::coherent;
                          else if (v == "fock") c.optics.kind = OpticalStateKind::fock;
                          else if (v == "squeezed") c.optics.kind = OpticalStateKind::squeezed;
                          else throw ConfigError(k, "expected coherent, fock or squeezed, got '" + std::string(v) + "'");
                        },
                        [](const ScenarioConfig& c) { return std::string(to_string(c.optics.kind)); }};
    t["optics.alpha_sq"] = number_key([](auto& c) -> auto& { return c.optics.alpha_sq; });
    t["optics.r"] = number_key([](auto& c) -> auto& { return c.optics.r; });
    t["optics.n"] = count_key([](auto& c) -> auto& { return c.optics.n; });
    t["observation.x0"] = number_key([](auto& c) -> auto& { return c.x0; });
    t["observation.epr_inner"] = number_key([](auto& c) -> auto& { return c.epr_inner; });
    t["observation.epr_outer"] = number_key([](auto& c) -> auto& { return c.epr_outer; });
    t["observation.epr_carrier"] = {
        [](ScenarioConfig& c, const std::string& k, std::string_view v) {
          if (v == "signed") c.epr_carrier = CarrierConvention::signed_beam;
          else if (v == "literal") c.epr_carrier = CarrierConvention::literal;
          else throw ConfigError(k, "expected signed or literal, got '" + std::string(v) + "'");
        },
        [](const ScenarioConfig& c) {
          return std::string(c.epr_carrier == CarrierConvention::signed_beam ? "signed" : "literal");
        }};
    t["observation.density_extent"] = number_key([](auto& c) -> auto& { return c.density_extent; });
    t["observation.density_points"] = count_key([](auto& c) -> auto& { return c.density_points; });
    t["sweep.couplings"] = list_key([](auto& c) -> auto& { return c.sweep_couplings; });
    t["output.directory"] = {[](ScenarioConfig& c, const std::string&, std::string_view v) { c.output_directory = v; },
                             [](const ScenarioConfig& c) { return c.output_directory; }};
    t["output.f_matrix"] = bool_key([](auto& c) -> auto& { return c.output_f_matrix; });
    return t;
  }();
  return table;
}

}  // namespace detail

inline void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
  };
  try {
    physics.validate();
  } catch (const DomainError& e) {
    throw ConfigError("physics", e.what());
  }
  require(dt > 0.0, "integrator.dt", "must be > 0");
  require(t_final >= 0.0, "integrator.t_final", "must be >= 0");
  require(output_interval > 0.0, "integrator.output_interval", "must be > 0");
  for (double t : snapshot_times) {
    require(t >= 0.0 && t <= t_final, "integrator.snapshot_times",
            "time " + format_number(t) + " s outside [0, t_final]");
  }
  require(optics.alpha_sq >= 0.0, "optics.alpha_sq", "must be >= 0");
  MomentumLattice lattice(single_grid());
  try {
    lattice = is_opo(scenario) ? opo_lattice() : MomentumLattice(single_grid());
  } catch (const DomainError& e) {
    throw ConfigError("grid", e.what());
  }
  try {
    condensate_phi0(physics, MomentumGrid(grid_n, 0.0, k_halfwidth));
  } catch (const ResolutionError& e) {
    throw ConfigError("grid.n", e.what());
  }
  require(x0 > 0.0 && lattice.window_contains(x0), "observation.x0",
          "must lie in (0, " + format_number(0.5 * lattice.window()) + "] m");
  if (is_opo(scenario)) {
    try {
      epr_window().validate(lattice);
    } catch (const DomainError& e) {
      throw ConfigError("observation.epr_outer", e.what());
    }
    require(density_extent > 0.0 && lattice.window_contains(density_extent), "observation.density_extent",
            "must lie in (0, " + format_number(0.5 * lattice.window()) + "] m");
    require(density_points >= 2, "observation.density_points", "must be >= 2");
  }
  if (scenario == Scenario::omega_sweep) {
    require(!sweep_couplings.empty(), "sweep.couplings", "needs at least one value");
    for (double c : sweep_couplings) require(c >= 0.0, "sweep.couplings", "couplings must be >= 0");
  }
  require(!output_directory.empty(), "output.directory", "must not be empty");
}

/// Resolved configuration as sorted key/value pairs.
inline std::map<std::string, std::string> resolved(const ScenarioConfig& c) {
  std::map<std::string, std::string> out;
  for (const auto& [key, spec] : detail::key_table()) out[key] = spec.get(c);
  return out;
}

inline std::string to_text(const ScenarioConfig& c) {
  std::string out;
  for (const auto& [k, v] : resolved(c)) {
    if (!v.empty()) out += k + " = " + v + "\n";
  }
  return out;
}

inline ScenarioConfig parse_config(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>> entries;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    if (!detail::key_table().contains(key)) {
      throw ConfigError(key, "unknown key (line " + std::to_string(line_no) + ")");
    }
    if (value.empty()) throw ConfigError(key, "empty value (line " + std::to_string(line_no) + ")");
    if (!entries.emplace(key, std::pair{value, line_no}).second) {
      throw ConfigError(key, "set twice (line " + std::to_string(line_no) + ")");
    }
  }
  const auto sc = entries.find("scenario");
  if (sc == entries.end()) throw ConfigError("scenario", "missing");
  ScenarioConfig c = default_config(parse_scenario(sc->second.first));
  for (const auto& [key, entry] : entries) detail::key_table().at(key).set(c, key, entry.first);
  c.validate();
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace atomlaser

#endif  // ATOMLASER_CONFIG_HPP_
