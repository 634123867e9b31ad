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

// Named experiments. run_scenario() produces the output tables in memory;
// write_outputs() serialises them; convergence_check() reruns a scenario with
// dt / 2 and with n * 2 and compares every column.

#ifndef ATOMLASER_SCENARIOS_HPP_
#define ATOMLASER_SCENARIOS_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "atomlaser/config.hpp"
#include "atomlaser/csv.hpp"
#include "atomlaser/observables.hpp"
#include "atomlaser/prop_opo.hpp"
#include "atomlaser/prop_single.hpp"

namespace atomlaser {

struct ScenarioOutput {
  std::vector<Table> tables;
  std::vector<std::string> uncompared;  // tables excluded from convergence checks

  const Table& table(const std::string& name) const {
    for (const auto& t : tables) {
      if (t.name == name) return t;
    }
    throw Error("scenario produced no table '" + name + "'");
  }
};

namespace detail {

inline Table make_table(std::string name, std::vector<std::string> columns, std::vector<std::string> units,
                        std::size_t keys = 1) {
  Table t;
  t.name = std::move(name);
  t.columns = std::move(columns);
  t.units = std::move(units);
  t.key_columns = keys;
  return t;
}

inline void run_single_pulse(const ScenarioConfig& c, ScenarioOutput& out) {
  const ReducedModel model(c.physics);
  const auto sys = SingleProbeSystem::build(model, c.single_grid());
  const OpticalStateMoments state = c.optics.moments();
  Table density = make_table("density.csv", {"t", "x", "density"}, {"s", "m", "1/m"}, 2);
  Table modes = make_table("modes.csv", {"t", "k", "g_abs2", "q_abs2"}, {"s", "rad/m", "m", "m"}, 2);
  Table optical = make_table("optical.csv", {"t", "p_abs2", "N_G", "q_norm"}, {"s", "1", "1", "1"});
  const auto times = c.times();
  SingleModeSolution last = initial_solution(sys.grid);
  evolve_streaming(sys, c.t_final, c.dt, times, c.propagator(), [&](const SingleModeSolution& s) {
    const PositionField rho = density_single(s, state);
    for (std::size_t j = 0; j < rho.grid.size(); ++j) {
      density.add({s.t, rho.grid.x(j), std::real(rho.values[static_cast<Eigen::Index>(j)])});
    }
    for (std::size_t i = 0; i < s.modes(); ++i) {
      modes.add({s.t, s.grid.k(i), std::norm(s.g(i)), std::norm(s.q(i))});
    }
    const auto n = static_cast<Eigen::Index>(s.modes());
    optical.add({s.t, std::norm(s.p()), outcoupled_fraction(s), s.U.row(n).head(n).squaredNorm()});
    if (c.output_f_matrix && s.t == times.back()) last = s;
  });
  out.tables = {std::move(density), std::move(modes), std::move(optical)};
  if (c.output_f_matrix) {
    Table f = make_table("f_abs2.csv", {"k", "kp", "f_abs2"}, {"rad/m", "rad/m", "m^2"}, 2);
    for (std::size_t i = 0; i < last.modes(); ++i) {
      for (std::size_t j = 0; j < last.modes(); ++j) f.add({last.grid.k(i), last.grid.k(j), std::norm(last.f(i, j))});
    }
    out.tables.push_back(std::move(f));
    out.uncompared.push_back("f_abs2.csv");
  }
}

inline void run_variance_vs_time(const ScenarioConfig& c, ScenarioOutput& out) {
  const auto sys = SingleProbeSystem::build(ReducedModel(c.physics), c.single_grid());
  Table t = make_table("nvar.csv", {"t", "N_G", "vN_coherent", "vN_squeezed", "vN_fock"}, {"s", "1", "1", "1", "1"});
  evolve_streaming(sys, c.t_final, c.dt, c.times(), c.propagator(), [&](const SingleModeSolution& s) {
    const double ng = outcoupled_fraction(s);
    t.add({s.t, ng, number_stats(ng, c.optics.moments(OpticalStateKind::coherent)).v,
           number_stats(ng, c.optics.moments(OpticalStateKind::squeezed)).v,
           number_stats(ng, c.optics.moments(OpticalStateKind::fock)).v});
  });
  out.tables = {std::move(t)};
}

inline void run_flux_squeezing(const ScenarioConfig& c, ScenarioOutput& out) {
  const ReducedModel model(c.physics);
  const auto sys = SingleProbeSystem::build(model, c.single_grid());
  const OpticalStateMoments state = c.optics.moments();
  Table t = make_table("flux.csv", {"t", "flux", "flux_variance", "vJ", "J_g", "cross"},
                       {"s", "1/s", "1/s^2", "1", "1/s", "1/s^2"});
  evolve_streaming(sys, c.t_final, c.dt, c.times(), c.propagator(), [&](const SingleModeSolution& s) {
    const FluxNoise noise = flux_noise(s, model, c.x0);
    t.add({s.t, noise.j_g * state.mean_n, flux_variance_single(noise, state).total(), v_of_J(noise), noise.j_g,
           noise.cross});
  });
  out.tables = {std::move(t)};
}

/// Minimum over the output times of v(J) at x0, with the time it occurs.
struct SweepPoint {
  double omega = 0.0;
  std::optional<double> min_vJ;
  std::optional<double> t_min;
};

inline SweepPoint sweep_point(const ScenarioConfig& c, double omega) {
  PhysicalParams p = c.physics;
  p.coupling = omega;
  const ReducedModel model(p);
  const auto sys = SingleProbeSystem::build(model, c.single_grid());
  SweepPoint out{omega, std::nullopt, std::nullopt};
  evolve_streaming(sys, c.t_final, c.dt, c.times(), c.propagator(), [&](const SingleModeSolution& s) {
    const auto v = v_of_J(s, model, c.x0);
    if (v && (!out.min_vJ || *v < *out.min_vJ)) {
      out.min_vJ = v;
      out.t_min = s.t;
    }
  });
  return out;
}

inline void run_omega_sweep(const ScenarioConfig& c, ScenarioOutput& out) {
  Table t = make_table("sweep.csv", {"omega", "min_vJ", "t_min"}, {"rad/s", "1", "s"});
  std::vector<double> omegas = c.sweep_couplings;
  std::sort(omegas.begin(), omegas.end());
  for (double w : omegas) {
    const SweepPoint p = sweep_point(c, w);
    t.add({w, p.min_vJ, p.t_min});
  }
  out.tables = {std::move(t)};
}

inline std::vector<double> density_positions(const ScenarioConfig& c) {
  std::vector<double> xs(c.density_points);
  const double step = 2.0 * c.density_extent / static_cast<double>(c.density_points - 1);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -c.density_extent + static_cast<double>(i) * step;
  return xs;
}

inline void run_opo(const ScenarioConfig& c, ScenarioOutput& out) {
  const ReducedModel model(c.physics);
  const auto sys = OpoSystem::build(model, c.opo_lattice());
  const double mass = c.physics.mass;
  const std::vector<double> xs = density_positions(c);
  const double points[] = {c.x0, -c.x0};
  const bool epr = c.scenario == Scenario::epr;
  Table density = make_table("opo_density.csv", {"t", "x", "density"}, {"s", "m", "1/m"}, 2);
  Table flux = make_table("twin_flux.csv",
                          {"t", "flux_plus", "flux_minus", "flux_variance", "diff_variance", "baseline", "ratio",
                           "signed_ratio"},
                          {"s", "1/s", "1/s", "1/s^2", "1/s^2", "1/s^2", "1", "1"});
  Table eprt = make_table("epr.csv",
                          {"t", "VXm", "VYm", "VXp", "VYp", "Vinf_Xm", "Vinf_Ym", "product", "flux_diff_ratio"},
                          {"s", "1", "1", "1", "1", "1", "1", "1", "1"});
  const EprWindow window = c.epr_window();
  evolve_opo_streaming(sys, c.t_final, c.dt, c.times(), c.propagator(), [&](const OpoSolution& s) {
    const GaussianKernels k = build_kernels(s, points);
    const FluxDifference fd = flux_difference_variance(k, c.x0, mass);
    if (epr) {
      const EprResult r = epr_inference(s, window);
      eprt.add({s.t, r.VXm, r.VYm, r.VXp, r.VYp, r.Vinf_Xm, r.Vinf_Ym, r.product, fd.ratio});
      return;
    }
    const RVector rho = opo_density(s, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) density.add({s.t, xs[i], rho[static_cast<Eigen::Index>(i)]});
    flux.add({s.t, flux_from_kernels(k, c.x0, mass), flux_from_kernels(k, -c.x0, mass),
              flux_variance_from_kernels(k, c.x0, mass), fd.variance, fd.baseline, fd.ratio, fd.signed_ratio});
  });
  if (epr) {
    out.tables = {std::move(eprt)};
  } else {
    out.tables = {std::move(density), std::move(flux)};
  }
}

}  // namespace detail

inline ScenarioOutput run_scenario(const ScenarioConfig& c) {
  c.validate();
  ScenarioOutput out;
  switch (c.scenario) {
    case Scenario::single_pulse: detail::run_single_pulse(c, out); break;
    case Scenario::variance_vs_time: detail::run_variance_vs_time(c, out); break;
    case Scenario::flux_squeezing: detail::run_flux_squeezing(c, out); break;
    case Scenario::omega_sweep: detail::run_omega_sweep(c, out); break;
    case Scenario::opo_twin_beams:
    case Scenario::epr: detail::run_opo(c, out); break;
  }
  return out;
}

/// Comment lines heading every output file.
inline std::vector<std::string> output_preamble(const ScenarioConfig& c) {
  std::vector<std::string> lines{std::string("atomlaser ") + kVersion, "resolved configuration:"};
  for (const auto& [k, v] : resolved(c)) lines.push_back("  " + k + " = " + v);
  return lines;
}

/// Writes every table into c.output_directory; returns the written paths.
inline std::vector<std::filesystem::path> write_outputs(const ScenarioConfig& c, const ScenarioOutput& out) {
  namespace fs = std::filesystem;
  const fs::path dir(c.output_directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("output.directory", "cannot create '" + dir.string() + "': " + ec.message());
  const auto preamble = output_preamble(c);
  std::vector<fs::path> written;
  for (const auto& t : out.tables) {
    const fs::path path = dir / t.name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("output.directory", "cannot write '" + path.string() + "'");
    write_csv(f, t, preamble);
    if (!f) throw ConfigError("output.directory", "write failed for '" + path.string() + "'");
    written.push_back(path);
  }
  return written;
}

// ---------------------------------------------------------------------------
// Convergence

struct ColumnChange {
  std::string table;
  std::string column;
  std::string variant;  // "dt/2" or "n*2"
  double change = 0.0;  // max |a - b| / max |a| over matched rows
  std::size_t matched = 0;
};

struct ConvergenceReport {
  double tolerance = 1e-3;
  std::vector<ColumnChange> changes;

  bool passed() const {
    return std::all_of(changes.begin(), changes.end(),
                       [&](const ColumnChange& c) { return c.change < tolerance && c.matched > 0; });
  }

  /// Entries sorted from worst to best.
  std::vector<ColumnChange> worst() const {
    std::vector<ColumnChange> out = changes;
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.change > b.change; });
    return out;
  }
};

namespace detail {

/// Rows of `b` matched to rows of `a` by their key columns, within a relative
/// tolerance of the key column's scale.
inline std::vector<std::pair<std::size_t, std::size_t>> match_rows(const Table& a, const Table& b) {
  std::vector<double> scale(a.key_columns, 0.0);
  for (const auto& row : a.rows) {
    for (std::size_t i = 0; i < a.key_columns; ++i) scale[i] = std::max(scale[i], std::abs(row[i].value_or(0.0)));
  }
  auto cmp = [&](const std::vector<Cell>& x, const std::vector<Cell>& y) {
    for (std::size_t i = 0; i < scale.size(); ++i) {
      const double xv = x[i].value_or(0.0);
      const double yv = y[i].value_or(0.0);
      if (std::abs(xv - yv) > 1e-9 * std::max(scale[i], 1e-300)) return xv < yv ? -1 : 1;
    }
    return 0;
  };
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    while (j < b.rows.size() && cmp(b.rows[j], a.rows[i]) < 0) ++j;
    if (j < b.rows.size() && cmp(b.rows[j], a.rows[i]) == 0) out.emplace_back(i, j);
  }
  return out;
}

inline void compare_outputs(const ScenarioOutput& base, const ScenarioOutput& other, const std::string& variant,
                            ConvergenceReport& report) {
  for (const auto& ta : base.tables) {
    if (std::find(base.uncompared.begin(), base.uncompared.end(), ta.name) != base.uncompared.end()) continue;
    const Table& tb = other.table(ta.name);
    const auto pairs = match_rows(ta, tb);
    for (std::size_t col = ta.key_columns; col < ta.columns.size(); ++col) {
      double peak = 0.0;
      double diff = 0.0;
      for (const auto& [i, j] : pairs) {
        const Cell& x = ta.rows[i][col];
        const Cell& y = tb.rows[j][col];
        if (x.has_value() != y.has_value()) {
          diff = std::numeric_limits<double>::infinity();
          continue;
        }
        if (!x) continue;
        peak = std::max(peak, std::abs(*x));
        diff = std::max(diff, std::abs(*x - *y));
      }
      const double change = diff == 0.0 ? 0.0 : (peak > 0.0 ? diff / peak : std::numeric_limits<double>::infinity());
      report.changes.push_back({ta.name, ta.columns[col], variant, change, pairs.size()});
    }
  }
}

}  // namespace detail

inline ConvergenceReport convergence_check(const ScenarioConfig& c, double tolerance = 1e-3) {
  ConvergenceReport report;
  report.tolerance = tolerance;
  const ScenarioOutput base = run_scenario(c);
  ScenarioConfig half_dt = c;
  half_dt.dt = 0.5 * c.dt;
  detail::compare_outputs(base, run_scenario(half_dt), "dt/2", report);
  ScenarioConfig double_n = c;
  double_n.grid_n = 2 * c.grid_n;
  detail::compare_outputs(base, run_scenario(double_n), "n*2", report);
  return report;
}

}  // namespace atomlaser

#endif  // ATOMLASER_SCENARIOS_HPP_
