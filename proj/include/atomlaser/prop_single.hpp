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

// Mode functions of the single-probe outcoupler.
//
// The Heisenberg operators are expanded on their initial values,
//
//   psi(k, t) = int f(k, k', t) psi_s(k') dk' + g(k, t) a_s
//   a(t)      = p(t) a_s + int q(k', t) psi_s(k') dk',
//
// and the c-number coefficients obey
//
//   i df/dt = omega0(k) f - Omega0(k) q(k')      i dg/dt = omega0(k) g - Omega0(k) p
//   i dq/dt = omega_a q - int Omega0^* f dk      i dp/dt = omega_a p - int Omega0^* g dk.
//
// On the lattice we store normalised amplitudes: the (n+1)x(n+1) matrix U with
// U_ij = f(k_i, k'_j) dk, U_in = g(k_i) sqrt(dk), U_nj = q(k'_j) sqrt(dk),
// U_nn = p. Each column of U is an independent solution of one Hermitian
// linear system, so U stays unitary and columns can be advanced in parallel.

#ifndef ATOMLASER_PROP_SINGLE_HPP_
#define ATOMLASER_PROP_SINGLE_HPP_

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "atomlaser/common.hpp"
#include "atomlaser/grids.hpp"
#include "atomlaser/integrator.hpp"
#include "atomlaser/model.hpp"
#include "atomlaser/parallel.hpp"

namespace atomlaser {

/// Discretised generator of the single-probe equations.
struct SingleProbeSystem {
  MomentumGrid grid;
  RVector omega0;    // omega0(k_i)
  RVector detuning;  // omega0(k_i) - omega_a
  CVector coupling;  // -Omega0(k_i) sqrt(dk), the field-probe matrix element
  double omega_a = 0.0;

  static SingleProbeSystem build(const ReducedModel& model, const MomentumGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    SingleProbeSystem s{grid, RVector(n), RVector(n), CVector(n), model.omega_a()};
    const double root_dk = std::sqrt(grid.dk());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double k = grid.k(static_cast<std::size_t>(i));
      s.omega0[i] = model.omega0(k);
      s.detuning[i] = model.detuning(k);
      s.coupling[i] = -model.Omega0(k) * root_dk;
    }
    return s;
  }

  std::size_t modes() const { return grid.size(); }

  /// Largest rate RK4 has to resolve in the given frame.
  double stiffness(Frame frame) const {
    const double couple = coupling.norm();
    if (frame == Frame::lab) {
      return std::max(omega0.cwiseAbs().maxCoeff(), std::abs(omega_a)) + couple;
    }
    // The interaction-picture coefficients oscillate at the detuning wherever
    // the coupling is non-negligible.
    const double cut = 1e-8 * coupling.cwiseAbs().maxCoeff();
    double fastest = 0.0;
    for (Eigen::Index i = 0; i < coupling.size(); ++i) {
      if (std::abs(coupling[i]) > cut) fastest = std::max(fastest, std::abs(detuning[i]));
    }
    return std::max(fastest, couple);
  }
};

struct SingleModeSolution {
  double t = 0.0;
  MomentumGrid grid;
  CMatrix U;

  std::size_t modes() const { return grid.size(); }
  Eigen::Index probe() const { return static_cast<Eigen::Index>(grid.size()); }

  Complex f(std::size_t i, std::size_t j) const {
    return U(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / grid.dk();
  }
  Complex g(std::size_t i) const { return U(static_cast<Eigen::Index>(i), probe()) / std::sqrt(grid.dk()); }
  Complex q(std::size_t j) const { return U(probe(), static_cast<Eigen::Index>(j)) / std::sqrt(grid.dk()); }
  Complex p() const { return U(probe(), probe()); }

  MomentumField g_field() const {
    return {grid, U.col(probe()).head(probe()) / std::sqrt(grid.dk())};
  }
  MomentumField q_field() const {
    return {grid, U.row(probe()).head(probe()).transpose() / std::sqrt(grid.dk())};
  }

  /// max |(U^dagger U - I)_ij|.
  double unitarity_defect() const {
    const CMatrix gram = U.adjoint() * U;
    return (gram - CMatrix::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
  }
};

inline SingleModeSolution initial_solution(const MomentumGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size()) + 1;
  return {0.0, grid, CMatrix::Identity(n, n)};
}

namespace detail {

struct SingleStageBuffers {
  CVector k1, k2, k3, k4, tmp;
  explicit SingleStageBuffers(Eigen::Index n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

}  // namespace detail

/// Advances every column of `columns` (rows: n field modes then the probe)
/// from t to t + h with one RK4 step.
inline void advance_columns(const SingleProbeSystem& sys, CMatrix& columns, double h,
                            const PropagatorOptions& opts = {}) {
  const auto n = static_cast<Eigen::Index>(sys.modes());
  if (columns.rows() != n + 1) throw DomainError("column height does not match the system");
  check_stability(sys.stiffness(opts.frame), h, "single-probe step");

  const bool lab = opts.frame == Frame::lab;
  // Interaction-picture couplings at the three RK4 stage times, measured from
  // the step start.
  CVector v_mid = sys.coupling;
  CVector v_end = sys.coupling;
  CVector phase_back(n + 1);
  if (!lab) {
    for (Eigen::Index i = 0; i < n; ++i) {
      v_mid[i] *= std::exp(kI * (sys.detuning[i] * 0.5 * h));
      v_end[i] *= std::exp(kI * (sys.detuning[i] * h));
      phase_back[i] = std::exp(-kI * (sys.omega0[i] * h));
    }
    phase_back[n] = std::exp(-kI * (sys.omega_a * h));
  }

  auto rhs = [&](const CVector& v, const auto& z, CVector& out) {
    const Complex probe = z[n];
    if (lab) {
      out.head(n) = -kI * (sys.omega0.cwiseProduct(z.head(n)) + probe * v);
      out[n] = -kI * (sys.omega_a * probe + v.dot(z.head(n)));
    } else {
      out.head(n) = (-kI * probe) * v;
      out[n] = -kI * v.dot(z.head(n));
    }
  };

  const double tol = opts.norm_tolerance;
  parallel_columns(static_cast<std::size_t>(columns.cols()), resolve_workers(opts.workers),
                   [&](std::size_t begin, std::size_t end) {
    detail::SingleStageBuffers b(n + 1);
    for (auto j = static_cast<Eigen::Index>(begin); j < static_cast<Eigen::Index>(end); ++j) {
      auto z = columns.col(j);
      const double before = z.squaredNorm();
      rhs(sys.coupling, z, b.k1);
      b.tmp = z + (0.5 * h) * b.k1;
      rhs(v_mid, b.tmp, b.k2);
      b.tmp = z + (0.5 * h) * b.k2;
      rhs(v_mid, b.tmp, b.k3);
      b.tmp = z + h * b.k3;
      rhs(v_end, b.tmp, b.k4);
      z += (h / 6.0) * (b.k1 + 2.0 * b.k2 + 2.0 * b.k3 + b.k4);
      if (!lab) z = z.cwiseProduct(phase_back);
      const double after = z.squaredNorm();
      if (!(std::abs(after - before) <= tol * std::max(before, 1e-300))) {
        throw StepSizeError("single-probe step: column norm drifted from " + std::to_string(before) +
                            " to " + std::to_string(after) + "; reduce dt");
      }
    }
  });
}

inline SingleModeSolution step(const SingleModeSolution& sol, const SingleProbeSystem& sys, double dt,
                               const PropagatorOptions& opts = {}) {
  if (!(sol.grid == sys.grid)) throw DomainError("solution and system live on different grids");
  if (!std::isfinite(dt) || dt == 0.0) throw DomainError("dt must be finite and non-zero");
  SingleModeSolution out = sol;
  advance_columns(sys, out.U, dt, opts);
  out.t = sol.t + dt;
  return out;
}

inline SingleModeSolution step(const SingleModeSolution& sol, const ReducedModel& model, double dt,
                               const PropagatorOptions& opts = {}) {
  return step(sol, SingleProbeSystem::build(model, sol.grid), dt, opts);
}

/// Streams snapshots to `on_snapshot` instead of storing them.
inline void evolve_streaming(const SingleProbeSystem& sys, double t_final, double dt,
                             std::span<const double> snapshot_times, const PropagatorOptions& opts,
                             const std::function<void(const SingleModeSolution&)>& on_snapshot) {
  SingleModeSolution state = initial_solution(sys.grid);
  march(
      t_final, dt, snapshot_times,
      [&](double t, double h) {
        advance_columns(sys, state.U, h, opts);
        state.t = t + h;
      },
      [&](double t) {
        state.t = t;
        on_snapshot(state);
      });
}

inline std::vector<SingleModeSolution> evolve(const SingleProbeSystem& sys, double t_final, double dt,
                                              std::span<const double> snapshot_times,
                                              const PropagatorOptions& opts = {}) {
  std::vector<SingleModeSolution> out;
  evolve_streaming(sys, t_final, dt, snapshot_times, opts,
                   [&](const SingleModeSolution& s) { out.push_back(s); });
  return out;
}

inline std::vector<SingleModeSolution> evolve(const ReducedModel& model, const MomentumGrid& grid,
                                              double t_final, double dt,
                                              std::span<const double> snapshot_times,
                                              const PropagatorOptions& opts = {}) {
  return evolve(SingleProbeSystem::build(model, grid), t_final, dt, snapshot_times, opts);
}

}  // namespace atomlaser

#endif  // ATOMLASER_PROP_SINGLE_HPP_
