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

// Mode functions of the twin-beam source: two probe modes a1, a2 outcouple
// atoms with momenta near +k_beam and -k_beam, and a parametric pump creates
// probe photons in pairs.
//
// Every operator is a linear combination of the initial creation and
// annihilation operators,
//
//   o_r(t) = sum_j A_rj(t) o_j(0) + B_rj(t) o_j(0)^dagger,
//
// with rows r = field modes 0..K-1, then a1 (row K) and a2 (row K+1). The
// coefficient matrices obey
//
//   i dA/dt = M A + N conj(B),     i dB/dt = M B + N conj(A),
//
// where M is the Hermitian single-particle generator and N is symmetric with
// N(a1, a2) = N(a2, a1) = chi beta exp(-i nu t). Columns evolve independently.
// Field amplitudes are normalised like the single-probe ones: the f-type
// entries carry a factor dk and the g/q-type entries a factor sqrt(dk).

#ifndef ATOMLASER_PROP_OPO_HPP_
#define ATOMLASER_PROP_OPO_HPP_

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "atomlaser/common.hpp"
#include "atomlaser/grids.hpp"
#include "atomlaser/integrator.hpp"
#include "atomlaser/model.hpp"
#include "atomlaser/parallel.hpp"

namespace atomlaser {

/// Optical occupation above which a run is declared divergent.
inline constexpr double kOpticalNormLimit = 1e8;

struct OpoSystem {
  MomentumLattice lattice;
  RVector omega0;
  RVector detuning;
  CVector coupling1;  // -Omega1(k) sqrt(dk), Omega1 = Omega phi0(k - k_beam)
  CVector coupling2;  // -Omega2(k) sqrt(dk), Omega2 = Omega phi0(k + k_beam)
  double omega_a = 0.0;
  double pump = 0.0;         // chi beta
  double pump_offset = 0.0;  // nu

  static OpoSystem build(const ReducedModel& model, const MomentumLattice& lattice) {
    const auto n = static_cast<Eigen::Index>(lattice.size());
    const auto& p = model.params();
    OpoSystem s{lattice, RVector(n), RVector(n), CVector(n), CVector(n),
                model.omega_a(), p.pump_drive, p.pump_offset()};
    const double root_dk = std::sqrt(lattice.dk());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double k = lattice.k(static_cast<std::size_t>(i));
      s.omega0[i] = model.omega0(k);
      s.detuning[i] = model.detuning(k);
      s.coupling1[i] = -model.coupling_at(k, p.kick_wavenumber) * root_dk;
      s.coupling2[i] = -model.coupling_at(k, -p.kick_wavenumber) * root_dk;
    }
    return s;
  }

  std::size_t field_modes() const { return lattice.size(); }

  double stiffness(Frame frame) const {
    const double couple = coupling1.norm() + coupling2.norm() + std::abs(pump);
    if (frame == Frame::lab) {
      return std::max(omega0.cwiseAbs().maxCoeff(), std::abs(omega_a)) + couple;
    }
    const double peak = std::max(coupling1.cwiseAbs().maxCoeff(), coupling2.cwiseAbs().maxCoeff());
    double fastest = std::abs(2.0 * omega_a - pump_offset);
    for (Eigen::Index i = 0; i < detuning.size(); ++i) {
      if (std::max(std::abs(coupling1[i]), std::abs(coupling2[i])) > 1e-8 * peak) {
        fastest = std::max(fastest, std::abs(detuning[i]));
      }
    }
    return std::max(fastest, couple);
  }
};

/// Upper band centred on k_beam and its exact mirror image.
inline MomentumLattice opo_lattice(const PhysicalParams& params, std::size_t n_per_band, double halfwidth) {
  return MomentumLattice::twin(MomentumGrid(n_per_band, params.kick_wavenumber, halfwidth));
}

struct OpoSolution {
  double t = 0.0;
  MomentumLattice lattice;
  CMatrix A;
  CMatrix B;

  std::size_t field_modes() const { return lattice.size(); }
  Eigen::Index a1() const { return static_cast<Eigen::Index>(lattice.size()); }
  Eigen::Index a2() const { return a1() + 1; }

  Complex f_plus(std::size_t i, std::size_t j) const { return at(A, i, j) / lattice.dk(); }
  Complex f_minus(std::size_t i, std::size_t j) const { return at(B, i, j) / lattice.dk(); }
  Complex g1_plus(std::size_t i) const { return at(A, i, a1()) / root_dk(); }
  Complex g1_minus(std::size_t i) const { return at(B, i, a1()) / root_dk(); }
  Complex g2_plus(std::size_t i) const { return at(A, i, a2()) / root_dk(); }
  Complex g2_minus(std::size_t i) const { return at(B, i, a2()) / root_dk(); }
  Complex p1_plus() const { return A(a1(), a1()); }
  Complex p1_minus() const { return B(a1(), a1()); }
  Complex p2_plus() const { return A(a1(), a2()); }
  Complex p2_minus() const { return B(a1(), a2()); }
  Complex p3_plus(std::size_t j) const { return A(a1(), idx(j)) / root_dk(); }
  Complex p3_minus(std::size_t j) const { return B(a1(), idx(j)) / root_dk(); }
  Complex q1_plus() const { return A(a2(), a1()); }
  Complex q1_minus() const { return B(a2(), a1()); }
  Complex q2_plus() const { return A(a2(), a2()); }
  Complex q2_minus() const { return B(a2(), a2()); }
  Complex q3_plus(std::size_t j) const { return A(a2(), idx(j)) / root_dk(); }
  Complex q3_minus(std::size_t j) const { return B(a2(), idx(j)) / root_dk(); }

  /// <a_r^dagger a_r> for the vacuum initial state.
  double occupation(Eigen::Index row) const { return B.row(row).squaredNorm(); }

  /// Largest optical-row weight sum_j |A_rj|^2 + |B_rj|^2.
  double optical_norm() const {
    double out = 0.0;
    for (Eigen::Index r : {a1(), a2()}) out = std::max(out, A.row(r).squaredNorm() + B.row(r).squaredNorm());
    return out;
  }

  /// Largest violation of A A^H - B B^H = I and A B^T = B A^T, optionally
  /// restricted to the field rows.
  double bogoliubov_defect(bool field_rows_only = false) const {
    const Eigen::Index rows = field_rows_only ? a1() : A.rows();
    const auto a = A.topRows(rows);
    const auto b = B.topRows(rows);
    const CMatrix herm = a * a.adjoint() - b * b.adjoint() - CMatrix::Identity(rows, rows);
    const CMatrix sym = a * b.transpose() - b * a.transpose();
    return std::max(herm.cwiseAbs().maxCoeff(), sym.cwiseAbs().maxCoeff());
  }

 private:
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }
  static Complex at(const CMatrix& m, std::size_t i, Eigen::Index j) { return m(idx(i), j); }
  static Complex at(const CMatrix& m, std::size_t i, std::size_t j) { return m(idx(i), idx(j)); }
  double root_dk() const { return std::sqrt(lattice.dk()); }
};

inline OpoSolution initial_opo(const MomentumLattice& lattice) {
  const auto n = static_cast<Eigen::Index>(lattice.size()) + 2;
  return {0.0, lattice, CMatrix::Identity(n, n), CMatrix::Zero(n, n)};
}

namespace detail {

struct OpoStage {
  CVector v1, v2;
  Complex chi;
};

struct OpoBuffers {
  CVector ka[4], kb[4], ta, tb;
  explicit OpoBuffers(Eigen::Index n) : ta(n), tb(n) {
    for (int s = 0; s < 4; ++s) {
      ka[s].resize(n);
      kb[s].resize(n);
    }
  }
};

}  // namespace detail

/// One RK4 step of every column pair (A_j, B_j) from t0 to t0 + h.
inline void advance_opo(const OpoSystem& sys, CMatrix& A, CMatrix& B, double t0, double h,
                        const PropagatorOptions& opts = {}) {
  const auto n = static_cast<Eigen::Index>(sys.field_modes());
  const Eigen::Index K = n;
  if (A.rows() != n + 2 || B.rows() != n + 2 || A.cols() != B.cols()) {
    throw DomainError("coefficient matrices do not match the twin-beam system");
  }
  check_stability(sys.stiffness(opts.frame), h, "twin-beam step");

  const bool lab = opts.frame == Frame::lab;
  const Complex chi0 = sys.pump * std::exp(-kI * (sys.pump_offset * t0));
  detail::OpoStage stage[3];
  const double taus[3] = {0.0, 0.5 * h, h};
  for (int s = 0; s < 3; ++s) {
    const double tau = taus[s];
    stage[s].v1 = sys.coupling1;
    stage[s].v2 = sys.coupling2;
    if (lab) {
      stage[s].chi = chi0 * std::exp(-kI * (sys.pump_offset * tau));
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex rot = std::exp(kI * (sys.detuning[i] * tau));
        stage[s].v1[i] *= rot;
        stage[s].v2[i] *= rot;
      }
      stage[s].chi = chi0 * std::exp(kI * ((2.0 * sys.omega_a - sys.pump_offset) * tau));
    }
  }
  CVector phase_back(n + 2);
  if (!lab) {
    for (Eigen::Index i = 0; i < n; ++i) phase_back[i] = std::exp(-kI * (sys.omega0[i] * h));
    phase_back[K] = phase_back[K + 1] = std::exp(-kI * (sys.omega_a * h));
  }

  // One half of the pair; `other` enters only through the pump.
  auto half = [&](const detail::OpoStage& st, const auto& z, const auto& other, CVector& out) {
    const Complex z1 = z[K];
    const Complex z2 = z[K + 1];
    if (lab) {
      out.head(n) = -kI * (sys.omega0.cwiseProduct(z.head(n)) + z1 * st.v1 + z2 * st.v2);
      out[K] = -kI * (sys.omega_a * z1 + st.v1.dot(z.head(n)) + st.chi * std::conj(other[K + 1]));
      out[K + 1] = -kI * (sys.omega_a * z2 + st.v2.dot(z.head(n)) + st.chi * std::conj(other[K]));
    } else {
      out.head(n) = -kI * (z1 * st.v1 + z2 * st.v2);
      out[K] = -kI * (st.v1.dot(z.head(n)) + st.chi * std::conj(other[K + 1]));
      out[K + 1] = -kI * (st.v2.dot(z.head(n)) + st.chi * std::conj(other[K]));
    }
  };

  const double tol = opts.norm_tolerance;
  parallel_columns(static_cast<std::size_t>(A.cols()), resolve_workers(opts.workers),
                   [&](std::size_t begin, std::size_t end) {
    detail::OpoBuffers w(n + 2);
    for (auto j = static_cast<Eigen::Index>(begin); j < static_cast<Eigen::Index>(end); ++j) {
      auto a = A.col(j);
      auto b = B.col(j);
      const double na = a.squaredNorm();
      const double nb = b.squaredNorm();
      half(stage[0], a, b, w.ka[0]);
      half(stage[0], b, a, w.kb[0]);
      w.ta = a + (0.5 * h) * w.ka[0];
      w.tb = b + (0.5 * h) * w.kb[0];
      half(stage[1], w.ta, w.tb, w.ka[1]);
      half(stage[1], w.tb, w.ta, w.kb[1]);
      w.ta = a + (0.5 * h) * w.ka[1];
      w.tb = b + (0.5 * h) * w.kb[1];
      half(stage[1], w.ta, w.tb, w.ka[2]);
      half(stage[1], w.tb, w.ta, w.kb[2]);
      w.ta = a + h * w.ka[2];
      w.tb = b + h * w.kb[2];
      half(stage[2], w.ta, w.tb, w.ka[3]);
      half(stage[2], w.tb, w.ta, w.kb[3]);
      a += (h / 6.0) * (w.ka[0] + 2.0 * w.ka[1] + 2.0 * w.ka[2] + w.ka[3]);
      b += (h / 6.0) * (w.kb[0] + 2.0 * w.kb[1] + 2.0 * w.kb[2] + w.kb[3]);
      if (!lab) {
        a = a.cwiseProduct(phase_back);
        b = b.cwiseProduct(phase_back);
      }
      const double na2 = a.squaredNorm();
      const double nb2 = b.squaredNorm();
      if (!std::isfinite(na2 + nb2)) throw NumericalError("twin-beam step produced non-finite amplitudes");
      const double drift = std::abs((na2 - nb2) - (na - nb));
      if (!(drift <= tol * (na + nb))) {
        throw StepSizeError("twin-beam step: symplectic norm of column " + std::to_string(j) +
                            " drifted by " + std::to_string(drift) + "; reduce dt");
      }
    }
  });
}

inline void check_optical_norm(const OpoSolution& sol) {
  const double norm = sol.optical_norm();
  if (!(norm <= kOpticalNormLimit)) {
    throw NumericalError("optical mode norm " + std::to_string(norm) + " at t = " + std::to_string(sol.t) +
                         " exceeds " + std::to_string(kOpticalNormLimit) +
                         "; the pump is above threshold for this coupling");
  }
}

inline OpoSolution step_opo(const OpoSolution& sol, const OpoSystem& sys, double dt,
                            const PropagatorOptions& opts = {}) {
  if (!std::isfinite(dt) || dt == 0.0) throw DomainError("dt must be finite and non-zero");
  if (sol.lattice.size() != sys.lattice.size() || sol.lattice.dk() != sys.lattice.dk()) {
    throw DomainError("solution and system live on different lattices");
  }
  OpoSolution out = sol;
  advance_opo(sys, out.A, out.B, sol.t, dt, opts);
  out.t = sol.t + dt;
  check_optical_norm(out);
  return out;
}

inline void evolve_opo_streaming(const OpoSystem& sys, double t_final, double dt,
                                 std::span<const double> snapshot_times, const PropagatorOptions& opts,
                                 const std::function<void(const OpoSolution&)>& on_snapshot) {
  OpoSolution state = initial_opo(sys.lattice);
  march(
      t_final, dt, snapshot_times,
      [&](double t, double h) {
        advance_opo(sys, state.A, state.B, t, h, opts);
        state.t = t + h;
        check_optical_norm(state);
      },
      [&](double t) {
        state.t = t;
        on_snapshot(state);
      });
}

inline std::vector<OpoSolution> evolve_opo(const OpoSystem& sys, double t_final, double dt,
                                           std::span<const double> snapshot_times,
                                           const PropagatorOptions& opts = {}) {
  std::vector<OpoSolution> out;
  evolve_opo_streaming(sys, t_final, dt, snapshot_times, opts,
                       [&](const OpoSolution& s) { out.push_back(s); });
  return out;
}

}  // namespace atomlaser

#endif  // ATOMLASER_PROP_OPO_HPP_
