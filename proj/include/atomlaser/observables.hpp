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

// Measured quantities computed from mode-function snapshots.
//
// Single probe: the atomic field starts in vacuum, so every expectation value
// depends on the optical state only through <n> and V(n).
//
// Twin beams: every mode starts in vacuum and the evolution is a Bogoliubov
// transformation, so the state is Gaussian with zero mean. A linear mode
// u = sum_j alpha_j o_j + beta_j o_j^dagger then has
//
//   <u_a^dagger u_b> = sum_j conj(beta_aj) beta_bj      (N)
//   <u_a u_b>        = sum_j alpha_aj beta_bj           (M)
//   <u_a u_b^dagger> = sum_j alpha_aj conj(alpha_bj)    (Aa)
//
// and all higher moments follow from Wick's theorem.

#ifndef ATOMLASER_OBSERVABLES_HPP_
#define ATOMLASER_OBSERVABLES_HPP_

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atomlaser/common.hpp"
#include "atomlaser/grids.hpp"
#include "atomlaser/model.hpp"
#include "atomlaser/optics.hpp"
#include "atomlaser/prop_opo.hpp"
#include "atomlaser/prop_single.hpp"

namespace atomlaser {

// ---------------------------------------------------------------------------
// Single probe

namespace detail {

inline Eigen::Index field_rows(const SingleModeSolution& sol) { return static_cast<Eigen::Index>(sol.modes()); }

/// G(x) and dG/dx at x.
struct ProbeImage {
  Complex G;
  Complex dG;
};

inline ProbeImage probe_image(const SingleModeSolution& sol, double x) {
  const MomentumLattice lat(sol.grid);
  const auto n = field_rows(sol);
  const auto g = sol.U.col(n).head(n);
  return {lat.value_weights(x).transpose() * g, lat.derivative_weights(x).transpose() * g};
}

}  // namespace detail

/// <Psi^dagger Psi>(x) = n |G(x)|^2 on the position grid conjugate to the solution grid.
inline PositionField density_single(const SingleModeSolution& sol, const OpticalStateMoments& state) {
  PositionField G = to_position(sol.g_field());
  RVector rho = G.values.cwiseAbs2() * state.mean_n;
  return {G.grid, rho.cast<Complex>()};
}

/// The same at arbitrary positions inside the periodic window.
inline RVector density_single(const SingleModeSolution& sol, const OpticalStateMoments& state,
                              std::span<const double> xs) {
  RVector out(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = std::norm(detail::probe_image(sol, xs[i]).G) * state.mean_n;
  }
  return out;
}

/// N_G = int |G(x)|^2 dx, evaluated in momentum space.
inline double outcoupled_fraction(const SingleModeSolution& sol) {
  const auto n = detail::field_rows(sol);
  return sol.U.col(n).head(n).squaredNorm();
}

struct NumberStats {
  double n_g = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> v;  // variance / mean; absent when mean == 0
};

inline NumberStats number_stats(double n_g, const OpticalStateMoments& state) {
  NumberStats s;
  s.n_g = n_g;
  s.mean = n_g * state.mean_n;
  s.variance = n_g * n_g * state.var_n + n_g * (1.0 - n_g) * state.mean_n;
  if (s.mean > 0.0) s.v = s.variance / s.mean;
  return s;
}

inline NumberStats number_stats(const SingleModeSolution& sol, const OpticalStateMoments& state) {
  return number_stats(outcoupled_fraction(sol), state);
}

/// Probe-only flux J_g(x) = (i hbar / 2m)(dG^* G - G^* dG) = (hbar/m) Im(G^* dG).
inline double probe_flux(const SingleModeSolution& sol, const ReducedModel& model, double x) {
  const auto img = detail::probe_image(sol, x);
  return kHbar / model.params().mass * std::imag(std::conj(img.G) * img.dG);
}

inline double flux_mean(const SingleModeSolution& sol, const ReducedModel& model,
                        const OpticalStateMoments& state, double x0) {
  return probe_flux(sol, model, x0) * state.mean_n;
}

/// Ingredients of the single-probe flux noise at one point.
struct FluxNoise {
  double j_g = 0.0;    // J_g(x0)
  double cross = 0.0;  // int J_gf J_fg dk' = sum_j |J_gf,j|^2
};

inline FluxNoise flux_noise(const SingleModeSolution& sol, const ReducedModel& model, double x0) {
  const MomentumLattice lat(sol.grid);
  const auto n = detail::field_rows(sol);
  // Position images of every column at x0 only: row vectors of length n + 1.
  const Eigen::Matrix<Complex, 1, Eigen::Dynamic> val = lat.value_weights(x0).transpose() * sol.U.topRows(n);
  const Eigen::Matrix<Complex, 1, Eigen::Dynamic> der =
      lat.derivative_weights(x0).transpose() * sol.U.topRows(n);
  const Complex G = val[n];
  const Complex dG = der[n];
  const Complex c = kI * (kHbar / (2.0 * model.params().mass));
  FluxNoise out;
  out.j_g = kHbar / model.params().mass * std::imag(std::conj(G) * dG);
  const auto F = val.head(n);
  const auto dF = der.head(n);
  out.cross = (c * (std::conj(dG) * F - std::conj(G) * dF)).squaredNorm();
  return out;
}

struct FluxVariance {
  double probe_term = 0.0;  // J_g^2 V(n)
  double field_term = 0.0;  // <n> int J_gf J_fg dk'
  double total() const { return probe_term + field_term; }
};

inline FluxVariance flux_variance_single(const FluxNoise& noise, const OpticalStateMoments& state) {
  return {noise.j_g * noise.j_g * state.var_n, state.mean_n * noise.cross};
}

inline FluxVariance flux_variance_single(const SingleModeSolution& sol, const ReducedModel& model,
                                         const OpticalStateMoments& state, double x0) {
  return flux_variance_single(flux_noise(sol, model, x0), state);
}

/// Fock-input flux variance relative to coherent input; absent when the
/// flux noise vanishes.
inline std::optional<double> v_of_J(const FluxNoise& noise) {
  const double den = noise.j_g * noise.j_g + noise.cross;
  if (!(den > 0.0)) return std::nullopt;
  return noise.cross / den;
}

inline std::optional<double> v_of_J(const SingleModeSolution& sol, const ReducedModel& model, double x0) {
  return v_of_J(flux_noise(sol, model, x0));
}

// ---------------------------------------------------------------------------
// Gaussian kernels

/// Two-point moments of a set of linear modes of a zero-mean Gaussian state.
struct GaussianKernels {
  std::vector<std::string> labels;
  CMatrix N;   // <u_a^dagger u_b>
  CMatrix M;   // <u_a u_b>
  CMatrix Aa;  // <u_a u_b^dagger>
  std::vector<double> points;  // for point kernels: mode 2i = Psi(x_i), 2i+1 = dPsi/dx(x_i)

  Eigen::Index size() const { return N.rows(); }

  Eigen::Index value_mode(double x) const { return 2 * point_index(x); }
  Eigen::Index derivative_mode(double x) const { return 2 * point_index(x) + 1; }

  Eigen::Index point_index(double x) const {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (std::abs(points[i] - x) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<Eigen::Index>(i);
    }
    throw DomainError("position " + std::to_string(x) + " m is not among the kernel points");
  }
};

/// alpha, beta: one row per linear mode, one column per initial operator.
inline GaussianKernels kernels_from_linear_modes(const CMatrix& alpha, const CMatrix& beta,
                                                 std::vector<std::string> labels = {}) {
  if (alpha.rows() != beta.rows() || alpha.cols() != beta.cols()) {
    throw DomainError("alpha and beta must have the same shape");
  }
  GaussianKernels k;
  k.N = beta.conjugate() * beta.transpose();
  k.M = alpha * beta.transpose();
  k.Aa = alpha * alpha.adjoint();
  if (labels.empty()) {
    for (Eigen::Index a = 0; a < alpha.rows(); ++a) labels.push_back("u" + std::to_string(a));
  }
  k.labels = std::move(labels);
  return k;
}

/// Psi(x) and dPsi/dx at each point.
inline GaussianKernels build_kernels(const OpoSolution& sol, std::span<const double> points) {
  const auto K = static_cast<Eigen::Index>(sol.field_modes());
  CMatrix W(2 * static_cast<Eigen::Index>(points.size()), K);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(2 * i);
    W.row(r) = sol.lattice.value_weights(points[i]).transpose();
    W.row(r + 1) = sol.lattice.derivative_weights(points[i]).transpose();
    labels.push_back("psi(" + std::to_string(points[i]) + ")");
    labels.push_back("dpsi(" + std::to_string(points[i]) + ")");
  }
  GaussianKernels k =
      kernels_from_linear_modes(W * sol.A.topRows(K), W * sol.B.topRows(K), std::move(labels));
  k.points.assign(points.begin(), points.end());
  return k;
}

/// Variance of Q = sum_ab Kc_ab u_a^dagger u_b for Hermitian Kc.
inline double quadratic_form_variance(const GaussianKernels& k, const CMatrix& Kc) {
  const CMatrix KM = Kc * k.M;
  const CMatrix MK = k.M.adjoint() * Kc;
  const CMatrix KAK = Kc * k.Aa * Kc;
  return std::real(KM.cwiseProduct(MK).sum() + KAK.cwiseProduct(k.N).sum());
}

inline double quadratic_form_mean(const GaussianKernels& k, const CMatrix& Kc) {
  return std::real(Kc.cwiseProduct(k.N).sum());
}

/// Adds the flux density J(x) = (i hbar / 2m)[(dPsi)^dagger Psi - Psi^dagger dPsi]
/// at x, times `weight`, to a quadratic-form matrix.
inline void add_flux(CMatrix& Kc, const GaussianKernels& k, double x, double mass, double weight = 1.0) {
  const Complex c = kI * (kHbar / (2.0 * mass)) * weight;
  Kc(k.derivative_mode(x), k.value_mode(x)) += c;
  Kc(k.value_mode(x), k.derivative_mode(x)) -= c;
}

inline double density_from_kernels(const GaussianKernels& k, double x) {
  const auto a = k.value_mode(x);
  return std::real(k.N(a, a));
}

inline double flux_from_kernels(const GaussianKernels& k, double x, double mass) {
  CMatrix Kc = CMatrix::Zero(k.size(), k.size());
  add_flux(Kc, k, x, mass);
  return quadratic_form_mean(k, Kc);
}

inline double flux_variance_from_kernels(const GaussianKernels& k, double x, double mass) {
  CMatrix Kc = CMatrix::Zero(k.size(), k.size());
  add_flux(Kc, k, x, mass);
  return quadratic_form_variance(k, Kc);
}

struct FluxDifference {
  double variance = 0.0;         // V(|J(x0)| - |J(-x0)|) = V(J(x0) + J(-x0))
  double signed_variance = 0.0;  // V(J(x0) - J(-x0))
  double baseline = 0.0;         // 2 V(J(x0))
  std::optional<double> ratio;   // variance / baseline
  std::optional<double> signed_ratio;
};

/// Twin-beam flux-difference noise. The beams travel in opposite directions,
/// so the difference of the beam fluxes is J(x0) + J(-x0); the literal signed
/// difference is reported alongside.
inline FluxDifference flux_difference_variance(const GaussianKernels& k, double x0, double mass) {
  const auto n = k.size();
  CMatrix plus = CMatrix::Zero(n, n);
  add_flux(plus, k, x0, mass);
  const double single = quadratic_form_variance(k, plus);
  CMatrix minus = plus;
  add_flux(plus, k, -x0, mass);
  add_flux(minus, k, -x0, mass, -1.0);
  FluxDifference out;
  out.variance = quadratic_form_variance(k, plus);
  out.signed_variance = quadratic_form_variance(k, minus);
  out.baseline = 2.0 * single;
  if (out.baseline > 0.0) {
    out.ratio = out.variance / out.baseline;
    out.signed_ratio = out.signed_variance / out.baseline;
  }
  return out;
}

/// rho(x) = <Psi^dagger(x) Psi(x)> for the twin-beam state.
inline RVector opo_density(const OpoSolution& sol, std::span<const double> xs) {
  const auto K = static_cast<Eigen::Index>(sol.field_modes());
  CMatrix W(static_cast<Eigen::Index>(xs.size()), K);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    W.row(static_cast<Eigen::Index>(i)) = sol.lattice.value_weights(xs[i]).transpose();
  }
  return (W * sol.B.topRows(K)).rowwise().squaredNorm();
}

// ---------------------------------------------------------------------------
// EPR quadratures

enum class CarrierConvention {
  signed_beam,  // carrier +k_beam on the right window, -k_beam on the left
  literal,      // carrier +k_beam on both windows
};

/// Quadrature windows x in [x_inner, x_outer] (the "+" beam) and
/// [-x_outer, -x_inner] (the "-" beam).
struct EprWindow {
  double x_inner = 0.8e-3;
  double x_outer = 1.8e-3;
  double k_beam = 1.6e7;
  double omega_a = 20.0;
  CarrierConvention carrier = CarrierConvention::signed_beam;

  void validate(const MomentumLattice& lattice) const {
    if (!(x_outer > x_inner && x_inner > 0.0)) throw DomainError("EPR window needs x_outer > x_inner > 0");
    if (!lattice.window_contains(x_outer)) {
      throw DomainError("EPR window reaches " + std::to_string(x_outer) +
                        " m, outside the periodic window of half-width " +
                        std::to_string(0.5 * lattice.window()) + " m");
    }
  }
};

/// Coefficients l_k with u = int L^* Psi dx = sum_k l_k b_k, projected onto the
/// lattice and normalised so that [u, u^dagger] = 1 exactly.
inline CVector window_mode(const MomentumLattice& lattice, const EprWindow& w, bool right, double t) {
  const double a = right ? w.x_inner : -w.x_outer;
  const double b = right ? w.x_outer : -w.x_inner;
  const double kappa = (right || w.carrier == CarrierConvention::literal) ? w.k_beam : -w.k_beam;
  const double ell = b - a;
  const double mid = 0.5 * (a + b);
  const auto n = static_cast<Eigen::Index>(lattice.size());
  CVector l(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q = lattice.k(static_cast<std::size_t>(i)) - kappa;
    // int_a^b exp(i q x) dx
    const double half = 0.5 * q * ell;
    const double amp = std::abs(half) < 1e-8 ? ell : 2.0 * std::sin(half) / q;
    l[i] = std::exp(kI * (q * mid + w.omega_a * t)) * amp;
  }
  const double norm = l.norm();
  if (!(norm > 0.0)) throw DomainError("EPR window mode has no overlap with the lattice");
  return l / norm;
}

struct EprResult {
  double VXm = 0.0, VYm = 0.0, VXp = 0.0, VYp = 0.0;
  std::optional<double> Vinf_Xm, Vinf_Ym, product;
  double plain_product_m() const { return VXm * VYm; }
  double plain_product_p() const { return VXp * VYp; }
};

/// Symmetrised covariance Re<A B> of A = lam u_a + conj(lam) u_a^dagger and
/// B = mu u_b + conj(mu) u_b^dagger.
inline double quadrature_covariance(const GaussianKernels& k, Eigen::Index a, Complex lam, Eigen::Index b,
                                    Complex mu) {
  const Complex ab = lam * mu * k.M(a, b) + lam * std::conj(mu) * k.Aa(a, b) +
                     std::conj(lam) * mu * k.N(a, b) + std::conj(lam * mu) * std::conj(k.M(b, a));
  return std::real(ab);
}

/// Kernels of the two window modes: index 0 is u_-, index 1 is u_+.
inline EprResult epr_from_kernels(const GaussianKernels& k) {
  const Complex X{1.0, 0.0};
  const Complex Y{0.0, 1.0};  // Y = i(u - u^dagger)
  EprResult r;
  r.VXm = quadrature_covariance(k, 0, X, 0, X);
  r.VYm = quadrature_covariance(k, 0, Y, 0, Y);
  r.VXp = quadrature_covariance(k, 1, X, 1, X);
  r.VYp = quadrature_covariance(k, 1, Y, 1, Y);
  const double xm_yp = quadrature_covariance(k, 0, X, 1, Y);
  const double ym_xp = quadrature_covariance(k, 0, Y, 1, X);
  if (r.VYp > 0.0) r.Vinf_Xm = r.VXm - xm_yp * xm_yp / r.VYp;
  if (r.VXp > 0.0) r.Vinf_Ym = r.VYm - ym_xp * ym_xp / r.VXp;
  if (r.Vinf_Xm && r.Vinf_Ym) r.product = *r.Vinf_Xm * *r.Vinf_Ym;
  return r;
}

inline GaussianKernels window_kernels(const OpoSolution& sol, const EprWindow& w) {
  w.validate(sol.lattice);
  const auto K = static_cast<Eigen::Index>(sol.field_modes());
  CMatrix L(2, K);
  L.row(0) = window_mode(sol.lattice, w, false, sol.t).transpose();
  L.row(1) = window_mode(sol.lattice, w, true, sol.t).transpose();
  return kernels_from_linear_modes(L * sol.A.topRows(K), L * sol.B.topRows(K), {"u_minus", "u_plus"});
}

inline EprResult epr_inference(const OpoSolution& sol, const EprWindow& w) {
  return epr_from_kernels(window_kernels(sol, w));
}

}  // namespace atomlaser

#endif  // ATOMLASER_OBSERVABLES_HPP_
