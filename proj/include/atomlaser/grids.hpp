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

// Uniform momentum/position lattices and the transforms between them.
//
// Convention: a field sampled on a MomentumGrid represents psi(k) with the
// continuum normalisation, so that the discrete delta is delta_{ij}/dk.
// The position representation is
//
//   Psi(x) = 1/sqrt(2 pi) * sum_i psi(k_i) exp(i k_i x) dk,
//
// evaluated on the conjugate PositionGrid (dx * dk * n = 2 pi), where it is an
// exact unitary map up to the sqrt(dk), sqrt(dx) weights.

#ifndef ATOMLASER_GRIDS_HPP_
#define ATOMLASER_GRIDS_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "atomlaser/common.hpp"

namespace atomlaser {

class MomentumGrid {
 public:
  MomentumGrid(std::size_t n, double k_center, double k_halfwidth)
      : n_(n), center_(k_center), halfwidth_(k_halfwidth) {
    if (n < 8 || (n & (n - 1)) != 0) {
      throw DomainError("momentum grid size must be a power of two >= 8, got " +
                        std::to_string(n));
    }
    if (!(k_halfwidth > 0.0) || !std::isfinite(k_halfwidth) || !std::isfinite(k_center)) {
      throw DomainError("momentum grid half-width must be positive and finite");
    }
    dk_ = 2.0 * halfwidth_ / static_cast<double>(n_);
  }

  std::size_t size() const { return n_; }
  double center() const { return center_; }
  double halfwidth() const { return halfwidth_; }
  double dk() const { return dk_; }
  double spacing() const { return dk_; }
  double first() const { return center_ - halfwidth_; }
  double k(std::size_t i) const { return first() + static_cast<double>(i) * dk_; }

  RVector samples() const {
    RVector out(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) out[static_cast<Eigen::Index>(i)] = k(i);
    return out;
  }

  /// Grid with the same spacing whose samples are the negatives of this one's.
  MomentumGrid mirrored() const {
    // -k_{n-1-i} = -(first + (n-1-i) dk) = (-center + dk - halfwidth) + i dk
    return MomentumGrid(n_, -center_ + dk_, halfwidth_);
  }

  MomentumGrid refined(std::size_t factor) const {
    return MomentumGrid(n_ * factor, center_, halfwidth_);
  }

  friend bool operator==(const MomentumGrid& a, const MomentumGrid& b) {
    return a.n_ == b.n_ && a.center_ == b.center_ && a.halfwidth_ == b.halfwidth_;
  }

 private:
  std::size_t n_;
  double center_;
  double halfwidth_;
  double dk_;
};

/// Position lattice conjugate to a MomentumGrid, centred on x = 0.
class PositionGrid {
 public:
  explicit PositionGrid(const MomentumGrid& conjugate)
      : conjugate_(conjugate),
        dx_(2.0 * std::numbers::pi / (static_cast<double>(conjugate.size()) * conjugate.dk())) {}

  std::size_t size() const { return conjugate_.size(); }
  double dx() const { return dx_; }
  double spacing() const { return dx_; }
  /// Width of the periodic window, 2 pi / dk.
  double window() const { return dx_ * static_cast<double>(size()); }
  double x(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(size() / 2)) * dx_;
  }
  double first() const { return x(0); }
  double last() const { return x(size() - 1); }
  bool contains(double x0) const { return x0 >= first() && x0 <= last(); }
  const MomentumGrid& conjugate() const { return conjugate_; }

  RVector samples() const {
    RVector out(static_cast<Eigen::Index>(size()));
    for (std::size_t j = 0; j < size(); ++j) out[static_cast<Eigen::Index>(j)] = x(j);
    return out;
  }

  friend bool operator==(const PositionGrid& a, const PositionGrid& b) {
    return a.conjugate_ == b.conjugate_;
  }

 private:
  MomentumGrid conjugate_;
  double dx_;
};

template <class Grid>
struct GridField {
  Grid grid;
  CVector values;

  GridField(Grid g, CVector v) : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != grid.size()) {
      throw DomainError("field length does not match its grid");
    }
    if (!values.allFinite()) throw DomainError("field contains non-finite samples");
  }
};

using MomentumField = GridField<MomentumGrid>;
using PositionField = GridField<PositionGrid>;

/// Riemann sum of the samples times the grid spacing.
template <class Grid>
Complex integrate(const GridField<Grid>& field) {
  return field.values.sum() * field.grid.spacing();
}

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

}  // namespace detail

inline PositionField to_position(const MomentumField& field) {
  const MomentumGrid& kg = field.grid;
  const PositionGrid xg(kg);
  const auto n = static_cast<Eigen::Index>(kg.size());
  // k_i x_j = k_0 x_j + 2 pi i j / n - pi i, hence the (-1)^i pre-twiddle.
  CVector staged(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    staged[i] = (i % 2 == 0) ? field.values[i] : -field.values[i];
  }
  CVector out(n);
  detail::fft_engine().inv(out, staged);
  const double scale = kg.dk() / std::sqrt(2.0 * std::numbers::pi);
  for (Eigen::Index j = 0; j < n; ++j) {
    out[j] *= scale * std::exp(kI * (kg.first() * xg.x(static_cast<std::size_t>(j))));
  }
  return {xg, std::move(out)};
}

inline MomentumField to_momentum(const PositionField& field) {
  const PositionGrid& xg = field.grid;
  const MomentumGrid& kg = xg.conjugate();
  const auto n = static_cast<Eigen::Index>(xg.size());
  CVector staged(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    staged[j] = field.values[j] * std::exp(-kI * (kg.first() * xg.x(static_cast<std::size_t>(j))));
  }
  CVector out(n);
  detail::fft_engine().fwd(out, staged);
  const double scale = xg.dx() / std::sqrt(2.0 * std::numbers::pi);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] *= (i % 2 == 0) ? scale : -scale;
  }
  return {kg, std::move(out)};
}

/// d/dx by multiplication with i k on the conjugate momentum grid.
inline PositionField spectral_derivative(const PositionField& field) {
  MomentumField spectrum = to_momentum(field);
  for (std::size_t i = 0; i < spectrum.grid.size(); ++i) {
    spectrum.values[static_cast<Eigen::Index>(i)] *= kI * spectrum.grid.k(i);
  }
  return to_position(spectrum);
}

/// Concatenation of equally spaced momentum bands sharing one spacing dk.
///
/// A single-band lattice is an ordinary MomentumGrid. The twin-beam model
/// keeps two disjoint bands around +/- k_beam; position-space values then sum
/// the contributions of every band.
class MomentumLattice {
 public:
  explicit MomentumLattice(const MomentumGrid& grid) : MomentumLattice(std::vector{grid}) {}

  explicit MomentumLattice(std::vector<MomentumGrid> bands) : bands_(std::move(bands)) {
    if (bands_.empty()) throw DomainError("momentum lattice needs at least one band");
    dk_ = bands_.front().dk();
    std::size_t total = 0;
    for (const auto& b : bands_) {
      if (std::abs(b.dk() - dk_) > 1e-12 * dk_) {
        throw DomainError("all bands of a momentum lattice must share one spacing");
      }
      total += b.size();
    }
    k_.resize(static_cast<Eigen::Index>(total));
    Eigen::Index at = 0;
    for (const auto& b : bands_) {
      for (std::size_t i = 0; i < b.size(); ++i) k_[at++] = b.k(i);
    }
    for (Eigen::Index i = 1; i < k_.size(); ++i) {
      if (!(k_[i] > k_[i - 1])) throw DomainError("momentum lattice bands overlap or are unsorted");
    }
  }

  /// Two mirror-image bands: the given upper band and its reflection k -> -k.
  static MomentumLattice twin(const MomentumGrid& upper) {
    return MomentumLattice(std::vector{upper.mirrored(), upper});
  }

  std::size_t size() const { return static_cast<std::size_t>(k_.size()); }
  double dk() const { return dk_; }
  double k(std::size_t i) const { return k_[static_cast<Eigen::Index>(i)]; }
  const RVector& samples() const { return k_; }
  const std::vector<MomentumGrid>& bands() const { return bands_; }

  /// Periodic window of the position representation, 2 pi / dk, centred on 0.
  double window() const { return 2.0 * std::numbers::pi / dk_; }
  bool window_contains(double x) const { return std::abs(x) <= 0.5 * window(); }

  /// Weights r_i such that Psi(x) = sum_i r_i b_i for normalised amplitudes
  /// b_i = sqrt(dk) psi(k_i).
  CVector value_weights(double x) const {
    const double w = std::sqrt(dk_ / (2.0 * std::numbers::pi));
    CVector r(k_.size());
    for (Eigen::Index i = 0; i < k_.size(); ++i) r[i] = w * std::exp(kI * (k_[i] * x));
    return r;
  }

  /// Weights for d Psi / dx at x.
  CVector derivative_weights(double x) const {
    CVector r = value_weights(x);
    for (Eigen::Index i = 0; i < k_.size(); ++i) r[i] *= kI * k_[i];
    return r;
  }

 private:
  std::vector<MomentumGrid> bands_;
  RVector k_;
  double dk_ = 0.0;
};

}  // namespace atomlaser

#endif  // ATOMLASER_GRIDS_HPP_
