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

#ifndef ATOMLASER_OPTICS_HPP_
#define ATOMLASER_OPTICS_HPP_

#include <cmath>
#include <cstdint>
#include <string_view>

#include "atomlaser/common.hpp"

namespace atomlaser {

enum class OpticalStateKind { coherent, fock, squeezed };

inline std::string_view to_string(OpticalStateKind kind) {
  switch (kind) {
    case OpticalStateKind::coherent: return "coherent";
    case OpticalStateKind::fock: return "fock";
    case OpticalStateKind::squeezed: return "squeezed";
  }
  return "?";
}

/// Photon-number mean and variance of the initial probe state. The
/// single-probe observables depend on the optical state only through these.
struct OpticalStateMoments {
  double mean_n = 0.0;
  double var_n = 0.0;
  OpticalStateKind kind = OpticalStateKind::coherent;
};

inline OpticalStateMoments coherent(double alpha_sq) {
  if (!(alpha_sq >= 0.0) || !std::isfinite(alpha_sq)) {
    throw DomainError("coherent state needs |alpha|^2 >= 0");
  }
  return {alpha_sq, alpha_sq, OpticalStateKind::coherent};
}

inline OpticalStateMoments fock(std::uint64_t n) {
  return {static_cast<double>(n), 0.0, OpticalStateKind::fock};
}

/// Displaced squeezed state D(alpha) S(r)|0> with the displacement along the
/// squeezed (amplitude) quadrature; r > 0 gives sub-Poissonian statistics.
inline OpticalStateMoments squeezed(double alpha_sq, double r) {
  if (!(alpha_sq >= 0.0) || !std::isfinite(alpha_sq) || !std::isfinite(r)) {
    throw DomainError("squeezed state needs |alpha|^2 >= 0 and finite r");
  }
  const double sh = std::sinh(r);
  const double ch = std::cosh(r);
  return {alpha_sq + sh * sh, alpha_sq * std::exp(-2.0 * r) + 2.0 * sh * sh * ch * ch,
          OpticalStateKind::squeezed};
}

}  // namespace atomlaser

#endif  // ATOMLASER_OPTICS_HPP_
