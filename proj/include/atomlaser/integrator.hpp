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

// Pieces shared by the two mode-function propagators: frame selection, the
// explicit RK4 stability bound, and the snapshot schedule.

#ifndef ATOMLASER_INTEGRATOR_HPP_
#define ATOMLASER_INTEGRATOR_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "atomlaser/common.hpp"

namespace atomlaser {

enum class Frame {
  lab,          // full generator, diagonal phases integrated by RK4
  interaction,  // diagonal phases removed analytically; RK4 sees only couplings
};

struct PropagatorOptions {
  Frame frame = Frame::interaction;
  unsigned workers = 0;          // 0: resolve_workers()
  double norm_tolerance = 1e-3;  // per-step drift of a conserved column norm
};

/// Classical RK4 stability limit on the imaginary axis is 2 sqrt(2).
inline constexpr double kRk4StabilityBound = 2.8;

inline void check_stability(double rate, double dt, const char* what) {
  if (!(std::abs(dt) * rate <= kRk4StabilityBound)) {
    throw StepSizeError(std::string(what) + ": |dt| * rate = " + std::to_string(std::abs(dt) * rate) +
                        " exceeds the RK4 stability bound " + std::to_string(kRk4StabilityBound));
  }
}

/// Sorted, de-duplicated snapshot times within [0, t_final]. An empty request
/// means a single snapshot at t_final.
inline std::vector<double> snapshot_schedule(double t_final, std::span<const double> requested) {
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw DomainError("t_final must be >= 0");
  std::vector<double> times(requested.begin(), requested.end());
  if (times.empty()) times.push_back(t_final);
  for (double t : times) {
    if (!(t >= 0.0 && t <= t_final)) {
      throw DomainError("snapshot time " + std::to_string(t) + " outside [0, t_final]");
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

/// Marches from t = 0 through every snapshot time with steps of dt, shortening
/// the last step before each snapshot so it lands exactly on it.
/// advance(t, h) moves the state from t to t + h; emit(t) publishes a snapshot.
template <class Advance, class Emit>
void march(double t_final, double dt, std::span<const double> requested, Advance&& advance, Emit&& emit) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  const std::vector<double> times = snapshot_schedule(t_final, requested);
  double anchor = 0.0;
  for (double target : times) {
    long steps = 0;
    double t = anchor;
    while (target - t > dt * (1.0 + 1e-9)) {
      advance(t, dt);
      ++steps;
      t = anchor + static_cast<double>(steps) * dt;
    }
    const double rest = target - t;
    if (rest > 1e-12 * dt) advance(t, rest);
    anchor = target;
    emit(target);
  }
}

}  // namespace atomlaser

#endif  // ATOMLASER_INTEGRATOR_HPP_
