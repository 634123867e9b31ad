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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "atomlaser/grids.hpp"

namespace atomlaser {
namespace {

constexpr double kPi = std::numbers::pi;

CVector random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  CVector v(static_cast<Eigen::Index>(n));
  for (auto& c : v) c = {d(rng), d(rng)};
  return v;
}

// Direct O(n^2) evaluation of the discrete transform.
Complex direct_position(const MomentumField& f, double x) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    s += f.values[static_cast<Eigen::Index>(i)] * std::exp(kI * (f.grid.k(i) * x));
  }
  return s * f.grid.dk() / std::sqrt(2.0 * kPi);
}

TEST(MomentumGrid, SamplesAndSpacing) {
  const MomentumGrid g(16, 3.0, 8.0);
  EXPECT_DOUBLE_EQ(g.dk(), 1.0);
  EXPECT_DOUBLE_EQ(g.k(0), -5.0);
  EXPECT_DOUBLE_EQ(g.k(15) - g.k(0), 15.0 * g.dk());
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g.k(i), g.k(i - 1));
}

TEST(MomentumGrid, RejectsBadSizes) {
  EXPECT_THROW(MomentumGrid(4, 0.0, 1.0), DomainError);
  EXPECT_THROW(MomentumGrid(24, 0.0, 1.0), DomainError);
  EXPECT_THROW(MomentumGrid(16, 0.0, 0.0), DomainError);
  EXPECT_THROW(MomentumGrid(16, 0.0, -1.0), DomainError);
}

TEST(MomentumGrid, MirrorIsExactReflection) {
  const MomentumGrid g(64, 1.6e7, 5e4);
  const MomentumGrid m = g.mirrored();
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_DOUBLE_EQ(m.k(i), -g.k(g.size() - 1 - i));
}

TEST(PositionGrid, ConjugatePairRelation) {
  const MomentumGrid g(128, 0.0, 2.0e4);
  const PositionGrid x(g);
  EXPECT_NEAR(x.dx() * g.dk() * static_cast<double>(g.size()), 2.0 * kPi, 1e-12);
  EXPECT_NEAR(x.window(), 2.0 * kPi / g.dk(), 1e-12 * x.window());
  EXPECT_DOUBLE_EQ(x.x(g.size() / 2), 0.0);
}

TEST(GridField, RejectsNonFiniteAndWrongLength) {
  const MomentumGrid g(8, 0.0, 1.0);
  EXPECT_THROW(MomentumField(g, CVector::Zero(7)), DomainError);
  CVector v = CVector::Zero(8);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(MomentumField(g, v), DomainError);
}

TEST(Integrate, ConstantGivesWidth) {
  const MomentumGrid g(32, 1.0, 4.0);
  const MomentumField f(g, CVector::Ones(32));
  EXPECT_NEAR(std::real(integrate(f)), 8.0, 1e-12);
}

TEST(Integrate, NormalisedGaussian) {
  const MomentumGrid g(256, 0.0, 10.0);
  CVector v(256);
  for (std::size_t i = 0; i < 256; ++i) v[static_cast<Eigen::Index>(i)] = std::exp(-g.k(i) * g.k(i)) / std::sqrt(kPi);
  EXPECT_NEAR(std::real(integrate(MomentumField(g, v))), 1.0, 1e-10);
}

TEST(Integrate, OddFunctionVanishes) {
  // k_1..k_{n-1} pair up about 0; the unpaired k_0 = -3 sits where the
  // integrand is negligible.
  const MomentumGrid g(64, 0.0, 3.0);
  CVector v(64);
  for (std::size_t i = 0; i < 64; ++i) v[static_cast<Eigen::Index>(i)] = g.k(i) * std::exp(-4.0 * g.k(i) * g.k(i));
  EXPECT_NEAR(std::abs(integrate(MomentumField(g, v))), 0.0, 1e-12);
}

TEST(Integrate, LinearAndConjugateSymmetric) {
  const MomentumGrid g(16, 0.0, 1.0);
  const CVector a = random_values(16, 1);
  const CVector b = random_values(16, 2);
  const Complex s{0.3, -1.7};
  const Complex lhs = integrate(MomentumField(g, a + s * b));
  const Complex rhs = integrate(MomentumField(g, a)) + s * integrate(MomentumField(g, b));
  EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(integrate(MomentumField(g, a.conjugate())) - std::conj(integrate(MomentumField(g, a)))), 0.0,
              1e-14);
}

TEST(ToPosition, MatchesDirectSum) {
  const MomentumGrid g(64, 1.6e7, 8e4);
  const MomentumField f(g, random_values(64, 7));
  const PositionField p = to_position(f);
  for (std::size_t j = 0; j < 64; j += 5) {
    const Complex ref = direct_position(f, p.grid.x(j));
    EXPECT_NEAR(std::abs(p.values[static_cast<Eigen::Index>(j)] - ref), 0.0, 1e-10 * std::abs(ref) + 1e-14);
  }
}

TEST(ToPosition, SpikeBecomesPlaneWave) {
  const MomentumGrid g(64, 2.0, 8.0);
  const std::size_t i0 = 37;
  CVector v = CVector::Zero(64);
  v[i0] = 1.0 / g.dk();
  const PositionField p = to_position(MomentumField(g, v));
  for (std::size_t j = 0; j < 64; ++j) {
    const Complex ref = std::exp(kI * (g.k(i0) * p.grid.x(j))) / std::sqrt(2.0 * kPi);
    EXPECT_NEAR(std::abs(p.values[static_cast<Eigen::Index>(j)] - ref), 0.0, 1e-10);
  }
}

TEST(ToPosition, GaussianPair) {
  // psi(k) = (2 pi s^2)^(-1/4) exp(-(k-k0)^2 / 4 s^2) maps to a Gaussian of
  // x-width 1 / (2 s) with carrier exp(i k0 x).
  const double s = 1.0e3;
  const double k0 = 2.0e4;
  const MomentumGrid g(512, k0, 20.0 * s);
  CVector v(512);
  for (std::size_t i = 0; i < 512; ++i) {
    const double q = g.k(i) - k0;
    v[static_cast<Eigen::Index>(i)] = std::pow(2.0 * kPi * s * s, -0.25) * std::exp(-q * q / (4.0 * s * s));
  }
  const PositionField p = to_position(MomentumField(g, v));
  const double sx = 1.0 / (2.0 * s);
  for (std::size_t j = 0; j < 512; j += 7) {
    const double x = p.grid.x(j);
    const Complex ref = std::pow(2.0 * kPi * sx * sx, -0.25) * std::exp(-x * x / (4.0 * sx * sx)) *
                        std::exp(kI * (k0 * x));
    EXPECT_NEAR(std::abs(p.values[static_cast<Eigen::Index>(j)] - ref), 0.0, 1e-10 * std::pow(sx, -0.5));
  }
}

TEST(ToPosition, ParsevalAndRoundTrip) {
  const MomentumGrid g(128, -3.0e5, 6.0e4);
  const MomentumField f(g, random_values(128, 11));
  const PositionField p = to_position(f);
  const double nk = std::real(integrate(MomentumField(g, f.values.cwiseAbs2().cast<Complex>())));
  const double nx = std::real(integrate(PositionField(p.grid, p.values.cwiseAbs2().cast<Complex>())));
  EXPECT_NEAR(nx, nk, 1e-10 * nk);
  const MomentumField back = to_momentum(p);
  EXPECT_LT((back.values - f.values).cwiseAbs().maxCoeff(), 1e-12 * f.values.cwiseAbs().maxCoeff());
}

TEST(SpectralDerivative, PlaneWave) {
  const MomentumGrid g(64, 0.0, 32.0);
  const PositionGrid xg(g);
  const double k0 = g.k(40);
  CVector v(64);
  for (std::size_t j = 0; j < 64; ++j) v[static_cast<Eigen::Index>(j)] = std::exp(kI * (k0 * xg.x(j)));
  const PositionField d = spectral_derivative(PositionField(xg, v));
  EXPECT_LT((d.values - kI * k0 * v).cwiseAbs().maxCoeff(), 1e-10 * std::abs(k0));
}

TEST(SpectralDerivative, ConstantGivesZero) {
  const MomentumGrid g(32, 0.0, 16.0);
  const PositionField d = spectral_derivative(PositionField(PositionGrid(g), CVector::Constant(32, 2.5)));
  EXPECT_LT(d.values.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpectralDerivative, GaussianEnvelopeWithCarrier) {
  const MomentumGrid g(512, 0.0, 200.0);
  const PositionGrid xg(g);
  const double k0 = 40.0;
  const double w = 0.2;
  CVector v(512), ref(512);
  for (std::size_t j = 0; j < 512; ++j) {
    const double x = xg.x(j);
    const Complex psi = std::exp(-x * x / (2.0 * w * w)) * std::exp(kI * (k0 * x));
    v[static_cast<Eigen::Index>(j)] = psi;
    ref[static_cast<Eigen::Index>(j)] = (kI * k0 - x / (w * w)) * psi;
  }
  const PositionField d = spectral_derivative(PositionField(xg, v));
  EXPECT_LT((d.values - ref).cwiseAbs().maxCoeff(), 1e-8 * ref.cwiseAbs().maxCoeff());
}

TEST(MomentumLattice, TwinBandsAndWeights) {
  const MomentumGrid upper(32, 1.6e7, 5e4);
  const MomentumLattice lat = MomentumLattice::twin(upper);
  ASSERT_EQ(lat.size(), 64u);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_DOUBLE_EQ(lat.k(i), -lat.k(63 - i));
  // Value weights reproduce the direct transform of the upper band alone.
  CVector b = CVector::Zero(64);
  const CVector u = random_values(32, 3);
  b.tail(32) = u * std::sqrt(upper.dk());
  const double x = 1.1e-3;
  const Complex viaLattice = lat.value_weights(x).transpose() * b;
  EXPECT_NEAR(std::abs(viaLattice - direct_position(MomentumField(upper, u), x)), 0.0, 1e-12 * u.norm());
}

TEST(MomentumLattice, RejectsOverlapAndMixedSpacing) {
  const MomentumGrid a(16, 0.0, 8.0);
  EXPECT_THROW(MomentumLattice(std::vector{a, MomentumGrid(16, 4.0, 8.0)}), DomainError);
  EXPECT_THROW(MomentumLattice(std::vector{a, MomentumGrid(16, 100.0, 4.0)}), DomainError);
}

}  // namespace
}  // namespace atomlaser
