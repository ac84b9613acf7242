// Copyright 2026 The BBM92 Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bbm92/attack.hpp"
#include "bbm92/rates.hpp"
#include "oracles.hpp"

namespace bbm92::attack {
namespace {

double mirror(double d) { return 1.0 - d - oracle::g(d); }

// Residual of the ellipse (eps - (1 - d)/2)^2 = d (1 - 2d) traced by the
// attack; free of the square root that amplifies rounding near d = 0, 1/2.
double ellipse_residual(double d, double e) {
  const double c = e - 0.5 * (1.0 - d);
  return std::abs(c * c - d * (1.0 - 2.0 * d));
}

TEST(BuildV, SatisfiesDefiningRelations) {
  for (int na : {1, 3, 5}) {
    for (int nb : {2, 4, 6}) {
      if ((na + 1) * (nb + 1) > 64) continue;
      const UnitaryMap v = build_v(na, nb);
      EXPECT_LE(defining_relation_defect(v, na, nb), 1e-10) << na << "," << nb;
      const Matrix m = v.matrix();
      EXPECT_LE((m.transpose() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff(),
                1e-10);
    }
  }
  EXPECT_THROW(build_v(2, 2), InvalidArgument);
  EXPECT_THROW(build_v(1, 3), InvalidArgument);
}

TEST(BuildV, ActsAsCnotOnIndependentBasisVectors) {
  const UnitaryMap v = build_v(1, 2);
  for (int x = 0; x < 2; ++x) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const Vector in = kron(oracle::basis_vector(1, x, a), oracle::basis_vector(2, x, b));
        const Vector out = kron(oracle::basis_vector(1, x, a), oracle::basis_vector(2, x, a ^ b));
        EXPECT_LE((v.apply(in) - out).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(UnitaryMap, RejectsNonOrthogonal) {
  EXPECT_THROW(UnitaryMap(2.0 * Matrix::Identity(2, 2)), NumericalError);
}

TEST(BoundaryState, RejectsZeroAndOddProbes) {
  EXPECT_THROW(boundary_state(0.0, 0.0), InvalidArgument);
  EXPECT_THROW(boundary_state(1.0, 0.0, 3), InvalidArgument);
  EXPECT_NEAR(boundary_state(1.0, 2.0).amplitudes().norm(), 1.0, 1e-15);
}

TEST(RunAttack, ReferencePoints) {
  const auto p10 = run_attack(boundary_state(1.0, 0.0));
  EXPECT_NEAR(p10.delta_m, 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(p10.eps_m, 1.0 / 12.0, 1e-12);
  EXPECT_NEAR(p10.eps_m, oracle::g(p10.delta_m), 1e-12);
  EXPECT_NEAR(p10.eve_bit_accuracy, 1.0, 1e-12);

  const auto p01 = run_attack(boundary_state(0.0, 1.0));
  EXPECT_NEAR(p01.delta_m, 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(p01.eps_m, 0.75, 1e-12);
  EXPECT_NEAR(p01.eps_m, mirror(p01.delta_m), 1e-12);
  EXPECT_NEAR(p01.eve_bit_accuracy, 1.0, 1e-12);

  const auto p11 = run_attack(boundary_state(1.0, 1.0));
  EXPECT_NEAR(p11.delta_m, 0.0, 1e-12);
  EXPECT_NEAR(p11.eps_m, 0.5, 1e-12);
}

TEST(RunAttack, JointStateIsNormalized) {
  const JointState s = attack_state(boundary_state(0.3, -0.8));
  EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-12);
  EXPECT_NEAR(s.reduced_density(2).trace(), 1.0, 1e-12);
  EXPECT_EQ(s.dims(), (std::vector<int>{2, 3, 2}));
}

TEST(Sweep, SaturatesGAndCoversItsDomain) {
  const auto points = sweep(720);
  std::vector<double> covered;
  for (const auto& p : points) {
    EXPECT_NEAR(p.outcome.eve_bit_accuracy, 1.0, 1e-12);
    const double d = std::max(p.outcome.delta_m, 0.0);
    ASSERT_LE(d, 0.5 + 1e-12);
    EXPECT_LE(ellipse_residual(d, p.outcome.eps_m), 1e-12);
    EXPECT_EQ(p.lower_branch, p.outcome.eps_m <= 0.5 * (1.0 - d) + 1e-12);
    if (p.lower_branch && d <= 1.0 / 3.0) {
      EXPECT_NEAR(p.outcome.eps_m, oracle::g(d), 1e-5);
      covered.push_back(d);
    }
  }
  std::sort(covered.begin(), covered.end());
  ASSERT_FALSE(covered.empty());
  EXPECT_LE(covered.front(), 1e-9);
  EXPECT_GE(covered.back(), 1.0 / 3.0 - 5e-3);
  for (std::size_t i = 1; i < covered.size(); ++i) EXPECT_LE(covered[i] - covered[i - 1], 5e-3);
}

TEST(LowerBranchState, HitsRequestedDoubleClickFraction) {
  for (double d : {0.0, 0.05, 1.0 / 6.0, 0.25, 1.0 / 3.0, 0.45}) {
    const auto o = run_attack(lower_branch_state(d));
    EXPECT_NEAR(o.delta_m, d, 1e-10);
    EXPECT_LE(ellipse_residual(o.delta_m, o.eps_m), 1e-12);
    EXPECT_LE(o.eps_m, 0.5 * (1.0 - o.delta_m) + 1e-12);
    if (d <= 1.0 / 3.0) EXPECT_NEAR(o.eps_m, oracle::g(d), 1e-5);
  }
  EXPECT_THROW(lower_branch_state(0.6), InvalidArgument);
}

TEST(RealizedObjective, MatchesAttackBoundObjective) {
  for (double xi : {0.2, 0.4, 0.7}) {
    const auto realized = realized_objective(0.05, 0.1, xi);
    const auto formula = rates::tau_low_objective(0.05, 0.1, xi);
    ASSERT_EQ(realized.has_value(), formula.has_value()) << xi;
    if (realized) EXPECT_NEAR(*realized, *formula, 1e-9) << xi;
  }
  EXPECT_NEAR(realized_objective(0.05, 0.1, 0.4).value(), 0.589451310786, 1e-9);
  EXPECT_FALSE(realized_objective(0.05, 0.1, 0.05));
}

TEST(OddDecomposition, PreservesOverlaps) {
  for (int n : {1, 3, 5, 7}) {
    const Matrix u = odd_decomposition(n);
    EXPECT_LE((u.transpose() * u - Matrix::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff(), 1e-10);
    // U maps X/Z overlaps 2^(-n/2) to the qubit overlap 2^(-1/2) times 2^(-l).
    const double l = (n - 1) / 2;
    const double overlap = (u * oracle::basis_vector(n, true, 0)).dot(u * oracle::basis_vector(n, false, 0));
    EXPECT_NEAR(overlap, std::pow(2.0, -0.5) * std::pow(2.0, -l), 1e-12);
  }
  EXPECT_THROW(odd_decomposition(2), InvalidArgument);
}

TEST(QubitFactor, ErrorAndCorrectOperatorsFactorAfterV) {
  for (int na : {1, 3}) {
    for (int nb : {2, 4}) {
      EXPECT_LE(qubit_factor_defect(na, nb, true), 1e-10) << na << "," << nb;
      EXPECT_LE(qubit_factor_defect(na, nb, false), 1e-10) << na << "," << nb;
    }
  }
}

}  // namespace
}  // namespace bbm92::attack
