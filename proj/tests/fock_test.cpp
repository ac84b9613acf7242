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
#include <vector>

#include "bbm92/fock.hpp"
#include "bbm92/linalg.hpp"
#include "oracles.hpp"

namespace bbm92 {
namespace {

double law(int n, Bit b, Bit bp) {
  const double sign = (to_int(b) * to_int(bp) * n) % 2 ? -1.0 : 1.0;
  return sign * std::pow(2.0, -0.5 * n);
}

// All compositions of n into positive parts.
void compositions(int n, std::vector<int>& prefix, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(prefix);
    return;
  }
  for (int first = 1; first <= n; ++first) {
    prefix.push_back(first);
    compositions(n - first, prefix, out);
    prefix.pop_back();
  }
}

TEST(Binomial, MatchesLgammaOracle) {
  for (int n = 0; n <= kMaxPhotons; ++n)
    for (int k = 0; k <= n; ++k) EXPECT_EQ(binomial(n, k), oracle::choose(n, k)) << n << "," << k;
  EXPECT_EQ(binomial(4, -1), 0.0);
  EXPECT_EQ(binomial(4, 5), 0.0);
}

TEST(BasisState, ZStatesAreHorizontalAndVertical) {
  for (int n = 1; n <= 8; ++n) {
    const auto z0 = basis_state(n, Basis::Z, Bit::Zero).amplitudes();
    const auto z1 = basis_state(n, Basis::Z, Bit::One).amplitudes();
    EXPECT_EQ(z0(n), 1.0);
    EXPECT_EQ(z1(0), 1.0);
    EXPECT_DOUBLE_EQ(z0.norm(), 1.0);
    EXPECT_DOUBLE_EQ(z1.norm(), 1.0);
  }
}

TEST(BasisState, XAmplitudesMatchBinomialExpansion) {
  for (int n = 1; n <= 12; ++n) {
    for (int b = 0; b < 2; ++b) {
      const auto v = basis_state(n, Basis::X, static_cast<Bit>(b)).amplitudes();
      const auto ref = oracle::basis_vector(n, true, b);
      EXPECT_LE((v - ref).cwiseAbs().maxCoeff(), 1e-14) << "n=" << n << " b=" << b;
    }
  }
}

TEST(InnerProduct, CrossBasisLawUpToEightPhotons) {
  for (int n = 1; n <= 8; ++n) {
    for (Bit b : kBits) {
      for (Bit bp : kBits) {
        EXPECT_NEAR(inner_product(basis_state(n, Basis::X, b), basis_state(n, Basis::Z, bp)),
                    law(n, b, bp), 1e-12)
            << "n=" << n;
        // Independent vectors.
        const double ref = oracle::basis_vector(n, true, to_int(b))
                               .dot(oracle::basis_vector(n, false, to_int(bp)));
        EXPECT_NEAR(ref, law(n, b, bp), 1e-12);
      }
    }
  }
}

TEST(InnerProduct, SameBasisStatesAreOrthonormal) {
  for (int n = 1; n <= 10; ++n) {
    for (Basis w : kBases) {
      EXPECT_NEAR(inner_product(basis_state(n, w, Bit::Zero), basis_state(n, w, Bit::One)), 0.0,
                  1e-14);
      EXPECT_NEAR(inner_product(basis_state(n, w, Bit::One), basis_state(n, w, Bit::One)), 1.0,
                  1e-14);
    }
  }
}

TEST(InnerProduct, RejectsPhotonNumberMismatch) {
  EXPECT_THROW(inner_product(basis_state(2, Basis::Z, Bit::Zero), basis_state(3, Basis::Z, Bit::Zero)),
               InvalidArgument);
}

TEST(Multimode, EveryPartitionOfUpToSixPhotonsGivesTheSingleModeValue) {
  for (int n = 1; n <= 6; ++n) {
    std::vector<int> prefix;
    std::vector<std::vector<int>> parts;
    compositions(n, prefix, parts);
    for (const auto& p : parts) {
      const ModePartition partition(p);
      EXPECT_EQ(partition.total(), n);
      for (Bit b : kBits) {
        for (Bit bp : kBits) {
          EXPECT_NEAR(multimode_inner_product(partition, Basis::X, b, Basis::Z, bp), law(n, b, bp),
                      1e-12);
          // Explicit product states on the full multimode space.
          Eigen::VectorXd x = Eigen::VectorXd::Ones(1), z = Eigen::VectorXd::Ones(1);
          for (int part : p) {
            x = kron(x, oracle::basis_vector(part, true, to_int(b)));
            z = kron(z, oracle::basis_vector(part, false, to_int(bp)));
          }
          EXPECT_EQ(x.size(), partition.dim());
          EXPECT_NEAR(x.dot(z), law(n, b, bp), 1e-12);
        }
      }
    }
  }
}

TEST(PolarizedFockState, ValidatesNormAndDimension) {
  Eigen::VectorXd v(3);
  v << 1.0, 1.0, 0.0;
  EXPECT_THROW(PolarizedFockState(2, v), InvalidArgument);
  EXPECT_THROW(PolarizedFockState(3, v.normalized()), InvalidArgument);
  EXPECT_THROW(PolarizedFockState(0, Eigen::VectorXd::Ones(1)), InvalidArgument);
  const auto s = PolarizedFockState::normalized(2, v);
  EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-15);
  EXPECT_EQ(s.dim(), 3);
  EXPECT_THROW(PolarizedFockState::normalized(2, Eigen::VectorXd::Zero(3)), InvalidArgument);
}

TEST(ModePartition, RejectsEmptyOrZeroParts) {
  EXPECT_THROW(ModePartition({}), InvalidArgument);
  EXPECT_THROW(ModePartition({2, 0}), InvalidArgument);
  EXPECT_THROW(ModePartition({20, 20}), InvalidArgument);
}

TEST(Bits, Helpers) {
  EXPECT_EQ(flip(Bit::Zero), Bit::One);
  EXPECT_EQ(bit_xor(Bit::One, Bit::One), Bit::Zero);
  EXPECT_EQ(to_string(Basis::X), "X");
}

}  // namespace
}  // namespace bbm92
