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

#pragma once

// Two-polarization Fock states of n photons in one spatial mode.
//
// A state is stored in the occupation basis |k, n-k>, k = number of H
// photons. Every state used by the toolkit has real amplitudes in this
// basis, so no complex arithmetic is needed.

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "bbm92/error.hpp"

namespace bbm92 {

enum class Basis { Z, X };
enum class Bit { Zero = 0, One = 1 };

inline constexpr Basis kBases[] = {Basis::Z, Basis::X};
inline constexpr Bit kBits[] = {Bit::Zero, Bit::One};

constexpr int to_int(Bit b) { return static_cast<int>(b); }
constexpr Bit flip(Bit b) { return b == Bit::Zero ? Bit::One : Bit::Zero; }
constexpr Bit bit_xor(Bit a, Bit b) {
  return static_cast<Bit>(to_int(a) ^ to_int(b));
}

inline std::string to_string(Basis w) { return w == Basis::Z ? "Z" : "X"; }

// Largest photon number handled. Binomial coefficients stay exact in a
// double well past this.
inline constexpr int kMaxPhotons = 32;

class PolarizedFockState {
 public:
  PolarizedFockState(int photons, Eigen::VectorXd amplitudes)
      : photons_(photons), amplitudes_(std::move(amplitudes)) {
    detail::require(photons_ >= 1 && photons_ <= kMaxPhotons,
                    "photon number must lie in [1, 32]");
    detail::require(amplitudes_.size() == photons_ + 1,
                    "amplitude vector must have n+1 entries");
    detail::require(std::abs(amplitudes_.norm() - 1.0) <= 1e-12,
                    "Fock state amplitudes must have unit norm");
  }

  // Normalizes `raw` first; rejects a zero vector.
  static PolarizedFockState normalized(int photons, Eigen::VectorXd raw) {
    const double norm = raw.norm();
    detail::require(norm > 1e-12, "cannot normalize a zero state vector");
    return PolarizedFockState(photons, raw / norm);
  }

  int photons() const { return photons_; }
  int dim() const { return photons_ + 1; }
  const Eigen::VectorXd& amplitudes() const { return amplitudes_; }

 private:
  int photons_;
  Eigen::VectorXd amplitudes_;
};

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// |0_Z> = |H,n>, |1_Z> = |V,n>, |0_X> = |D+,n>, |1_X> = |D-,n>.
// Expanding (a_H +/- a_V)^n / sqrt(2^n n!) gives amplitude
// (+/-1)^(n-k) sqrt(C(n,k) / 2^n) on |k H, n-k V>.
inline PolarizedFockState basis_state(int photons, Basis w, Bit b) {
  detail::require(photons >= 1 && photons <= kMaxPhotons,
                  "photon number must lie in [1, 32]");
  Eigen::VectorXd amp = Eigen::VectorXd::Zero(photons + 1);
  if (w == Basis::Z) {
    amp(b == Bit::Zero ? photons : 0) = 1.0;
  } else {
    const double scale = std::ldexp(1.0, -photons);
    for (int k = 0; k <= photons; ++k) {
      const double sign = (b == Bit::One && (photons - k) % 2 == 1) ? -1.0 : 1.0;
      amp(k) = sign * std::sqrt(binomial(photons, k) * scale);
    }
  }
  return PolarizedFockState(photons, std::move(amp));
}

inline double inner_product(const PolarizedFockState& lhs,
                            const PolarizedFockState& rhs) {
  detail::require(lhs.photons() == rhs.photons(),
                  "inner product of states with different photon numbers");
  return lhs.amplitudes().dot(rhs.amplitudes());
}

// Photon numbers n_1, n_2, ... of the occupied modes; all parts >= 1.
class ModePartition {
 public:
  explicit ModePartition(std::vector<int> parts) : parts_(std::move(parts)) {
    detail::require(!parts_.empty(), "mode partition must not be empty");
    for (int p : parts_) detail::require(p >= 1, "mode occupation must be >= 1");
    detail::require(total() <= kMaxPhotons, "partition exceeds 32 photons");
  }

  const std::vector<int>& parts() const { return parts_; }
  int total() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }

  // Dimension of the product state space, prod(n_j + 1).
  long long dim() const {
    long long d = 1;
    for (int p : parts_) d *= p + 1;
    return d;
  }

 private:
  std::vector<int> parts_;
};

// Overlap of two basis states whose photons are spread over several modes.
// Each mode carries basis_state(n_j, w, b); the overlap factorizes. The
// result is checked against the single-mode overlap with n = sum n_j.
inline double multimode_inner_product(const ModePartition& partition, Basis w1,
                                      Bit b1, Basis w2, Bit b2) {
  double product = 1.0;
  for (int part : partition.parts()) {
    product *= inner_product(basis_state(part, w1, b1), basis_state(part, w2, b2));
  }
  const int n = partition.total();
  const double single = inner_product(basis_state(n, w1, b1), basis_state(n, w2, b2));
  if (std::abs(product - single) > 1e-12) {
    throw NumericalError("multimode overlap disagrees with single-mode overlap");
  }
  return product;
}

}  // namespace bbm92
