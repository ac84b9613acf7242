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

// Eve's parity attack on odd-even photon pairs. A unitary V acting on
// Alice's and Bob's photons copies Alice's bit onto Bob's in both bases at
// once (a basis-independent controlled-NOT); paired with an A-E maximally
// entangled state and a probe state chi on Bob's side, it lets Eve learn
// Alice's bit exactly while (delta_m, eps_m) depend on chi alone.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "bbm92/error.hpp"
#include "bbm92/fock.hpp"
#include "bbm92/linalg.hpp"
#include "bbm92/optimize.hpp"
#include "bbm92/povm.hpp"
#include "bbm92/rates.hpp"

namespace bbm92::attack {

// Pure state on a tensor product; subsystem 0 is the most significant index.
class JointState {
 public:
  JointState(std::vector<int> dims, Vector amplitudes)
      : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
    Eigen::Index total = 1;
    for (int d : dims_) {
      detail::require(d >= 1, "subsystem dimension must be >= 1");
      total *= d;
    }
    detail::require(total == amplitudes_.size(), "dimension product mismatch");
    detail::require(std::abs(amplitudes_.norm() - 1.0) <= 1e-12,
                    "joint state must have unit norm");
  }

  const std::vector<int>& dims() const { return dims_; }
  const Vector& amplitudes() const { return amplitudes_; }

  // Density matrix of the first `keep` subsystems.
  Matrix reduced_density(std::size_t keep) const {
    Eigen::Index kept = 1;
    for (std::size_t i = 0; i < keep; ++i) kept *= dims_[i];
    const Eigen::Index rest = amplitudes_.size() / kept;
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>
        m(amplitudes_.data(), kept, rest);
    return m * m.transpose();
  }

 private:
  std::vector<int> dims_;
  Vector amplitudes_;
};

class UnitaryMap {
 public:
  explicit UnitaryMap(Matrix entries) : entries_(std::move(entries)) {
    detail::require(entries_.rows() == entries_.cols(), "unitary must be square");
    const Eigen::Index d = entries_.rows();
    const double defect =
        (entries_.transpose() * entries_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (defect > 1e-10) throw NumericalError("map is not orthogonal");
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  Vector apply(const Vector& v) const { return entries_ * v; }

 private:
  Matrix entries_;
};

namespace impl {

// Columns |a_W>|b_W> (or |a_W>|(a xor b)_W> when `controlled`) over
// W in {Z, X}, a, b in {0, 1}.
inline Matrix defining_states(int n_a, int n_b, bool controlled) {
  Matrix cols((n_a + 1) * (n_b + 1), 8);
  int c = 0;
  for (Basis w : kBases) {
    for (Bit a : kBits) {
      for (Bit b : kBits) {
        const Bit bob = controlled ? bit_xor(a, b) : b;
        cols.col(c++) = kron(basis_state(n_a, w, a).amplitudes(),
                             basis_state(n_b, w, bob).amplitudes());
      }
    }
  }
  return cols;
}

}  // namespace impl

// V with V|a_W>|b_W> = |a_W>|(b + a mod 2)_W> for W = Z and X, built by
// matching the equal Gram matrices of the two eight-vector sets. Both sets
// span the same subspace; V is the identity on its complement.
inline UnitaryMap build_v(int n_a, int n_b, int dim_cap = povm::kDefaultDimCap) {
  detail::require(n_a >= 1 && n_a % 2 == 1, "n_A must be odd");
  detail::require(n_b >= 2 && n_b % 2 == 0, "n_B must be even and >= 2");
  povm::validate({n_a, n_b}, dim_cap);
  const Matrix source = impl::defining_states(n_a, n_b, false);
  const Matrix target = impl::defining_states(n_a, n_b, true);
  return UnitaryMap(gram_match(source, target, 1e-10));
}

// Largest deviation |V s - t| over the eight defining relations.
inline double defining_relation_defect(const UnitaryMap& v, int n_a, int n_b) {
  const Matrix source = impl::defining_states(n_a, n_b, false);
  const Matrix target = impl::defining_states(n_a, n_b, true);
  return (v.matrix() * source - target).cwiseAbs().maxCoeff();
}

// Probe state sum_W (alpha |0_W^(n)> + beta |1_W^(n)>), normalized.
inline PolarizedFockState boundary_state(double alpha, double beta, int n_b = 2) {
  detail::require(n_b >= 2 && n_b % 2 == 0, "probe photon number must be even");
  Vector raw = Vector::Zero(n_b + 1);
  for (Basis w : kBases) {
    raw += alpha * basis_state(n_b, w, Bit::Zero).amplitudes() +
           beta * basis_state(n_b, w, Bit::One).amplitudes();
  }
  detail::require(raw.norm() > 1e-12, "probe state vanishes for this (alpha, beta)");
  return PolarizedFockState::normalized(n_b, std::move(raw));
}

// A (one photon) x B (chi's photons) x E (qubit) state after V acts on A, B
// of |phi+>_AE |chi>_B. E uses the single-photon encoding so that
// |phi+> = (|0_W 0_W> + |1_W 1_W>)/sqrt 2 in both bases.
inline JointState attack_state(const PolarizedFockState& chi, const UnitaryMap& v) {
  const int db = chi.dim();
  detail::require(v.dim() == 2 * db, "V does not match the probe dimension");
  Vector psi = Vector::Zero(2 * db * 2);
  for (int e = 0; e < 2; ++e) {
    // Alice's photon carries the same occupation index as E.
    Vector ab = Vector::Zero(2 * db);
    ab.segment(e * db, db) = chi.amplitudes() / std::sqrt(2.0);
    const Vector moved = v.apply(ab);
    for (Eigen::Index i = 0; i < moved.size(); ++i) psi(i * 2 + e) += moved(i);
  }
  return JointState({2, db, 2}, std::move(psi));
}

inline JointState attack_state(const PolarizedFockState& chi) {
  return attack_state(chi, build_v(1, chi.photons()));
}

struct AttackOutcome {
  double delta_m = 0.0;
  // Fraction of all multiphoton events with a bit error (not conditioned on
  // the absence of double clicks).
  double eps_m = 0.0;
  // Probability that Eve's measurement of E in the announced basis equals
  // Alice's bit, over same-basis events without double clicks.
  double eve_bit_accuracy = 0.0;
};

inline AttackOutcome evaluate_attack(const JointState& state, int n_b) {
  const povm::PhotonPair pair{1, n_b};
  const Matrix rho_ab = state.reduced_density(2);
  AttackOutcome out;
  out.delta_m = povm::f_dbl(pair).expectation_density(rho_ab);
  out.eps_m = povm::f_err(pair).expectation_density(rho_ab);

  double agree = 0.0, total = 0.0;
  for (Basis w : kBases) {
    for (Bit a : kBits) {
      for (Bit b : kBits) {
        for (Bit e : kBits) {
          const Vector proj = kron(kron(basis_state(1, w, a).amplitudes(),
                                        basis_state(n_b, w, b).amplitudes()),
                                   basis_state(1, w, e).amplitudes());
          const double amp = proj.dot(state.amplitudes());
          const double p = 0.5 * amp * amp;
          total += p;
          if (a == e) agree += p;
        }
      }
    }
  }
  out.eve_bit_accuracy = total > 0.0 ? agree / total : 0.0;
  return out;
}

inline AttackOutcome run_attack(const PolarizedFockState& chi) {
  detail::require(chi.photons() % 2 == 0, "probe must carry an even photon number");
  return evaluate_attack(attack_state(chi), chi.photons());
}

struct SweepPoint {
  double alpha = 0.0;
  double beta = 0.0;
  AttackOutcome outcome;
  // eps_m <= (1 - delta_m)/2: the point lies on the g side of the traced
  // ellipse rather than its mirror image.
  bool lower_branch = false;
};

// (alpha, beta) = (cos t, sin t) for t = pi k / count, k = 0..count-1.
inline std::vector<SweepPoint> sweep(int count, int n_b = 2) {
  detail::require(count >= 1, "sweep needs at least one point");
  const UnitaryMap v = build_v(1, n_b);
  std::vector<SweepPoint> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double t = std::numbers::pi * k / count;
    SweepPoint p{std::cos(t), std::sin(t), {}, false};
    p.outcome = evaluate_attack(attack_state(boundary_state(p.alpha, p.beta, n_b), v), n_b);
    p.lower_branch = p.outcome.eps_m <= 0.5 * (1.0 - p.outcome.delta_m) + 1e-12;
    out.push_back(p);
  }
  return out;
}

// Probe on the lower branch with the requested delta_m in [0, 1/2]. Along
// t in [-pi/4, pi/4], (alpha, beta) = (cos t, sin t) moves delta_m
// monotonically from 1/2 down to 0.
inline PolarizedFockState lower_branch_state(double delta_m) {
  detail::require(delta_m >= 0.0 && delta_m <= 0.5, "delta_m must lie in [0, 1/2]");
  const UnitaryMap v = build_v(1, 2);
  auto delta_at = [&](double t) {
    return evaluate_attack(attack_state(boundary_state(std::cos(t), std::sin(t)), v), 2)
        .delta_m;
  };
  const double quarter = 0.25 * std::numbers::pi;
  const double t = optimize::bisect([&](double s) { return delta_at(s) - delta_m; },
                                    -quarter, quarter, 1e-15);
  return boundary_state(std::cos(t), std::sin(t));
}

// Right-hand side of the secrecy condition, (1 - xi) H(eps_1) + xi (1 - delta_m),
// when the attack runs on a fraction xi of events at delta_m = delta/xi and
// single-photon events carry the remaining errors,
// eps_1 = (eps - xi eps_m)/(1 - xi). Eve knows every multiphoton bit.
inline std::optional<double> realized_objective(double delta, double eps, double xi) {
  if (!(xi > 0.0 && xi < 1.0) || delta / xi > 0.5) return std::nullopt;
  const AttackOutcome o = run_attack(lower_branch_state(delta / xi));
  if (o.eve_bit_accuracy < 1.0 - 1e-12) return std::nullopt;
  const double eps_1 = (eps - xi * o.eps_m) / (1.0 - xi);
  if (eps_1 < 0.0 || eps_1 > 1.0) return std::nullopt;
  return (1.0 - xi) * rates::binary_entropy(eps_1) + xi * (1.0 - o.delta_m);
}

// Odd photon numbers n = 2l + 1 factor as a qubit times an ancilla:
// orthogonal U with U|b_W^(n)> = |b_W^(1)> |phi_W>, <phi_X|phi_Z> = 2^-l.
// The ancilla has dimension (n + 1)/2.
inline Matrix odd_decomposition(int n_a) {
  detail::require(n_a >= 1 && n_a % 2 == 1, "odd photon number required");
  const int l = (n_a - 1) / 2;
  const int anc = (n_a + 1) / 2;
  Vector phi_z = Vector::Zero(anc), phi_x = Vector::Zero(anc);
  phi_z(0) = 1.0;
  const double overlap = std::ldexp(1.0, -l);
  phi_x(0) = overlap;
  if (anc > 1) phi_x(1) = std::sqrt(1.0 - overlap * overlap);
  Matrix source(n_a + 1, 4), target(n_a + 1, 4);
  int c = 0;
  for (Basis w : kBases) {
    for (Bit b : kBits) {
      source.col(c) = basis_state(n_a, w, b).amplitudes();
      target.col(c) = kron(basis_state(1, w, b).amplitudes(), w == Basis::Z ? phi_z : phi_x);
      ++c;
    }
  }
  return gram_match(source, target, 1e-10);
}

// How far V^T F V is from the form 1_qubit (x) M, where F is F_err or F_cor
// and Alice's space is split by odd_decomposition: the largest commutator
// norm with O (x) 1 over the four real 2x2 matrix units O.
inline double qubit_factor_defect(int n_a, int n_b, bool error_operator = true) {
  const UnitaryMap v = build_v(n_a, n_b);
  const povm::PhotonPair pair{n_a, n_b};
  const Matrix f = error_operator ? povm::f_err(pair).matrix() : povm::f_cor(pair).matrix();
  const Matrix u = kron(odd_decomposition(n_a), Matrix::Identity(n_b + 1, n_b + 1));
  const Matrix conj = u * v.matrix().transpose() * f * v.matrix() * u.transpose();
  const int rest = (n_a + 1) / 2 * (n_b + 1);
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Matrix unit = Matrix::Zero(2, 2);
      unit(i, j) = 1.0;
      const Matrix op = kron(unit, Matrix::Identity(rest, rest));
      worst = std::max(worst, (op * conj - conj * op).norm());
    }
  }
  return worst;
}

}  // namespace bbm92::attack
