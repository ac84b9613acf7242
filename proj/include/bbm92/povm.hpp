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

// Joint measurement operators of the threshold-detector apparatus for a
// fixed photon-number pair (n_A, n_B), and numerical certification of the
// region of multiphoton (double-click, error) fractions they allow.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bbm92/error.hpp"
#include "bbm92/fock.hpp"
#include "bbm92/linalg.hpp"
#include "bbm92/rates.hpp"
#include "bbm92/rng.hpp"

namespace bbm92::povm {

inline constexpr int kDefaultDimCap = 64;

struct PhotonPair {
  int n_a = 1;
  int n_b = 1;

  int dim() const { return (n_a + 1) * (n_b + 1); }
  PhotonPair swapped() const { return {n_b, n_a}; }
  friend bool operator==(const PhotonPair&, const PhotonPair&) = default;
};

inline std::string to_string(const PhotonPair& p) {
  return "(" + std::to_string(p.n_a) + "," + std::to_string(p.n_b) + ")";
}

inline void validate(const PhotonPair& pair, int dim_cap = kDefaultDimCap) {
  detail::require(pair.n_a >= 1 && pair.n_b >= 1, "photon numbers must be >= 1");
  detail::require(pair.n_a <= kMaxPhotons && pair.n_b <= kMaxPhotons,
                  "photon numbers must be <= 32");
  detail::require(pair.dim() <= dim_cap,
                  "joint dimension " + std::to_string(pair.dim()) +
                      " exceeds cap " + std::to_string(dim_cap));
}

enum class ParityCase { SinglePhoton, OddOdd, OddEven, EvenEven };

inline ParityCase parity_case(const PhotonPair& p) {
  const bool odd_a = p.n_a % 2 == 1;
  const bool odd_b = p.n_b % 2 == 1;
  if (p.n_a == 1 && p.n_b == 1) return ParityCase::SinglePhoton;
  if (odd_a && odd_b) return ParityCase::OddOdd;
  if (odd_a != odd_b) return ParityCase::OddEven;
  return ParityCase::EvenEven;
}

struct OutcomeProjectors {
  HermitianOperator zero;
  HermitianOperator one;
  HermitianOperator double_click;  // rank n - 1
};

// Bit outcomes project onto |0_W^(n)> and |1_W^(n)>; the remaining n - 1
// orthogonal directions are double clicks.
inline OutcomeProjectors outcome_projectors(int photons, Basis w) {
  const Vector v0 = basis_state(photons, w, Bit::Zero).amplitudes();
  const Vector v1 = basis_state(photons, w, Bit::One).amplitudes();
  Matrix p0 = outer(v0);
  Matrix p1 = outer(v1);
  Matrix dbl = Matrix::Identity(photons + 1, photons + 1) - p0 - p1;
  return {HermitianOperator(std::move(p0)), HermitianOperator(std::move(p1)),
          HermitianOperator(std::move(dbl))};
}

namespace impl {

// (1/2) sum_W sum_b P(|b_W>_A |(b xor flip_b)_W>_B), A-major indexing.
inline HermitianOperator pair_sum(const PhotonPair& pair, bool flip_b, int dim_cap) {
  validate(pair, dim_cap);
  Matrix acc = Matrix::Zero(pair.dim(), pair.dim());
  for (Basis w : kBases) {
    for (Bit b : kBits) {
      const Bit bob = flip_b ? flip(b) : b;
      const Vector v = kron(basis_state(pair.n_a, w, b).amplitudes(),
                            basis_state(pair.n_b, w, bob).amplitudes());
      acc += 0.5 * outer(v);
    }
  }
  return HermitianOperator(std::move(acc));
}

}  // namespace impl

// Probability operator of a bit error on a same-basis event.
inline HermitianOperator f_err(const PhotonPair& pair, int dim_cap = kDefaultDimCap) {
  return impl::pair_sum(pair, true, dim_cap);
}

// Probability operator of agreeing bits on a same-basis event.
inline HermitianOperator f_cor(const PhotonPair& pair, int dim_cap = kDefaultDimCap) {
  return impl::pair_sum(pair, false, dim_cap);
}

// Probability operator of a double click at either party: 1 - F_cor - F_err.
inline HermitianOperator f_dbl(const PhotonPair& pair, int dim_cap = kDefaultDimCap) {
  validate(pair, dim_cap);
  return HermitianOperator::identity(pair.dim()) - f_cor(pair, dim_cap) -
         f_err(pair, dim_cap);
}

// Smallest multiphoton double-click fraction for an odd-odd pair with
// n_A + n_B >= 3: one minus the top eigenvalue of F_cor + F_err.
inline double min_double_click(const PhotonPair& pair, int dim_cap = kDefaultDimCap) {
  validate(pair, dim_cap);
  detail::require(parity_case(pair) == ParityCase::OddOdd,
                  "min_double_click needs odd n_A, odd n_B with n_A + n_B >= 3");
  return 1.0 - max_eigenvalue(f_cor(pair, dim_cap) + f_err(pair, dim_cap));
}

struct TradeoffPoint {
  double delta_m = 0.0;
  double eps_m = 0.0;
};

struct BoundarySample {
  TradeoffPoint point;
  // Weight lambda of F_dbl in the minimized F_err + lambda F_dbl; +inf marks
  // the pure F_dbl minimization.
  double slope = 0.0;
  // True when the minimum eigenspace was degenerate; the two samples at this
  // slope are then the ends of a flat boundary segment.
  bool facet = false;
};

struct TraceOptions {
  int num_points = 200;
  double lambda_min = 1e-3;
  double lambda_max = 1e3;
  double degeneracy_tol = 1e-10;
  // Slopes are bisected until consecutive samples are at most this far
  // apart in the (delta, eps) plane; 0 disables refinement.
  double max_step = 1e-3;
  int max_refinements = 16;
  int dim_cap = kDefaultDimCap;
};

namespace impl {

struct Operators {
  Matrix err;
  Matrix dbl;
};

inline TradeoffPoint expectation_pair(const Operators& ops, const Vector& psi) {
  return {psi.dot(ops.dbl * psi), psi.dot(ops.err * psi)};
}

// Minimizers of `primary`; a degenerate minimum eigenspace yields the two
// extreme values of `secondary` restricted to it.
inline std::vector<Vector> lowest_face(const Matrix& primary, const Matrix& secondary,
                                       double tol, bool both_ends) {
  const SymmetricEigen eig = eigh(primary);
  Eigen::Index k = 1;
  while (k < eig.values.size() && eig.values(k) - eig.values(0) < tol) ++k;
  if (k == 1) return {eig.vectors.col(0)};
  const Matrix q = eig.vectors.leftCols(k);
  const SymmetricEigen restricted = eigh(q.transpose() * secondary * q);
  std::vector<Vector> out;
  if (both_ends) out.push_back(q * restricted.vectors.col(k - 1));
  out.push_back(q * restricted.vectors.col(0));
  return out;
}

inline std::vector<BoundarySample> samples_at(const Operators& ops, double lambda,
                                              double tol) {
  std::vector<BoundarySample> out;
  if (std::isinf(lambda)) {
    // Vertical supporting line: keep only its lower end.
    const auto face = lowest_face(ops.dbl, ops.err, tol, false);
    out.push_back({expectation_pair(ops, face.front()), lambda, false});
    return out;
  }
  // On a face of F_err + lambda F_dbl, delta_m parameterizes the segment;
  // larger delta_m comes first so samples run along decreasing delta_m.
  const auto face = lowest_face(ops.err + lambda * ops.dbl, ops.dbl, tol, true);
  for (const Vector& v : face) {
    out.push_back({expectation_pair(ops, v), lambda, face.size() > 1});
  }
  return out;
}

inline double gap(const BoundarySample& a, const BoundarySample& b) {
  return std::hypot(a.point.delta_m - b.point.delta_m, a.point.eps_m - b.point.eps_m);
}

}  // namespace impl

// Lower boundary of the reachable {(<F_dbl>, <F_err>)} set for a mixed-parity
// or even-even pair, traced by supporting lines: for each lambda >= 0 the
// ground space of F_err + lambda F_dbl touches the boundary. Samples are
// ordered by increasing lambda, i.e. decreasing delta_m.
inline std::vector<BoundarySample> trace_boundary(const PhotonPair& pair,
                                                  const TraceOptions& opt = {}) {
  validate(pair, opt.dim_cap);
  const ParityCase pc = parity_case(pair);
  detail::require(pc == ParityCase::OddEven || pc == ParityCase::EvenEven,
                  "trace_boundary needs a mixed-parity or even-even pair; use "
                  "min_double_click for odd-odd pairs");
  detail::require(opt.num_points >= 2 && opt.lambda_min > 0.0 &&
                      opt.lambda_max > opt.lambda_min,
                  "invalid slope sweep");
  const impl::Operators ops{f_err(pair, opt.dim_cap).matrix(),
                              f_dbl(pair, opt.dim_cap).matrix()};

  std::vector<double> slopes;
  slopes.push_back(0.0);
  const double log_lo = std::log(opt.lambda_min);
  const double log_hi = std::log(opt.lambda_max);
  for (int i = 0; i < opt.num_points; ++i) {
    slopes.push_back(std::exp(log_lo + (log_hi - log_lo) * i / (opt.num_points - 1)));
  }

  // Each slope contributes one or two samples.
  std::vector<std::vector<BoundarySample>> groups;
  for (double s : slopes) groups.push_back(impl::samples_at(ops, s, opt.degeneracy_tol));

  if (opt.max_step > 0.0) {
    for (int pass = 0; pass < opt.max_refinements; ++pass) {
      std::vector<std::vector<BoundarySample>> refined;
      bool changed = false;
      for (std::size_t i = 0; i < groups.size(); ++i) {
        refined.push_back(groups[i]);
        if (i + 1 == groups.size()) break;
        if (impl::gap(groups[i].back(), groups[i + 1].front()) <= opt.max_step) continue;
        const double a = groups[i].back().slope;
        const double b = groups[i + 1].front().slope;
        const double mid = a == 0.0 ? 0.25 * b : std::sqrt(a * b);
        if (!(mid > a && mid < b)) continue;
        refined.push_back(impl::samples_at(ops, mid, opt.degeneracy_tol));
        changed = true;
      }
      groups = std::move(refined);
      if (!changed) break;
    }
  }
  groups.push_back(impl::samples_at(ops, std::numeric_limits<double>::infinity(),
                                      opt.degeneracy_tol));

  std::vector<BoundarySample> out;
  for (auto& grp : groups) out.insert(out.end(), grp.begin(), grp.end());
  return out;
}

// Lower edge of the allowed multiphoton region: the convex hull of the
// mixed-parity curve eps = g(delta) and the odd-odd corner (1/4, 0). The
// tangent from (1/4, 0) meets g at delta = 1/6 with slope -1.
inline double region_lower_envelope(double delta_m) {
  if (delta_m <= 1.0 / 6.0) return rates::g(std::max(delta_m, 0.0));
  if (delta_m <= 0.25) return 0.25 - delta_m;
  return 0.0;
}

inline bool region_membership(const TradeoffPoint& p, double slack = 0.0) {
  detail::require(p.delta_m >= -slack && p.delta_m <= 1.0 + slack &&
                      p.eps_m >= -slack && p.eps_m <= 1.0 + slack,
                  "trade-off point outside the unit square");
  const double d = std::clamp(p.delta_m, 0.0, 1.0);
  return p.eps_m >= region_lower_envelope(d) - slack;
}

// (<F_dbl>, <F_err>) of `count` Haar-like random pure states (normalized
// Gaussian vectors) on the pair's joint space.
inline std::vector<TradeoffPoint> random_state_points(const PhotonPair& pair, int count,
                                                      std::uint64_t seed,
                                                      int dim_cap = kDefaultDimCap) {
  const impl::Operators ops{f_err(pair, dim_cap).matrix(), f_dbl(pair, dim_cap).matrix()};
  std::vector<TradeoffPoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
    Vector psi(pair.dim());
    for (Eigen::Index k = 0; k < psi.size(); ++k) psi(k) = rng.normal();
    psi.normalize();
    out.push_back(impl::expectation_pair(ops, psi));
  }
  return out;
}

}  // namespace bbm92::povm
