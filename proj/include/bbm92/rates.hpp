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

// Scalar rate formulas for the discard protocol: binary entropy, the
// mixed-parity trade-off curve g, the privacy-amplification cost tau(delta,
// eps) in closed form and by direct hull maximization, its attack-induced
// lower bound tau_low, and the final key fraction.
//
// All logarithms are base 2.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "bbm92/error.hpp"
#include "bbm92/optimize.hpp"

namespace bbm92::rates {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double binary_entropy(double x) {
  detail::require(x >= 0.0 && x <= 1.0, "binary entropy argument outside [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// x g(d / x) for 0 <= 3d <= x, in the cancellation-free form
// (x - 3d)^2 / (2(x - d) + 4 sqrt(d (x - 2d))) of (x - d)/2 - sqrt(d (x - 2d)).
inline double weighted_g(double x, double d) {
  const double root = std::sqrt(std::max(d * (x - 2.0 * d), 0.0));
  const double denom = 2.0 * (x - d) + 4.0 * root;
  if (denom <= 0.0) return 0.0;
  const double gap = x - 3.0 * d;
  return gap * gap / denom;
}

// Lower boundary of the multiphoton error fraction for mixed-parity photon
// numbers: g(d) = (1 - d)/2 - sqrt(d (1 - 2d)), defined on [0, 1/3].
inline double g(double delta) {
  detail::require(delta >= 0.0 && delta <= 1.0 / 3.0 + 1e-15,
                  "g is defined on [0, 1/3]");
  return weighted_g(1.0, delta);
}

// Root of 16 x (1 - x)^3 = 1 in (0, 1/2). The polynomial also hits 1 at
// x = 1/2, so the bracket stops at 0.4.
inline double eps1_star() {
  static const double root = optimize::bisect(
      [](double x) { return 16.0 * x * std::pow(1.0 - x, 3) - 1.0; }, 1e-6, 0.4,
      1e-17);
  return root;
}

struct RegionBConstants {
  double c1, c2, c3;
};

inline RegionBConstants region_b_constants() {
  const double e = eps1_star();
  const double h = binary_entropy(e);
  return {3.0 - 4.0 * h + 4.0 * e, 4.0 * (1.0 - h), h - 4.0 * e};
}

enum class Region { A, B, C, Infeasible };

inline std::string to_string(Region r) {
  switch (r) {
    case Region::A: return "a";
    case Region::B: return "b";
    case Region::C: return "c";
    case Region::Infeasible: return "infeasible";
  }
  return "infeasible";
}

// Observed double-click and error fractions among the N same-basis events
// where both parties detected photons.
class ObservedStats {
 public:
  ObservedStats(double delta, double eps,
                std::optional<std::uint64_t> events = std::nullopt)
      : delta_(delta), eps_(eps), events_(events) {
    detail::require(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
    detail::require(eps >= 0.0 && eps < 1.0, "eps must lie in [0, 1)");
    detail::require(delta + eps <= 1.0 + 1e-12, "delta + eps must not exceed 1");
  }

  double delta() const { return delta_; }
  double eps() const { return eps_; }
  std::optional<std::uint64_t> events() const { return events_; }
  double qber() const { return eps_ / (1.0 - delta_); }

 private:
  double delta_;
  double eps_;
  std::optional<std::uint64_t> events_;
};

// Unobservable decomposition: multiphoton fraction xi with its double-click
// and error fractions, and the single-photon error fraction eps_1.
struct HiddenParams {
  double xi = 0.0;
  double delta_m = 0.0;
  double eps_m = 0.0;
  double eps_1 = 0.0;

  ObservedStats observed() const {
    detail::require(xi >= 0.0 && xi <= 1.0, "xi must lie in [0, 1]");
    return ObservedStats(xi * delta_m, (1.0 - xi) * eps_1 + xi * eps_m);
  }
};

// --- tau, region by region --------------------------------------------------

// Region (a): mixture of single-photon events and the odd-odd point
// (1/4, 0) with weight 4 delta.
inline double tau_region_a(double delta, double eps) {
  const double rest = 1.0 - 4.0 * delta;
  if (rest <= 0.0) return 3.0 * delta;
  return 3.0 * delta + rest * binary_entropy(std::min(eps / rest, 1.0));
}

inline double tau_region_b(double delta, double eps) {
  const auto [c1, c2, c3] = region_b_constants();
  return (c1 * delta + c2 * eps + c3) / (1.0 - 4.0 * eps1_star());
}

inline double region_a_upper(double delta) { return eps1_star() * (1.0 - 4.0 * delta); }
inline double region_c_lower(double delta) {
  return (1.0 - 6.0 * delta) * eps1_star() + 0.5 * delta;
}
inline double region_b_upper(double delta) {
  return std::min(region_c_lower(delta), 0.25 - delta);
}

struct TauLowOptions {
  int grid = 512;
  double xi_tol = 1e-12;
};

// Objective of the attack bound at a given multiphoton fraction xi:
// xi - delta + (1 - xi) H((eps - xi g(delta/xi)) / (1 - xi)).
// Empty when xi is outside [3 delta, 1] or the entropy argument leaves [0, 1].
// The xi -> 0 (delta = 0) and xi -> 1 limits use their explicit values.
inline std::optional<double> tau_low_objective(double delta, double eps, double xi) {
  if (xi < 0.0 || xi > 1.0) return std::nullopt;
  if (xi == 0.0) {
    if (delta != 0.0) return std::nullopt;
    return binary_entropy(eps);
  }
  if (delta > xi / 3.0 * (1.0 + 1e-15)) return std::nullopt;
  const double xi_g = weighted_g(xi, delta);
  if (xi == 1.0) {
    if (std::abs(eps - xi_g) > 1e-12) return std::nullopt;
    return 1.0 - delta;
  }
  const double arg = (eps - xi_g) / (1.0 - xi);
  if (arg < 0.0 || arg > 1.0) return std::nullopt;
  return xi - delta + (1.0 - xi) * binary_entropy(arg);
}

struct TauLowResult {
  double tau;
  double xi;
};

// Maximizes tau_low_objective over its feasible xi interval. The interval is
// [3 delta, xi_max], with xi_max found by bisection since both entropy-argument
// constraints are monotone in xi.
inline std::optional<TauLowResult> tau_low_detailed(const ObservedStats& stats,
                                                    const TauLowOptions& opt = {}) {
  const double delta = stats.delta();
  const double eps = stats.eps();
  if (delta > 1.0 / 3.0) return std::nullopt;
  const double lo = 3.0 * delta;
  auto feasible = [&](double xi) {
    return tau_low_objective(delta, eps, xi).has_value();
  };
  if (!feasible(lo)) return std::nullopt;
  // Strictly below 1 the objective is defined on a prefix of [lo, 1).
  const double below_one = std::nextafter(1.0, 0.0);
  const double hi = feasible(below_one)
                        ? below_one
                        : optimize::last_true(feasible, lo, below_one, 1e-16);
  auto objective = [&](double xi) {
    return tau_low_objective(delta, eps, xi).value_or(kNegInf);
  };
  optimize::Extremum best =
      optimize::grid_then_golden_maximize(objective, lo, hi, opt.grid, opt.xi_tol);
  if (const auto at_one = tau_low_objective(delta, eps, 1.0);
      at_one && *at_one > best.value) {
    best = {1.0, *at_one};
  }
  if (!std::isfinite(best.value)) return std::nullopt;
  return TauLowResult{best.value, best.x};
}

inline std::optional<double> tau_low(const ObservedStats& stats,
                                     const TauLowOptions& opt = {}) {
  const auto r = tau_low_detailed(stats, opt);
  if (!r) return std::nullopt;
  return r->tau;
}

// Largest eps at which tau is defined: g up to delta = 1/6, where regions
// (b) and (c) meet, then the region-(b) edge 1/4 - delta.
inline double eps_upper_limit(double delta) {
  if (delta < 0.0 || delta > 0.25) return kNaN;
  return delta <= 1.0 / 6.0 ? g(delta) : 0.25 - delta;
}

inline double tau_region_c(double delta, double eps) {
  if (!(delta <= 1.0 / 6.0 && eps >= region_c_lower(delta) - 1e-12 &&
        eps <= g(delta) + 1e-12)) {
    throw Infeasible("point lies outside region (c)");
  }
  const auto t = tau_low(ObservedStats(delta, std::min(eps, g(delta))));
  if (!t) throw Infeasible("attack bound undefined at this point");
  return *t;
}

struct TauResult {
  double tau = kNaN;
  Region region = Region::Infeasible;
  bool feasible() const { return region != Region::Infeasible; }
};

// Piecewise closed form. Conditions are tested in the order (a), (b), (c);
// within 1e-12 of an (a)/(b) or (b)/(c) boundary both formulas are evaluated,
// required to agree within 1e-9, and the smaller value is reported.
inline TauResult tau_closed_form(const ObservedStats& stats) {
  const double delta = stats.delta();
  double eps = stats.eps();
  constexpr double kEdge = 1e-12;
  constexpr double kAgree = 1e-9;
  if (delta > 0.25) return {};
  // Points within rounding of the upper limit are evaluated on it.
  const double top = eps_upper_limit(delta);
  if (eps > top + kEdge) return {};
  eps = std::min(eps, top);

  auto tie = [&](double first, double second) {
    if (std::abs(first - second) > kAgree) {
      throw NumericalError("tau regions disagree at their common boundary");
    }
    return std::min(first, second);
  };

  const double a_up = region_a_upper(delta);
  if (eps <= a_up) {
    double t = tau_region_a(delta, eps);
    if (a_up - eps <= kEdge && 0.25 - delta > kEdge) t = tie(t, tau_region_b(delta, eps));
    return {t, Region::A};
  }
  const double b_up = region_b_upper(delta);
  const double c_lo = region_c_lower(delta);
  if (eps <= b_up) {
    double t = tau_region_b(delta, eps);
    if (eps - a_up <= kEdge) t = tie(t, tau_region_a(delta, eps));
    if (c_lo - eps <= kEdge && delta <= 1.0 / 6.0 && eps <= g(delta)) {
      t = tie(t, tau_region_c(delta, eps));
    }
    return {t, Region::B};
  }
  if (eps >= c_lo && delta <= 1.0 / 3.0 && eps <= g(delta)) {
    double t = tau_region_c(delta, eps);
    if (eps - c_lo <= kEdge) t = tie(t, tau_region_b(delta, eps));
    return {t, Region::C};
  }
  return {};
}

// --- independent hull maximization ------------------------------------------

namespace hull {

// Least multiphoton error fraction reachable at double-click fraction
// delta_m by mixing one point (d_c, g(d_c)) of the curve with the odd-odd
// point (1/4, 0): minimize over the weight mu of (1/4, 0) the value
// (1 - mu) g((delta_m - mu/4) / (1 - mu)). The objective is a perspective of
// the convex g, hence convex in mu.
inline double min_multiphoton_error(double delta_m) {
  if (delta_m < 0.0 || delta_m > 1.0 / 3.0 + 1e-15) return kNaN;
  const double mu_hi =
      delta_m <= 0.25 ? 4.0 * delta_m : std::min(1.0, 4.0 - 12.0 * delta_m);
  auto value = [&](double mu) {
    const double w = 1.0 - mu;
    const double x = delta_m - 0.25 * mu;
    if (w <= 1e-15) return 0.0;
    const double dc = std::clamp(x / w, 0.0, 1.0 / 3.0);
    return w * rates::g(dc);
  };
  if (mu_hi <= 0.0) return value(0.0);
  const double interior = optimize::golden_minimize(value, 0.0, mu_hi, 1e-13).value;
  return std::min({interior, value(0.0), value(mu_hi)});
}

}  // namespace hull

// tau as the maximum of (1 - xi) H(eps_1) + xi (1 - delta_m) over every
// decomposition consistent with the observed (delta, eps), where the
// multiphoton point is any mixture of the g curve and (1/4, 0) and
// eps_1 <= 1/2. With delta = xi delta_m the multiphoton term is xi - delta.
// The outer xi search is a grid of `resolution` points plus golden refinement;
// the inner mixture weight is found by golden section. Makes no use of the
// closed-form region boundaries.
inline std::optional<double> tau_numeric(const ObservedStats& stats,
                                         int resolution = 2000) {
  const double delta = stats.delta();
  const double eps = stats.eps();
  if (delta > 1.0 / 3.0) return std::nullopt;
  const double lo = 3.0 * delta;

  auto value = [&](double xi) -> double {
    if (xi <= 0.0) {
      if (delta != 0.0) return kNegInf;
      return binary_entropy(std::min(eps, 0.5));
    }
    const double delta_m = std::min(delta / xi, 1.0 / 3.0);
    const double eps_m = hull::min_multiphoton_error(delta_m);
    if (xi >= 1.0) return eps >= eps_m - 1e-12 ? 1.0 - delta : kNegInf;
    // Rounding slack scales with xi so that xi -> 0 stays exact.
    if (xi * eps_m > eps + 1e-14 * xi) return kNegInf;
    const double eps_1 = (eps - xi * eps_m) / (1.0 - xi);
    return xi - delta + (1.0 - xi) * binary_entropy(std::clamp(eps_1, 0.0, 0.5));
  };
  auto feasible = [&](double xi) { return value(xi) > kNegInf; };
  if (!feasible(lo)) return std::nullopt;
  const double hi = optimize::last_true(feasible, lo, 1.0, 1e-16);
  const optimize::Extremum best =
      optimize::grid_then_golden_maximize(value, lo, hi, resolution, 1e-13);
  if (!std::isfinite(best.value)) return std::nullopt;
  return best.value;
}

// --- key fraction -------------------------------------------------------------

struct KeyRateResult {
  double tau = kNaN;
  Region region = Region::Infeasible;
  double r_key = kNaN;
  double f_ec = 1.0;
  bool feasible = false;
  // False when the (possibly negative) key fraction leaves no key.
  bool has_key = false;
};

inline double key_fraction(const ObservedStats& stats, double f, double tau) {
  const double kept = 1.0 - stats.delta();
  const double qber = stats.qber();
  detail::require(qber <= 0.5 + 1e-12, "QBER eps/(1-delta) exceeds 1/2");
  return kept * (1.0 - f * binary_entropy(std::min(qber, 0.5))) - tau;
}

// R = (1 - delta)[1 - f H(eps/(1 - delta))] - tau(delta, eps).
inline KeyRateResult key_rate(const ObservedStats& stats, double f = 1.0) {
  detail::require(f >= 1.0, "error-correction inefficiency f must be >= 1");
  KeyRateResult out;
  out.f_ec = f;
  const TauResult t = tau_closed_form(stats);
  out.region = t.region;
  if (!t.feasible()) return out;
  out.tau = t.tau;
  out.r_key = key_fraction(stats, f, t.tau);
  out.feasible = true;
  out.has_key = out.r_key > 0.0;
  return out;
}

// Key fraction with tau replaced by tau_low: an upper bound on any protocol
// whose single-photon privacy amplification costs H(eps_1).
inline std::optional<double> key_rate_upper(const ObservedStats& stats,
                                            double f = 1.0) {
  detail::require(f >= 1.0, "error-correction inefficiency f must be >= 1");
  const auto t = tau_low(stats);
  if (!t) return std::nullopt;
  return key_fraction(stats, f, *t);
}

// CONJECTURED rate of the random-bit-assignment variant, 1 - 2H(eps + delta/2).
// Not proved secure; callers must label it as such.
inline double conjectured_random_assignment_rate(const ObservedStats& stats) {
  const double x = stats.eps() + 0.5 * stats.delta();
  detail::require(x <= 0.5 + 1e-15, "eps + delta/2 must not exceed 1/2");
  return 1.0 - 2.0 * binary_entropy(std::min(x, 0.5));
}

}  // namespace bbm92::rates
