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

// One-dimensional bracketing routines.

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

namespace bbm92::optimize {

// Root of a continuous f on [lo, hi] with f(lo), f(hi) of opposite sign.
// Stops when the bracket is below `tol` or after 200 halvings.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol = 1e-15) {
  double f_lo = f(lo);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Largest x in [lo, hi] with pred(x) true, assuming pred is true on a
// prefix of the interval and pred(lo) holds.
template <typename Pred>
double last_true(Pred&& pred, double lo, double hi, double tol = 1e-15) {
  if (pred(hi)) return hi;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

struct Extremum {
  double x;
  double value;
};

// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <typename F>
Extremum golden_maximize(F&& f, double lo, double hi, double tol = 1e-12) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 300 && b - a > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  Extremum best{c, fc};
  if (fd > best.value) best = {d, fd};
  for (double edge : {lo, hi}) {
    const double fe = f(edge);
    if (fe > best.value) best = {edge, fe};
  }
  return best;
}

template <typename F>
Extremum golden_minimize(F&& f, double lo, double hi, double tol = 1e-12) {
  Extremum e = golden_maximize([&](double x) { return -f(x); }, lo, hi, tol);
  return {e.x, -e.value};
}

// Grid scan with `samples` inclusive points followed by golden refinement of
// the bracket around the best sample.
template <typename F>
Extremum grid_then_golden_maximize(F&& f, double lo, double hi, int samples,
                                   double tol = 1e-12) {
  if (!(hi > lo)) return {lo, f(lo)};
  samples = std::max(samples, 3);
  const double step = (hi - lo) / (samples - 1);
  int best_i = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double x = (i == samples - 1) ? hi : lo + i * step;
    const double v = f(x);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double a = lo + std::max(best_i - 1, 0) * step;
  const double b = std::min(lo + (best_i + 1) * step, hi);
  Extremum refined = golden_maximize(f, a, b, tol);
  const double best_x = (best_i == samples - 1) ? hi : lo + best_i * step;
  if (best_v > refined.value) return {best_x, best_v};
  return refined;
}

}  // namespace bbm92::optimize
