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

// Quick invariant suite behind `bbm92 selftest`. Each check is a reduced
// version of a property exercised in full by the test binaries.

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bbm92/attack.hpp"
#include "bbm92/fock.hpp"
#include "bbm92/povm.hpp"
#include "bbm92/rates.hpp"
#include "bbm92/sim.hpp"

namespace bbm92::selftest {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace impl {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline CheckResult inner_product_law() {
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    for (Bit b : kBits) {
      for (Bit bp : kBits) {
        auto law = [&](int photons) {
          return ((to_int(b) * to_int(bp) * photons) % 2 ? -1.0 : 1.0) *
                 std::pow(2.0, -0.5 * photons);
        };
        const double got = inner_product(basis_state(n, Basis::X, b),
                                         basis_state(n, Basis::Z, bp));
        worst = std::max(worst, std::abs(got - law(n)));
        const ModePartition split({1, n});
        worst = std::max(worst, std::abs(multimode_inner_product(split, Basis::X, b,
                                                                 Basis::Z, bp) -
                                         law(n + 1)));
      }
    }
  }
  return {"inner-product law", worst <= 1e-12, "max deviation " + sci(worst)};
}

inline CheckResult povm_completeness() {
  double worst = 0.0;
  for (int na = 1; na <= 7; ++na) {
    for (int nb = 1; (na + 1) * (nb + 1) <= 64; ++nb) {
      const povm::PhotonPair p{na, nb};
      const Matrix sum = povm::f_cor(p).matrix() + povm::f_err(p).matrix() +
                         povm::f_dbl(p).matrix();
      worst = std::max(worst, (sum - Matrix::Identity(p.dim(), p.dim())).cwiseAbs().maxCoeff());
    }
  }
  return {"POVM completeness", worst <= 1e-12, "max deviation " + sci(worst)};
}

inline CheckResult odd_odd_bound() {
  double worst = 0.0;
  for (int na = 1; na <= 8; na += 2) {
    for (int nb = 1; na + nb <= 9; nb += 2) {
      if (na + nb < 3) continue;
      const int l = (na - 1) / 2 + (nb - 1) / 2;
      const double expected = 0.5 * (1.0 - std::ldexp(1.0, -l));
      worst = std::max(worst, std::abs(povm::min_double_click({na, nb}) - expected));
    }
  }
  return {"odd-odd double-click bound", worst <= 1e-9, "max deviation " + sci(worst)};
}

inline CheckResult boundary_tightness() {
  double worst = 0.0;
  for (const auto& s : povm::trace_boundary({1, 2})) {
    const double d = std::max(s.point.delta_m, 0.0);
    if (d <= 1.0 / 3.0) worst = std::max(worst, std::abs(s.point.eps_m - rates::g(d)));
  }
  return {"(1,2) boundary equals g", worst <= 1e-5, "max deviation " + sci(worst)};
}

inline CheckResult region_soundness() {
  int outside = 0, total = 0;
  for (const povm::PhotonPair p : {povm::PhotonPair{1, 2}, {2, 2}, {1, 3}, {3, 3}, {2, 3},
                                   {1, 4}, {2, 5}}) {
    for (const auto& pt : povm::random_state_points(p, 1000, 7)) {
      ++total;
      if (!povm::region_membership(pt, 1e-8)) ++outside;
    }
  }
  return {"random states stay in region", outside == 0,
          std::to_string(outside) + " of " + std::to_string(total) + " outside"};
}

inline CheckResult eps1_star_root() {
  const double x = rates::eps1_star();
  const double residual = std::abs(16.0 * x * std::pow(1.0 - x, 3) - 1.0);
  return {"eps1* root", residual <= 1e-10 && std::abs(x - 0.080) <= 5e-4,
          "eps1* = " + format_number(x)};
}

inline CheckResult tau_consistency() {
  double worst = 0.0, dominance = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double delta = 0.25 * i / 9.0;
    const double top = delta <= 1.0 / 6.0 ? rates::g(delta) : 0.25 - delta;
    for (int j = 0; j < 10; ++j) {
      const rates::ObservedStats s(delta, top * j / 9.0);
      const auto closed = rates::tau_closed_form(s);
      if (!closed.feasible()) return {"tau closed form = hull maximum", false, "infeasible grid point"};
      worst = std::max(worst, std::abs(closed.tau - rates::tau_numeric(s, 400).value_or(1e9)));
      if (const auto low = rates::tau_low(s)) dominance = std::max(dominance, *low - closed.tau);
    }
  }
  return {"tau closed form = hull maximum", worst <= 1e-5 && dominance <= 1e-9,
          "max deviation " + sci(worst) + ", max tau_low excess " + sci(dominance)};
}

inline CheckResult key_rate_anchors() {
  double worst = std::abs(rates::key_rate({0.0, 0.0}).r_key - 1.0);
  for (int i = 0; i <= 25; ++i) {
    const double delta = 0.01 * i;
    worst = std::max(worst, std::abs(rates::key_rate({delta, 0.0}).r_key - (1.0 - 4.0 * delta)));
  }
  return {"key-rate anchors at eps = 0", worst <= 1e-12, "max deviation " + sci(worst)};
}

inline CheckResult attack_saturation() {
  double worst = 0.0, accuracy = 1.0;
  for (const auto& p : attack::sweep(64)) {
    accuracy = std::min(accuracy, p.outcome.eve_bit_accuracy);
    const double d = std::max(p.outcome.delta_m, 0.0);
    if (p.lower_branch && d <= 1.0 / 3.0) {
      worst = std::max(worst, std::abs(p.outcome.eps_m - rates::g(d)));
    }
  }
  const double v_defect = attack::defining_relation_defect(attack::build_v(1, 2), 1, 2);
  return {"attack saturates g", worst <= 1e-5 && accuracy >= 1.0 - 1e-12 && v_defect <= 1e-10,
          "max deviation " + sci(worst) + ", min accuracy " + format_number(accuracy)};
}

inline CheckResult simulation_determinism() {
  const auto src = sim::SourceModel::werner(0.9);
  const auto a = sim::run_protocol(src, 20000, 11, 1);
  const auto b = sim::run_protocol(src, 20000, 11, 3);
  const auto ideal = sim::run_protocol(sim::SourceModel::ideal_pair(), 20000, 5);
  return {"simulation determinism", a == b && ideal.n_dbl == 0 && ideal.n_err == 0,
          "werner eps_hat " + format_number(a.eps_hat())};
}

}  // namespace impl

inline std::vector<CheckResult> run_all() {
  std::vector<std::function<CheckResult()>> checks = {
      impl::inner_product_law, impl::povm_completeness, impl::odd_odd_bound,
      impl::boundary_tightness, impl::region_soundness, impl::eps1_star_root,
      impl::tau_consistency,   impl::key_rate_anchors,  impl::attack_saturation,
      impl::simulation_determinism};
  std::vector<CheckResult> out;
  for (const auto& check : checks) {
    try {
      out.push_back(check());
    } catch (const std::exception& e) {
      out.push_back({"(exception)", false, e.what()});
    }
  }
  return out;
}

}  // namespace bbm92::selftest
