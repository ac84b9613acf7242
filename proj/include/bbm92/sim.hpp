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

// Event-level Monte Carlo of the sift-and-discard protocol with ideal
// threshold detectors. Each event picks a source component, independent
// uniform bases for Alice and Bob, and a joint outcome from the Born rule.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bbm92/attack.hpp"
#include "bbm92/error.hpp"
#include "bbm92/fock.hpp"
#include "bbm92/linalg.hpp"
#include "bbm92/povm.hpp"
#include "bbm92/rates.hpp"
#include "bbm92/rng.hpp"
#include "bbm92/table.hpp"

namespace bbm92::sim {

enum class Outcome { Zero = 0, One = 1, DoubleClick = 2, NoClick = 3 };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Zero: return "0";
    case Outcome::One: return "1";
    case Outcome::DoubleClick: return "double";
    case Outcome::NoClick: return "none";
  }
  return "none";
}

// A photon-number pair with a joint density matrix on its A x B space.
struct SourceComponent {
  double weight = 1.0;
  povm::PhotonPair pair;
  Matrix density;
};

class SourceModel {
 public:
  enum class Kind { IdealPair, Werner, EveAttack, Custom };

  // (|HH> + |VV>)/sqrt 2 on one photon per side.
  static SourceModel ideal_pair() {
    SourceModel s(Kind::IdealPair);
    s.components_.push_back({1.0, {1, 1}, outer(phi_plus())});
    return s;
  }

  // v |phi+><phi+| + (1 - v) 1/4.
  static SourceModel werner(double visibility) {
    detail::require(visibility >= 0.0 && visibility <= 1.0,
                    "visibility must lie in [0, 1]");
    SourceModel s(Kind::Werner);
    s.visibility_ = visibility;
    s.components_.push_back({1.0, {1, 1},
                             visibility * outer(phi_plus()) +
                                 (1.0 - visibility) * 0.25 * Matrix::Identity(4, 4)});
    return s;
  }

  // Ideal single-photon pairs with probability 1 - xi, Eve's attack state
  // (E traced out) with probability xi.
  static SourceModel eve_attack(const PolarizedFockState& chi, double xi) {
    detail::require(xi >= 0.0 && xi <= 1.0, "xi must lie in [0, 1]");
    SourceModel s(Kind::EveAttack);
    s.xi_ = xi;
    s.chi_ = chi;
    if (xi < 1.0) s.components_.push_back({1.0 - xi, {1, 1}, outer(phi_plus())});
    if (xi > 0.0) {
      const attack::JointState st = attack::attack_state(chi);
      s.components_.push_back({xi, {1, chi.photons()}, st.reduced_density(2)});
    }
    return s;
  }

  // Arbitrary mixture; `vacuum_weight` is the probability that no photons
  // reach the detectors. Densities must be PSD with unit trace (1e-10).
  static SourceModel custom(std::vector<SourceComponent> components,
                            double vacuum_weight = 0.0) {
    detail::require(vacuum_weight >= 0.0 && vacuum_weight <= 1.0,
                    "vacuum weight must lie in [0, 1]");
    double total = vacuum_weight;
    for (const auto& c : components) {
      povm::validate(c.pair);
      detail::require(c.weight >= 0.0, "component weights must be non-negative");
      detail::require(c.density.rows() == c.pair.dim() && c.density.cols() == c.pair.dim(),
                      "density dimension does not match the photon pair");
      detail::require((c.density - c.density.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
                      "density must be symmetric");
      detail::require(std::abs(c.density.trace() - 1.0) <= 1e-10,
                      "density must have unit trace");
      detail::require(eigh(c.density).values.minCoeff() >= -1e-10,
                      "density must be positive semidefinite");
      total += c.weight;
    }
    detail::require(std::abs(total - 1.0) <= 1e-10, "weights must sum to 1");
    SourceModel s(Kind::Custom);
    s.components_ = std::move(components);
    s.vacuum_weight_ = vacuum_weight;
    return s;
  }

  Kind kind() const { return kind_; }
  const std::vector<SourceComponent>& components() const { return components_; }
  double vacuum_weight() const { return vacuum_weight_; }
  double visibility() const { return visibility_; }
  double xi() const { return xi_; }
  const std::optional<PolarizedFockState>& chi() const { return chi_; }

  std::string describe() const {
    switch (kind_) {
      case Kind::IdealPair: return "ideal";
      case Kind::Werner: return "werner(v=" + format_number(visibility_) + ")";
      case Kind::EveAttack: return "attack(xi=" + format_number(xi_) + ")";
      case Kind::Custom: return "custom";
    }
    return "custom";
  }

 private:
  explicit SourceModel(Kind k) : kind_(k) {}

  static Vector phi_plus() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v;
  }

  Kind kind_;
  std::vector<SourceComponent> components_;
  double vacuum_weight_ = 0.0;
  double visibility_ = 1.0;
  double xi_ = 0.0;
  std::optional<PolarizedFockState> chi_;
};

// Index of a detected-event cell: bases (wa, wb) and outcomes (oa, ob) in
// {0, 1, double click}.
inline constexpr int kCells = 36;
inline constexpr int cell_index(int wa, int wb, int oa, int ob) {
  return ((wa * 2 + wb) * 3 + oa) * 3 + ob;
}

// Born-rule probabilities of every cell, precomputed per component.
class OutcomeModel {
 public:
  explicit OutcomeModel(const SourceModel& source) : vacuum_(source.vacuum_weight()) {
    for (const auto& c : source.components()) {
      Component comp;
      comp.weight = c.weight;
      std::array<std::array<HermitianOperator, 3>, 2> pa, pb;
      for (int w = 0; w < 2; ++w) {
        const Basis basis = kBases[w];
        const auto a = povm::outcome_projectors(c.pair.n_a, basis);
        const auto b = povm::outcome_projectors(c.pair.n_b, basis);
        pa[w] = {a.zero, a.one, a.double_click};
        pb[w] = {b.zero, b.one, b.double_click};
      }
      for (int wa = 0; wa < 2; ++wa) {
        for (int wb = 0; wb < 2; ++wb) {
          double sum = 0.0;
          for (int oa = 0; oa < 3; ++oa) {
            for (int ob = 0; ob < 3; ++ob) {
              const Matrix op = kron(pa[wa][oa].matrix(), pb[wb][ob].matrix());
              const double p = std::max(0.0, (op.cwiseProduct(c.density)).sum());
              comp.probs[cell_index(wa, wb, oa, ob)] = p;
              sum += p;
            }
          }
          if (std::abs(sum - 1.0) > 1e-9) {
            throw NumericalError("outcome probabilities do not sum to one");
          }
        }
      }
      components_.push_back(comp);
    }
  }

  // Probability of a cell among all events (bases drawn uniformly).
  double cell_probability(int cell) const {
    double p = 0.0;
    for (const auto& c : components_) p += c.weight * 0.25 * c.probs[cell];
    return p;
  }

  double vacuum_weight() const { return vacuum_; }

  struct Draw {
    int component;  // -1 for vacuum
    int wa, wb, oa, ob;
  };

  // Maps four uniforms to an event; always consumes exactly four.
  Draw draw(double u_comp, double u_a, double u_b, double u_cell) const {
    Draw d{-1, u_a < 0.5 ? 0 : 1, u_b < 0.5 ? 0 : 1, 0, 0};
    double acc = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      acc += components_[i].weight;
      if (u_comp < acc || (i + 1 == components_.size() && vacuum_ == 0.0)) {
        d.component = static_cast<int>(i);
        break;
      }
    }
    if (d.component < 0) return d;
    const auto& probs = components_[d.component].probs;
    double cum = 0.0;
    int last_nonzero = 0;
    for (int oa = 0; oa < 3; ++oa) {
      for (int ob = 0; ob < 3; ++ob) {
        const double p = probs[cell_index(d.wa, d.wb, oa, ob)];
        if (p <= 0.0) continue;
        last_nonzero = oa * 3 + ob;
        cum += p;
        if (u_cell < cum) {
          d.oa = oa;
          d.ob = ob;
          return d;
        }
      }
    }
    d.oa = last_nonzero / 3;
    d.ob = last_nonzero % 3;
    return d;
  }

 private:
  struct Component {
    double weight = 0.0;
    std::array<double, kCells> probs{};
  };
  std::vector<Component> components_;
  double vacuum_ = 0.0;
};

struct EventRecord {
  Basis alice_basis = Basis::Z;
  Basis bob_basis = Basis::Z;
  Outcome alice_outcome = Outcome::NoClick;
  Outcome bob_outcome = Outcome::NoClick;
  bool detected = false;
  // Same basis, both detected, neither double-clicked.
  bool sifted = false;
};

inline EventRecord sample_event(const OutcomeModel& model, SplitMix64& rng) {
  const double u0 = rng.uniform(), u1 = rng.uniform(), u2 = rng.uniform(),
               u3 = rng.uniform();
  const OutcomeModel::Draw d = model.draw(u0, u1, u2, u3);
  EventRecord ev;
  ev.alice_basis = kBases[d.wa];
  ev.bob_basis = kBases[d.wb];
  if (d.component < 0) return ev;
  ev.detected = true;
  ev.alice_outcome = static_cast<Outcome>(d.oa);
  ev.bob_outcome = static_cast<Outcome>(d.ob);
  ev.sifted = d.wa == d.wb && d.oa != 2 && d.ob != 2;
  return ev;
}

inline EventRecord sample_event(const SourceModel& source, SplitMix64& rng) {
  return sample_event(OutcomeModel(source), rng);
}

struct SiftedTally {
  std::uint64_t events = 0;
  std::uint64_t undetected = 0;
  std::uint64_t mismatched = 0;  // detected, different bases
  std::uint64_t n = 0;           // detected, same basis
  std::uint64_t n_dbl = 0;
  std::uint64_t n_err = 0;
  std::uint64_t n_cor = 0;
  std::array<std::uint64_t, kCells> cells{};

  void add(const EventRecord& ev) {
    ++events;
    if (!ev.detected) {
      ++undetected;
      return;
    }
    const int wa = ev.alice_basis == Basis::Z ? 0 : 1;
    const int wb = ev.bob_basis == Basis::Z ? 0 : 1;
    const int oa = static_cast<int>(ev.alice_outcome);
    const int ob = static_cast<int>(ev.bob_outcome);
    ++cells[cell_index(wa, wb, oa, ob)];
    if (wa != wb) {
      ++mismatched;
      return;
    }
    ++n;
    if (!ev.sifted) {
      ++n_dbl;
    } else if (oa != ob) {
      ++n_err;
    } else {
      ++n_cor;
    }
  }

  void merge(const SiftedTally& o) {
    events += o.events;
    undetected += o.undetected;
    mismatched += o.mismatched;
    n += o.n;
    n_dbl += o.n_dbl;
    n_err += o.n_err;
    n_cor += o.n_cor;
    for (int i = 0; i < kCells; ++i) cells[i] += o.cells[i];
  }

  double delta_hat() const { return n ? static_cast<double>(n_dbl) / n : 0.0; }
  double eps_hat() const { return n ? static_cast<double>(n_err) / n : 0.0; }
  double se_delta() const { return binomial_se(delta_hat()); }
  double se_eps() const { return binomial_se(eps_hat()); }

  friend bool operator==(const SiftedTally&, const SiftedTally&) = default;

 private:
  double binomial_se(double p) const { return n ? std::sqrt(p * (1.0 - p) / n) : 0.0; }
};

// Simulates events [begin, end) of a run; event i draws from stream (seed, i).
inline SiftedTally simulate_range(const OutcomeModel& model, std::uint64_t seed,
                                  std::uint64_t begin, std::uint64_t end) {
  SiftedTally t;
  for (std::uint64_t i = begin; i < end; ++i) {
    SplitMix64 rng = SplitMix64::stream(seed, i);
    t.add(sample_event(model, rng));
  }
  return t;
}

// Tallies `num_events` events. The result is independent of `threads`
// (0 selects the hardware concurrency).
inline SiftedTally run_protocol(const SourceModel& source, std::uint64_t num_events,
                                std::uint64_t seed, unsigned threads = 0) {
  detail::require(num_events >= 1, "need at least one event");
  const OutcomeModel model(source);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, num_events));
  if (threads == 1) return simulate_range(model, seed, 0, num_events);

  std::vector<SiftedTally> parts(threads);
  std::vector<std::thread> workers;
  const std::uint64_t chunk = num_events / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t b = t * chunk;
    const std::uint64_t e = t + 1 == threads ? num_events : b + chunk;
    workers.emplace_back([&, t, b, e] { parts[t] = simulate_range(model, seed, b, e); });
  }
  for (auto& w : workers) w.join();
  SiftedTally total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

struct AnalyticStats {
  double delta = 0.0;
  double eps = 0.0;
  double p_detected_same_basis = 0.0;
};

// Exact (delta, eps) among same-basis detected events.
inline AnalyticStats analytic_stats(const OutcomeModel& model) {
  double same = 0.0, dbl = 0.0, err = 0.0;
  for (int w = 0; w < 2; ++w) {
    for (int oa = 0; oa < 3; ++oa) {
      for (int ob = 0; ob < 3; ++ob) {
        const double p = model.cell_probability(cell_index(w, w, oa, ob));
        same += p;
        if (oa == 2 || ob == 2) {
          dbl += p;
        } else if (oa != ob) {
          err += p;
        }
      }
    }
  }
  if (same <= 0.0) return {};
  return {dbl / same, err / same, same};
}

struct SimulationReport {
  std::string source;
  std::uint64_t seed = 0;
  double f = 1.0;
  SiftedTally tally;
  double delta_hat = 0.0, eps_hat = 0.0;
  double se_delta = 0.0, se_eps = 0.0;
  AnalyticStats analytic;
  rates::KeyRateResult sampled_rate;
  rates::KeyRateResult analytic_rate;
  double rate_difference = rates::kNaN;
  // 5 standard errors of (delta_hat, eps_hat) propagated through R_key.
  double rate_tolerance = rates::kNaN;
  // CONJECTURED random-assignment rate at the sampled statistics.
  std::optional<double> conjectured_sampled;
  std::optional<double> conjectured_analytic;
  std::string note;
};

namespace impl {

inline rates::KeyRateResult safe_key_rate(double delta, double eps, double f,
                                          std::string* note) {
  try {
    return rates::key_rate(rates::ObservedStats(delta, eps), f);
  } catch (const InvalidArgument& e) {
    if (note) *note = e.what();
    return {};
  }
}

inline std::optional<double> safe_conjectured(double delta, double eps) {
  try {
    return rates::conjectured_random_assignment_rate(rates::ObservedStats(delta, eps));
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

// |dR/dx| by central differences, falling back to one-sided ones at the
// edge of the feasible domain.
inline double rate_slope(double delta, double eps, double f, bool along_delta) {
  constexpr double h = 1e-6;
  auto at = [&](double s) -> std::optional<double> {
    const double d = along_delta ? delta + s : delta;
    const double e = along_delta ? eps : eps + s;
    if (d < 0.0 || e < 0.0) return std::nullopt;
    const auto r = safe_key_rate(d, e, f, nullptr);
    if (!r.feasible) return std::nullopt;
    return r.r_key;
  };
  const auto c = at(0.0), p = at(h), m = at(-h);
  if (p && m) return std::abs(*p - *m) / (2 * h);
  if (p && c) return std::abs(*p - *c) / h;
  if (m && c) return std::abs(*c - *m) / h;
  return rates::kNaN;
}

}  // namespace impl

// Runs the protocol and evaluates the key fraction at the sampled and at the
// exact statistics of the source.
inline SimulationReport end_to_end(const SourceModel& source, std::uint64_t num_events,
                                   double f, std::uint64_t seed, unsigned threads = 0) {
  detail::require(f >= 1.0, "error-correction inefficiency f must be >= 1");
  SimulationReport rep;
  rep.source = source.describe();
  rep.seed = seed;
  rep.f = f;
  rep.tally = run_protocol(source, num_events, seed, threads);
  rep.delta_hat = rep.tally.delta_hat();
  rep.eps_hat = rep.tally.eps_hat();
  rep.se_delta = rep.tally.se_delta();
  rep.se_eps = rep.tally.se_eps();
  rep.analytic = analytic_stats(OutcomeModel(source));

  rep.sampled_rate = impl::safe_key_rate(rep.delta_hat, rep.eps_hat, f, &rep.note);
  rep.analytic_rate = impl::safe_key_rate(rep.analytic.delta, rep.analytic.eps, f, nullptr);
  rep.conjectured_sampled = impl::safe_conjectured(rep.delta_hat, rep.eps_hat);
  rep.conjectured_analytic = impl::safe_conjectured(rep.analytic.delta, rep.analytic.eps);
  if (!rep.sampled_rate.feasible && rep.note.empty()) {
    rep.note = "sampled statistics outside the region where tau is defined";
  }
  if (rep.sampled_rate.feasible && rep.analytic_rate.feasible) {
    rep.rate_difference = rep.sampled_rate.r_key - rep.analytic_rate.r_key;
    const double n = static_cast<double>(std::max<std::uint64_t>(rep.tally.n, 1));
    auto sigma = [&](double p) { return std::sqrt(p * (1.0 - p) / n); };
    const double sd = sigma(rep.analytic.delta);
    const double se = sigma(rep.analytic.eps);
    double tol = 0.0;
    if (sd > 0.0) tol += impl::rate_slope(rep.analytic.delta, rep.analytic.eps, f, true) * sd;
    if (se > 0.0) tol += impl::rate_slope(rep.analytic.delta, rep.analytic.eps, f, false) * se;
    rep.rate_tolerance = 5.0 * tol;
  }
  return rep;
}

}  // namespace bbm92::sim
