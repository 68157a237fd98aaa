// Copyright 2026 The Restake Authors
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

#include "restake/attack.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "restake/subsets.hpp"

namespace restake {
namespace {

void check_exhaustive_size(const RestakingGraph& g) {
  if (g.num_services() > kMaxExhaustiveServices ||
      g.num_operators() > kMaxExhaustiveOperators) {
    throw ResourceError("exhaustive search refuses |S| > 16 or |V| > 20");
  }
}

double min_live_sigma(const RestakingGraph& g, Mask ops) {
  double best = std::numeric_limits<double>::infinity();
  while (ops != 0) {
    unsigned bit = std::countr_zero(ops);
    best = std::min(best, g.sigma(OperatorId(bit)));
    ops &= ops - 1;
  }
  return best;
}

// Feasibility of coalition B for every service of A against the given live
// boundaries: sigma_{B n ds} >= alpha_s sigma_ds.
bool feasible_masks(const RestakingGraph& g, Mask services, Mask operators,
                    const std::vector<Mask>& boundaries) {
  Mask a = services;
  while (a != 0) {
    unsigned s = std::countr_zero(a);
    Mask boundary = boundaries[s];
    double pool = g.stake_of_mask(boundary);
    double covered = g.stake_of_mask(boundary & operators);
    if (!geq(covered, g.alpha(ServiceId(s)) * pool)) return false;
    a &= a - 1;
  }
  return true;
}

struct CascadeEntry {
  double best = 0.0;
  bool has_step = false;
  Mask step_a = 0;
  Mask step_b = 0;
};

class CascadeSearch {
 public:
  CascadeSearch(const RestakingGraph& g, const ProfitSpec& spec)
      : g_(g), spec_(spec) {
    boundaries_.resize(g.num_services());
    for (std::uint32_t s = 0; s < g.num_services(); ++s) {
      boundaries_[s] = g.service_boundary(ServiceId(s));
    }
  }

  // Maximum sigma(union B_t) over attack sequences starting from the given
  // surviving masks. Witness steps are recorded per state.
  double best_loss(Mask ops, Mask svcs) {
    if (ops == 0 || svcs == 0) return 0.0;
    const std::uint64_t key = (std::uint64_t(ops) << 16) | svcs;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second.best;

    CascadeEntry entry;
    std::vector<Mask> live_boundaries(g_.num_services(), 0);
    Mask sm = svcs;
    while (sm != 0) {
      unsigned s = std::countr_zero(sm);
      live_boundaries[s] = boundaries_[s] & ops;
      sm &= sm - 1;
    }
    const double min_sigma = min_live_sigma(g_, ops);
    for_each_subset(svcs, g_.num_services(), [&](Mask a) {
      double f = profit(spec_, g_, a);
      if (!geq(f, min_sigma)) return false;  // no affordable nonempty B
      if (!feasible_masks(g_, a, ops, live_boundaries)) {
        // A coalition of all surviving operators maximizes coverage; if even
        // that is infeasible no B works for this A.
        return false;
      }
      double affordable = std::floor(f / min_sigma + 1e-6);
      std::uint32_t max_b = static_cast<std::uint32_t>(std::min(
          affordable, static_cast<double>(std::popcount(ops))));
      for_each_subset(ops, max_b, [&](Mask b) {
        double sigma_b = g_.stake_of_mask(b);
        if (!geq(f, sigma_b)) return false;
        if (!feasible_masks(g_, a, b, live_boundaries)) return false;
        double value = sigma_b + best_loss(ops & ~b, svcs & ~a);
        if (value > entry.best) {
          entry.best = value;
          entry.has_step = true;
          entry.step_a = a;
          entry.step_b = b;
        }
        return false;
      });
      return false;
    });
    memo_[key] = entry;
    return entry.best;
  }

  AttackSequence witness(Mask ops, Mask svcs) {
    AttackSequence seq;
    while (ops != 0 && svcs != 0) {
      const std::uint64_t key = (std::uint64_t(ops) << 16) | svcs;
      auto it = memo_.find(key);
      if (it == memo_.end() || !it->second.has_step) break;
      const CascadeEntry& e = it->second;
      seq.push_back(Attack{mask_to_services(e.step_a),
                           mask_to_operators(e.step_b)});
      ops &= ~e.step_b;
      svcs &= ~e.step_a;
    }
    return seq;
  }

 private:
  const RestakingGraph& g_;
  const ProfitSpec& spec_;
  std::vector<Mask> boundaries_;
  std::unordered_map<std::uint64_t, CascadeEntry> memo_;
};

}  // namespace

bool is_valid_attack_masks(const RestakingGraph& g, const ProfitSpec& spec,
                           Mask services, Mask operators,
                           const std::vector<Mask>& boundaries) {
  if (services == 0 || operators == 0) return false;
  if (!geq(profit(spec, g, services), g.stake_of_mask(operators))) {
    return false;
  }
  return feasible_masks(g, services, operators, boundaries);
}

bool is_valid_attack(const RestakingGraph& g, const ProfitSpec& spec,
                     const Attack& attack) {
  Mask a = services_to_mask(g, attack.services);
  Mask b = operators_to_mask(g, attack.operators);
  std::vector<Mask> boundaries(g.num_services());
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    boundaries[s] = g.service_boundary(ServiceId(s));
  }
  return is_valid_attack_masks(g, spec, a, b, boundaries);
}

std::vector<Attack> find_attacks(const RestakingGraph& g,
                                 const ProfitSpec& spec,
                                 std::uint32_t max_services,
                                 std::uint32_t max_operators) {
  check_exhaustive_size(g);
  std::vector<Mask> boundaries(g.num_services());
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    boundaries[s] = g.service_boundary(ServiceId(s));
  }
  const Mask all_ops = g.all_operators_mask();
  const double min_sigma = min_live_sigma(g, all_ops);
  std::vector<Attack> out;
  for_each_subset(g.all_services_mask(), max_services, [&](Mask a) {
    double f = profit(spec, g, a);
    if (g.num_operators() > 0 && !geq(f, min_sigma)) return false;
    // Any coalition larger than f / min_sigma fails profitability outright.
    std::uint32_t max_b = max_operators;
    if (min_sigma > 0.0 && std::isfinite(min_sigma)) {
      max_b = static_cast<std::uint32_t>(std::min(
          static_cast<double>(max_operators),
          std::floor(f / min_sigma + 1e-6)));
    }
    for_each_subset(all_ops, max_b, [&](Mask b) {
      if (is_valid_attack_masks(g, spec, a, b, boundaries)) {
        out.push_back(Attack{mask_to_services(a), mask_to_operators(b)});
      }
      return false;
    });
    return false;
  });
  return out;
}

SecurityReport security_report(const RestakingGraph& g, const ProfitSpec& spec,
                               double gamma) {
  check_exhaustive_size(g);
  SecurityReport report;
  report.gamma_queried = gamma;

  std::vector<Mask> boundaries(g.num_services());
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    boundaries[s] = g.service_boundary(ServiceId(s));
  }
  const Mask all_ops = g.all_operators_mask();

  // First valid attack in canonical order, if any.
  const double min_sigma = min_live_sigma(g, all_ops);
  for_each_subset(g.all_services_mask(), g.num_services(), [&](Mask a) {
    double f = profit(spec, g, a);
    if (g.num_operators() > 0 && !geq(f, min_sigma)) return false;
    std::uint32_t max_b = g.num_operators();
    if (min_sigma > 0.0 && std::isfinite(min_sigma)) {
      max_b = static_cast<std::uint32_t>(std::min(
          static_cast<double>(max_b), std::floor(f / min_sigma + 1e-6)));
    }
    return for_each_subset(all_ops, max_b, [&](Mask b) {
      if (is_valid_attack_masks(g, spec, a, b, boundaries)) {
        report.witness = Attack{mask_to_services(a), mask_to_operators(b)};
        return true;
      }
      return false;
    });
  });
  report.secure = !report.witness.has_value();

  // gamma* = min sigma_B / f(pi, A) - 1 over feasible pairs with f > 0.
  // Operators outside the union boundary only inflate sigma_B, so the
  // minimum is attained within it; the empty coalition counts when feasible.
  double min_ratio = std::numeric_limits<double>::infinity();
  for_each_subset(g.all_services_mask(), g.num_services(), [&](Mask a) {
    double f = profit(spec, g, a);
    if (!(f > 0.0)) return false;
    Mask union_boundary = 0;
    Mask am = a;
    while (am != 0) {
      union_boundary |= boundaries[std::countr_zero(am)];
      am &= am - 1;
    }
    if (feasible_masks(g, a, 0, boundaries)) {
      min_ratio = std::min(min_ratio, 0.0 / f - 1.0);
    }
    for_each_subset(union_boundary, g.num_operators(), [&](Mask b) {
      if (feasible_masks(g, a, b, boundaries)) {
        min_ratio = std::min(min_ratio, g.stake_of_mask(b) / f - 1.0);
      }
      return false;
    });
    return false;
  });
  if (report.secure && std::isfinite(min_ratio) && min_ratio > 0.0) {
    report.gamma_star = min_ratio;
  }

  // Per-operator sufficient condition for gamma-security.
  report.sufficient_condition_ok = true;
  for (std::uint32_t v = 0; v < g.num_operators(); ++v) {
    double sum = 0.0;
    Mask sm = g.operator_boundary(OperatorId(v));
    while (sm != 0) {
      unsigned s = std::countr_zero(sm);
      sm &= sm - 1;
      ServiceId sid(s);
      double denom = g.alpha(sid) * g.boundary_stake(sid);
      if (g.pi(sid) == 0.0) continue;
      if (denom <= 0.0) {
        sum = std::numeric_limits<double>::infinity();
        break;
      }
      sum += g.pi(sid) / denom;
    }
    if (!leq((1.0 + gamma) * sum, 1.0)) {
      report.sufficient_condition_ok = false;
      break;
    }
  }
  return report;
}

CascadeResult cascade_coefficient(const RestakingGraph& g,
                                  const ProfitSpec& spec, double psi) {
  check_exhaustive_size(g);
  if (!(psi >= 0.0 && psi < 1.0)) {
    throw DomainError("psi must lie in [0, 1)");
  }
  const double sigma_v = g.total_stake();
  const double budget = psi * sigma_v;
  const Mask all_ops = g.all_operators_mask();
  const Mask all_svcs = g.all_services_mask();

  CascadeSearch search(g, spec);
  double best = -1.0;
  Mask best_d = 0;
  // D = empty set first (size-then-lex order over coalitions).
  if (leq(0.0, budget)) {
    best = search.best_loss(all_ops, all_svcs);
    best_d = 0;
  }
  for_each_subset(all_ops, g.num_operators(), [&](Mask d) {
    if (!leq(g.stake_of_mask(d), budget)) return false;
    double value = search.best_loss(all_ops & ~d, all_svcs);
    if (value > best) {
      best = value;
      best_d = d;
    }
    return false;
  });
  if (best < 0.0) best = 0.0;  // psi budget below zero cannot happen; guard

  CascadeResult out;
  out.psi = psi;
  out.best_d = mask_to_operators(best_d);
  out.best_sequence = search.witness(all_ops & ~best_d, all_svcs);
  out.r_psi = sigma_v > 0.0 ? psi + best / sigma_v : psi;
  return out;
}

UnionCheck union_attack_check(const RestakingGraph& g, const ProfitSpec& spec,
                              const AttackSequence& sequence) {
  Mask union_a = 0;
  Mask union_b = 0;
  for (const Attack& step : sequence) {
    Mask a = services_to_mask(g, step.services);
    Mask b = operators_to_mask(g, step.operators);
    if ((union_a & a) != 0 || (union_b & b) != 0) {
      throw DomainError("attack sequence steps must be pairwise disjoint");
    }
    union_a |= a;
    union_b |= b;
  }

  UnionCheck out;
  std::vector<Mask> boundaries(g.num_services());
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    boundaries[s] = g.service_boundary(ServiceId(s));
  }

  Mask live_ops = g.all_operators_mask();
  Mask live_svcs = g.all_services_mask();
  for (const Attack& step : sequence) {
    Mask a = services_to_mask(g, step.services);
    Mask b = operators_to_mask(g, step.operators);
    std::vector<Mask> live_boundaries(g.num_services(), 0);
    Mask sm = live_svcs;
    while (sm != 0) {
      unsigned s = std::countr_zero(sm);
      live_boundaries[s] = boundaries[s] & live_ops;
      sm &= sm - 1;
    }
    bool ok = (a & live_svcs) == a && (b & live_ops) == b &&
              is_valid_attack_masks(g, spec, a, b, live_boundaries);
    out.each_valid.push_back(ok);
    live_ops &= ~b;
    live_svcs &= ~a;
  }

  out.union_valid =
      union_a != 0 && union_b != 0 &&
      is_valid_attack_masks(g, spec, union_a, union_b, boundaries);

  if (spec.kind() == ProfitSpec::Kind::kPNorm ||
      spec.kind() == ProfitSpec::Kind::kMaxNorm) {
    double lhs = 0.0;
    std::size_t total_b = 0;
    for (const Attack& step : sequence) {
      double size_a = static_cast<double>(step.services.size());
      lhs += spec.kind() == ProfitSpec::Kind::kMaxNorm
                 ? (size_a > 0 ? 1.0 : 0.0)
                 : std::pow(size_a, 1.0 / spec.p());
      total_b += step.operators.size();
    }
    double max_pi = 0.0;
    Mask am = union_a;
    while (am != 0) {
      max_pi = std::max(max_pi, g.pi(ServiceId(std::countr_zero(am))));
      am &= am - 1;
    }
    double min_sigma = min_live_sigma(g, g.all_operators_mask());
    if (max_pi > 0.0 && std::isfinite(min_sigma)) {
      out.sufficient_invalidity =
          lhs < min_sigma * static_cast<double>(total_b) / max_pi;
    }
  }
  return out;
}

double claim1_bound(const RestakingGraph& g, const ProfitSpec& spec) {
  if (spec.kind() != ProfitSpec::Kind::kPNorm) {
    throw DomainError("claim1_bound applies to pnorm profits only");
  }
  if (g.num_operators() == 0) {
    throw DomainError("claim1_bound needs at least one operator");
  }
  double max_pi = 0.0;
  for (const ServiceRecord& s : g.services()) max_pi = std::max(max_pi, s.pi);
  double min_sigma = min_live_sigma(g, g.all_operators_mask());
  double k = max_pi / min_sigma;
  return k * std::pow(static_cast<double>(g.num_services()), 1.0 / spec.p());
}

}  // namespace restake
