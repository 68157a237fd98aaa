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

#include "restake/incentives.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace restake {

IncentiveSchedule IncentiveSchedule::uniform(std::uint32_t services,
                                             double reward, double cost,
                                             double discount) {
  IncentiveSchedule out;
  out.rewards.assign(services, reward);
  out.costs.assign(services, cost);
  out.discounts.assign(services, discount);
  return out;
}

void IncentiveSchedule::validate(const RestakingGraph& g) const {
  if (rewards.size() != g.num_services() || costs.size() != g.num_services() ||
      discounts.size() != g.num_services()) {
    throw std::invalid_argument("schedule must cover every service");
  }
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    if (!(rewards[s] >= 0.0)) {
      throw std::invalid_argument("rewards must be >= 0");
    }
    if (!(costs[s] >= 0.0)) {
      throw std::invalid_argument("costs must be >= 0");
    }
    if (!(discounts[s] >= 0.0 && discounts[s] <= 1.0)) {
      throw std::invalid_argument("discounts must lie in [0, 1]");
    }
  }
}

TauInfo tau_of(const RestakingGraph& g, ServiceId s) {
  TauInfo out;
  if (g.num_services() < 2) return out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t t = 0; t < g.num_services(); ++t) {
    if (t == s.v) continue;
    double theta = overlap(g, s, ServiceId(t));
    if (theta > best) {
      best = theta;
      out.tau = ServiceId(t);
    }
  }
  out.defined = true;
  out.tau_boundary = g.service_boundary(out.tau);
  return out;
}

double pro_rata_reward(const RestakingGraph& g, const IncentiveSchedule& sched,
                       ServiceId s, OperatorId v) {
  sched.validate(g);
  if (!g.has_edge(v, s)) return 0.0;  // rho_{sv} = 0 off the edge set
  double pool = g.boundary_stake(s);
  double r = sched.rewards[s.v];
  if (pool <= 0.0) {
    if (r > 0.0) {
      throw DomainError("pro-rata payout undefined for an empty pool");
    }
    return 0.0;
  }
  double share = r * g.sigma(v) / pool;
  double delta = sched.discounts[s.v];
  if (delta > 0.0) {
    TauInfo tau = tau_of(g, s);
    if (tau.defined && ((tau.tau_boundary >> v.v) & 1)) {
      share *= 1.0 - delta;
    }
  }
  return share;
}

bool profitable_without_impact(const RestakingGraph& g,
                               const IncentiveSchedule& sched, OperatorId v,
                               ServiceId s) {
  sched.validate(g);
  double pool = g.boundary_stake(s);
  return geq(sched.rewards[s.v] * g.sigma(v), sched.costs[s.v] * pool);
}

bool profitable_with_impact(const RestakingGraph& g,
                            const IncentiveSchedule& sched, OperatorId v,
                            ServiceId s) {
  sched.validate(g);
  double r = sched.rewards[s.v];
  double c = sched.costs[s.v];
  if (!(r > c)) return false;
  Mask boundary = g.service_boundary(s) & ~(Mask(1) << v.v);
  double pool = g.stake_of_mask(boundary);
  return geq(g.sigma(v) * (r - c), c * pool);
}

namespace {

// Exact argmax of sigma_D over the feasible-joiner family, by depth-first
// enumeration over the statically eligible candidates. Candidates are sorted
// by descending stake so the lower-bound prune fires early: once the running
// minimum drops below the bar implied by the running sum, no superset can
// recover (adding members only raises the bar).
struct RebalanceSearch {
  const std::vector<double>* sigma = nullptr;      // candidate stakes, desc
  const std::vector<double>* bar_scale = nullptr;  // c / (r_sv - c) per cand
  std::vector<double> suffix_sum;                  // stake left from index on
  double pool_base = 0.0;                          // sigma_{ds - B}
  double best_sum = -1.0;
  std::vector<std::size_t> best_pick;
  std::vector<std::size_t> pick;

  bool feasible(double sum) const {
    for (std::size_t i : pick) {
      double bar = (*bar_scale)[i] * (pool_base + sum);
      if (!geq((*sigma)[i], bar)) return false;
    }
    return true;
  }

  void dfs(std::size_t index, double sum) {
    // A member that fails its bar stays failed under any extension: the bar
    // only grows with sigma_D.
    if (!feasible(sum)) return;
    if (sum > best_sum) {
      best_sum = sum;
      best_pick = pick;
    }
    if (index >= sigma->size()) return;
    if (sum + suffix_sum[index] <= best_sum) return;
    for (std::size_t i = index; i < sigma->size(); ++i) {
      pick.push_back(i);
      dfs(i + 1, sum + (*sigma)[i]);
      pick.pop_back();
    }
  }
};

}  // namespace

RebalanceFeasibleSet max_rebalance_set(const RestakingGraph& g,
                                       const IncentiveSchedule& sched,
                                       ServiceId s,
                                       const std::vector<OperatorId>& removed) {
  sched.validate(g);
  g.service(s);
  Mask removed_mask = operators_to_mask(g, removed);

  RebalanceFeasibleSet out;
  out.service = s;
  out.removed = removed;

  const double r = sched.rewards[s.v];
  const double c = sched.costs[s.v];
  if (!(r > c)) return out;  // nobody can profitably join

  const Mask boundary = g.service_boundary(s);
  const double pool_before = g.stake_of_mask(boundary);
  const double pool_after = g.stake_of_mask(boundary & ~removed_mask);
  TauInfo tau = tau_of(g, s);

  // Static filter: outside B and ds, effective reward above cost, and not
  // already profitable before the slash.
  std::vector<std::pair<double, std::uint32_t>> eligible;  // (-sigma, id)
  std::vector<double> scale_by_id(g.num_operators(), 0.0);
  for (std::uint32_t v = 0; v < g.num_operators(); ++v) {
    Mask bit = Mask(1) << v;
    if ((removed_mask & bit) || (boundary & bit)) continue;
    double r_sv = r;
    if (tau.defined && ((tau.tau_boundary >> v) & 1)) {
      r_sv *= 1.0 - sched.discounts[s.v];
    }
    if (!(r_sv > c)) continue;
    double scale = c / (r_sv - c);
    double sigma_v = g.sigma(OperatorId(v));
    if (!leq(sigma_v, scale * pool_before)) continue;  // upper bound
    scale_by_id[v] = scale;
    eligible.emplace_back(-sigma_v, v);
  }
  std::sort(eligible.begin(), eligible.end());
  for (const auto& [neg_sigma, v] : eligible) {
    out.candidates.push_back(OperatorId(v));
  }
  std::sort(out.candidates.begin(), out.candidates.end());

  if (eligible.size() > 22) {
    throw ResourceError("rebalance argmax limited to 22 eligible candidates");
  }

  std::vector<double> sigma;
  std::vector<double> scale;
  for (const auto& [neg_sigma, v] : eligible) {
    sigma.push_back(-neg_sigma);
    scale.push_back(scale_by_id[v]);
  }
  RebalanceSearch search;
  search.sigma = &sigma;
  search.bar_scale = &scale;
  search.pool_base = pool_after;
  search.suffix_sum.assign(sigma.size() + 1, 0.0);
  for (std::size_t i = sigma.size(); i > 0; --i) {
    search.suffix_sum[i - 1] = search.suffix_sum[i] + sigma[i - 1];
  }
  search.dfs(0, 0.0);

  if (search.best_sum > 0.0) {
    for (std::size_t i : search.best_pick) {
      out.best.push_back(OperatorId(eligible[i].second));
    }
    std::sort(out.best.begin(), out.best.end());
    out.sigma_d = search.best_sum;
    double beta =
        static_cast<double>(out.best.size()) * c / (r - c);
    if (beta < 1.0) out.kappa = beta / (1.0 - beta);
  }
  return out;
}

double min_discount(std::uint32_t service_count, double p, double r_s) {
  if (!(r_s > 0.0)) return 0.0;
  double threshold = std::pow(static_cast<double>(service_count), 1.0 / p);
  double value = 1.0 - threshold / r_s;
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace restake
