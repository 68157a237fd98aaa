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

#include "restake/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace restake {
namespace {

constexpr int kMaxSweeps = 100;

// Mutable working view over the original id space. boundaries[s] stays a
// subset of live_ops for live services and zero for dead ones.
struct LiveView {
  const RestakingGraph* g = nullptr;
  Mask live_ops = 0;
  Mask live_svcs = 0;
  std::vector<Mask> boundaries;
  // tau partners frozen for the duration of one rebalance fixed point;
  // re-evaluating them every sweep lets discount flips cycle forever.
  std::vector<std::int32_t> frozen_tau;

  static LiveView full(const RestakingGraph& g) {
    LiveView view;
    view.g = &g;
    view.live_ops = g.all_operators_mask();
    view.live_svcs = g.all_services_mask();
    view.boundaries.resize(g.num_services());
    for (std::uint32_t s = 0; s < g.num_services(); ++s) {
      view.boundaries[s] = g.service_boundary(ServiceId(s));
    }
    return view;
  }

  bool service_live(std::uint32_t s) const { return (live_svcs >> s) & 1; }
  bool operator_live(std::uint32_t v) const { return (live_ops >> v) & 1; }
  double pool(std::uint32_t s) const { return g->stake_of_mask(boundaries[s]); }
  std::uint32_t live_service_count() const {
    return static_cast<std::uint32_t>(std::popcount(live_svcs));
  }

  // Lowest-id argmax overlap partner among live services; -1 if undefined.
  std::int32_t tau(std::uint32_t s) const {
    if (live_service_count() < 2) return -1;
    double best = -std::numeric_limits<double>::infinity();
    std::int32_t arg = -1;
    Mask m = live_svcs;
    while (m != 0) {
      unsigned t = std::countr_zero(m);
      m &= m - 1;
      if (t == s) continue;
      double theta = g->stake_of_mask(boundaries[s] & boundaries[t]);
      if (theta > best) {
        best = theta;
        arg = static_cast<std::int32_t>(t);
      }
    }
    return arg;
  }

  void freeze_tau() {
    frozen_tau.assign(g->num_services(), -1);
    Mask m = live_svcs;
    while (m != 0) {
      unsigned s = std::countr_zero(m);
      m &= m - 1;
      frozen_tau[s] = tau(s);
    }
  }

  std::int32_t tau_for_payout(std::uint32_t s) const {
    return frozen_tau.empty() ? tau(s) : frozen_tau[s];
  }

  std::pair<double, double> overlap_bounds_live(std::uint32_t s) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    Mask m = live_svcs;
    while (m != 0) {
      unsigned t = std::countr_zero(m);
      m &= m - 1;
      if (t == s) continue;
      double theta = g->stake_of_mask(boundaries[s] & boundaries[t]);
      lo = std::min(lo, theta);
      hi = std::max(hi, theta);
    }
    return {lo, hi};
  }
};

double pro_rata_live(const LiveView& view, const IncentiveSchedule& sched,
                     std::uint32_t s, std::uint32_t v) {
  double pool = view.pool(s);
  if (pool <= 0.0) return 0.0;
  double share = sched.rewards[s] * view.g->sigma(OperatorId(v)) / pool;
  if (sched.discounts[s] > 0.0) {
    std::int32_t t = view.tau_for_payout(s);
    if (t >= 0 && ((view.boundaries[static_cast<std::uint32_t>(t)] >> v) & 1)) {
      share *= 1.0 - sched.discounts[s];
    }
  }
  return share;
}

bool join_profitable_live(const LiveView& view, const IncentiveSchedule& sched,
                          std::uint32_t s, std::uint32_t v) {
  // Joining is judged against the operator-specific reward: a discounted
  // operator that joined on the undiscounted rate would leave again on the
  // next sweep, and the controller's discount is meant to deter exactly
  // those joins.
  double r = sched.rewards[s];
  if (sched.discounts[s] > 0.0) {
    std::int32_t t = view.tau_for_payout(s);
    if (t >= 0 && ((view.boundaries[static_cast<std::uint32_t>(t)] >> v) & 1)) {
      r *= 1.0 - sched.discounts[s];
    }
  }
  double c = sched.costs[s];
  if (!(r > c)) return false;
  return geq(view.g->sigma(OperatorId(v)) * (r - c), c * view.pool(s));
}

// One full pass of the greedy policy for a single operator. Returns whether
// anything changed.
bool operator_pass(LiveView& view, const IncentiveSchedule& sched,
                   std::uint32_t v, std::vector<std::pair<OperatorId, ServiceId>>* joins,
                   std::vector<std::pair<OperatorId, ServiceId>>* leaves) {
  bool changed = false;
  Mask svcs = view.live_svcs;
  while (svcs != 0) {
    unsigned s = std::countr_zero(svcs);
    svcs &= svcs - 1;
    Mask bit = Mask(1) << v;
    if (view.boundaries[s] & bit) {
      double share = pro_rata_live(view, sched, s, v);
      if (lt(share, sched.costs[s])) {
        view.boundaries[s] &= ~bit;
        if (leaves != nullptr) {
          leaves->emplace_back(OperatorId(v), ServiceId(s));
        }
        changed = true;
      }
    } else {
      if (join_profitable_live(view, sched, s, v)) {
        view.boundaries[s] |= bit;
        if (joins != nullptr) {
          joins->emplace_back(OperatorId(v), ServiceId(s));
        }
        changed = true;
      }
    }
  }
  return changed;
}

std::vector<std::uint32_t> operator_order(const RestakingGraph& g) {
  std::vector<std::uint32_t> order(g.num_operators());
  for (std::uint32_t v = 0; v < g.num_operators(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    double sa = g.sigma(OperatorId(a));
    double sb = g.sigma(OperatorId(b));
    if (sa != sb) return sa > sb;
    return a < b;
  });
  return order;
}

// Sweeps the greedy policy to a fixed point; throws after kMaxSweeps.
int sweep_to_fixpoint(LiveView& view, const IncentiveSchedule& sched,
                      std::vector<std::pair<OperatorId, ServiceId>>* joins,
                      std::vector<std::pair<OperatorId, ServiceId>>* leaves,
                      int round_for_diagnostics) {
  const std::vector<std::uint32_t> order = operator_order(*view.g);
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    bool changed = false;
    for (std::uint32_t v : order) {
      if (!view.operator_live(v)) continue;
      changed |= operator_pass(view, sched, v, joins, leaves);
    }
    if (!changed) return sweep;
  }
  throw ConvergenceError(
      "rebalancing did not converge within 100 sweeps at round " +
      std::to_string(round_for_diagnostics));
}

std::vector<ServiceOverlapSnapshot> overlap_snapshot(const LiveView& view) {
  std::vector<ServiceOverlapSnapshot> out;
  if (view.live_service_count() < 2) return out;
  Mask m = view.live_svcs;
  while (m != 0) {
    unsigned s = std::countr_zero(m);
    m &= m - 1;
    auto [lo, hi] = view.overlap_bounds_live(s);
    out.push_back(ServiceOverlapSnapshot{ServiceId(s), lo, hi});
  }
  return out;
}

IncentiveSchedule controller_step(const LiveView& view,
                                  const IncentiveSchedule& sched,
                                  const ControllerConfig& cfg,
                                  std::vector<RewardChange>* changes) {
  IncentiveSchedule next = sched;
  const std::uint32_t s_count = view.live_service_count();
  if (s_count < 2) return next;
  double sigma_min = std::numeric_limits<double>::infinity();
  double sigma_max = 0.0;
  Mask ops = view.live_ops;
  while (ops != 0) {
    unsigned v = std::countr_zero(ops);
    ops &= ops - 1;
    sigma_min = std::min(sigma_min, view.g->sigma(OperatorId(v)));
    sigma_max = std::max(sigma_max, view.g->sigma(OperatorId(v)));
  }
  double scale = std::pow(static_cast<double>(s_count), 1.0 / cfg.p);
  double hi_threshold = cfg.band.hi_coeff * sigma_max * scale;
  double lo_threshold = cfg.band.lo_coeff * sigma_min * scale;

  Mask svcs = view.live_svcs;
  while (svcs != 0) {
    unsigned s = std::countr_zero(svcs);
    svcs &= svcs - 1;
    auto [theta_min, theta_max] = view.overlap_bounds_live(s);
    double r_before = next.rewards[s];
    double d_before = next.discounts[s];
    if (theta_max > hi_threshold) {
      next.discounts[s] = min_discount(s_count, cfg.p, next.rewards[s]);
    } else if (theta_min < lo_threshold) {
      next.discounts[s] = 0.0;
      next.rewards[s] = std::min(next.rewards[s] * (1.0 + cfg.boost),
                                 cfg.r_max);
    }
    if (changes != nullptr &&
        (next.rewards[s] != r_before || next.discounts[s] != d_before)) {
      changes->push_back(RewardChange{ServiceId(s), r_before, next.rewards[s],
                                      d_before, next.discounts[s]});
    }
  }
  return next;
}

}  // namespace

GameState::GameState(RestakingGraph g0, IncentiveSchedule schedule,
                     ProfitSpec spec, std::optional<ControllerConfig> controller)
    : base_(std::make_shared<RestakingGraph>(std::move(g0))),
      schedule_(std::move(schedule)),
      spec_(spec),
      controller_(controller) {
  schedule_.validate(*base_);
  if (controller_ && !(controller_->band.lo_coeff > 0.0 &&
                       controller_->band.lo_coeff <=
                           controller_->band.hi_coeff)) {
    throw DomainError("controller band requires 0 < lo <= hi");
  }
  live_ops_ = base_->all_operators_mask();
  live_svcs_ = base_->all_services_mask();
  boundaries_.resize(base_->num_services());
  for (std::uint32_t s = 0; s < base_->num_services(); ++s) {
    boundaries_[s] = base_->service_boundary(ServiceId(s));
  }
}

std::vector<OperatorId> GameState::removed_operators() const {
  return mask_to_operators(base_->all_operators_mask() & ~live_ops_);
}

double GameState::live_stake() const {
  return base_->stake_of_mask(live_ops_);
}

RemovalResult GameState::snapshot() const {
  RemovalResult out;
  out.service_map.assign(base_->num_services(), std::nullopt);
  out.operator_map.assign(base_->num_operators(), std::nullopt);
  std::vector<ServiceRecord> services;
  for (std::uint32_t s = 0; s < base_->num_services(); ++s) {
    if (!((live_svcs_ >> s) & 1)) continue;
    ServiceRecord rec = base_->services()[s];
    rec.id = ServiceId(static_cast<std::uint32_t>(services.size()));
    out.service_map[s] = rec.id;
    services.push_back(rec);
  }
  std::vector<OperatorRecord> operators;
  for (std::uint32_t v = 0; v < base_->num_operators(); ++v) {
    if (!((live_ops_ >> v) & 1)) continue;
    OperatorRecord rec = base_->operators()[v];
    rec.id = OperatorId(static_cast<std::uint32_t>(operators.size()));
    out.operator_map[v] = rec.id;
    operators.push_back(rec);
  }
  std::vector<std::pair<OperatorId, ServiceId>> edges;
  for (std::uint32_t s = 0; s < base_->num_services(); ++s) {
    if (!out.service_map[s]) continue;
    Mask m = boundaries_[s];
    while (m != 0) {
      unsigned v = std::countr_zero(m);
      m &= m - 1;
      edges.emplace_back(*out.operator_map[v], *out.service_map[s]);
    }
  }
  out.graph = RestakingGraph(std::move(services), std::move(operators),
                             std::move(edges));
  return out;
}

std::pair<GameState, RoundLog> play_round(const GameState& state,
                                          const Attack& attack) {
  GameState next = state;
  RoundLog log;
  log.round = state.round_ + 1;
  log.attempted = attack;

  LiveView view;
  view.g = state.base_.get();
  view.live_ops = state.live_ops_;
  view.live_svcs = state.live_svcs_;
  view.boundaries = state.boundaries_;
  log.overlaps_before = overlap_snapshot(view);

  // Step 1: services update rewards.
  if (state.controller_) {
    next.schedule_ =
        controller_step(view, state.schedule_, *state.controller_,
                        &log.reward_changes);
  }
  const IncentiveSchedule& sched = next.schedule_;

  // Step 2: the attacker plays a single attack.
  const RestakingGraph& g = *state.base_;
  Mask a = services_to_mask(g, attack.services);
  Mask b = operators_to_mask(g, attack.operators);
  if ((a & ~view.live_svcs) != 0 || (b & ~view.live_ops) != 0) {
    throw LookupError("attack references removed ids");
  }
  if (a == 0) {
    log.verdict = RoundVerdict::kSeedLoss;
    log.slashed_stake = g.stake_of_mask(b);
  } else if (b == 0) {
    log.verdict = RoundVerdict::kRepelledProfit;  // nothing slashed
  } else if (!geq(profit(state.spec_, g, a), g.stake_of_mask(b))) {
    log.verdict = RoundVerdict::kRepelledProfit;
  } else {
    log.verdict = RoundVerdict::kExecuted;
    Mask am = a;
    while (am != 0) {
      unsigned s = std::countr_zero(am);
      am &= am - 1;
      double pool = view.pool(s);
      double covered = g.stake_of_mask(view.boundaries[s] & b);
      if (!geq(covered, g.alpha(ServiceId(s)) * pool)) {
        log.verdict = RoundVerdict::kRepelledFeasibility;
        log.failed_service = ServiceId(s);
        break;
      }
    }
    if (log.verdict == RoundVerdict::kExecuted) {
      log.slashed_stake = g.stake_of_mask(b);
    }
  }
  if (log.verdict == RoundVerdict::kSeedLoss ||
      log.verdict == RoundVerdict::kExecuted) {
    view.live_ops &= ~b;
    view.live_svcs &= ~a;
    for (std::uint32_t s = 0; s < g.num_services(); ++s) {
      view.boundaries[s] = view.service_live(s) ? view.boundaries[s] & ~b : 0;
    }
  }

  // Step 3: surviving operators rebalance to a fixed point.
  view.freeze_tau();
  log.sweeps = sweep_to_fixpoint(view, sched, &log.joins, &log.leaves,
                                 log.round);
  log.overlaps_after = overlap_snapshot(view);

  next.live_ops_ = view.live_ops;
  next.live_svcs_ = view.live_svcs;
  next.boundaries_ = std::move(view.boundaries);
  next.round_ = state.round_ + 1;
  next.trace_.push_back(log);
  return {std::move(next), std::move(log)};
}

std::vector<ServiceId> strategic_update(const RestakingGraph& g,
                                        const IncentiveSchedule& sched,
                                        OperatorId v) {
  sched.validate(g);
  g.op(v);
  LiveView view = LiveView::full(g);
  view.freeze_tau();
  operator_pass(view, sched, v.v, nullptr, nullptr);
  std::vector<ServiceId> out;
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    if ((view.boundaries[s] >> v.v) & 1) out.push_back(ServiceId(s));
  }
  return out;
}

HaltingReport halting_report(const RestakingGraph& g,
                             const IncentiveSchedule& sched,
                             const ProfitSpec& spec, const Attack& attack1,
                             const Attack& attack2) {
  sched.validate(g);
  Mask a1 = services_to_mask(g, attack1.services);
  Mask b1 = operators_to_mask(g, attack1.operators);
  Mask a2 = services_to_mask(g, attack2.services);
  Mask b2 = operators_to_mask(g, attack2.operators);
  if ((a1 & a2) != 0 || (b1 & b2) != 0) {
    throw DomainError("halting report requires disjoint attacks");
  }

  HaltingReport out;
  out.attack1_profitable = geq(profit(spec, g, a1), g.stake_of_mask(b1));
  out.attack2_profitable = geq(profit(spec, g, a2), g.stake_of_mask(b2));

  out.attack1_feasible = true;
  Mask m = a1;
  while (m != 0) {
    unsigned s = std::countr_zero(m);
    m &= m - 1;
    Mask boundary = g.service_boundary(ServiceId(s));
    if (!geq(g.stake_of_mask(boundary & b1),
             g.alpha(ServiceId(s)) * g.stake_of_mask(boundary))) {
      out.attack1_feasible = false;
      break;
    }
  }

  out.attack2_feasible_without = true;
  out.attack2_infeasible_with = true;
  m = a2;
  while (m != 0) {
    unsigned s = std::countr_zero(m);
    m &= m - 1;
    ServiceId sid(s);
    Mask pool_mask = g.service_boundary(sid) & ~b1;
    double pool = g.stake_of_mask(pool_mask);
    double covered = g.stake_of_mask(pool_mask & b2);
    if (!geq(covered, g.alpha(sid) * pool)) {
      out.attack2_feasible_without = false;
    }
    RebalanceFeasibleSet d = max_rebalance_set(g, sched, sid,
                                               attack1.operators);
    Mask d_mask = operators_to_mask(g, d.best);
    double pool_with = pool + d.sigma_d;
    double covered_with = covered + g.stake_of_mask(d_mask & b2);
    // Infeasibility is the negation of the feasibility condition (strict <),
    // not a non-strict <=: at the boundary equality the coalition still
    // clears the threshold and the attack executes.
    if (geq(covered_with, g.alpha(sid) * pool_with)) {
      out.attack2_infeasible_with = false;
    }
    out.rebalance_sets.push_back(std::move(d));
  }
  return out;
}

IncentiveSchedule reward_controller(const RestakingGraph& g,
                                    const IncentiveSchedule& sched, double p,
                                    ControllerBand band, double boost,
                                    double r_max) {
  sched.validate(g);
  if (!(band.lo_coeff > 0.0 && band.lo_coeff <= band.hi_coeff)) {
    throw DomainError("controller band requires 0 < lo <= hi");
  }
  LiveView view = LiveView::full(g);
  ControllerConfig cfg;
  cfg.band = band;
  cfg.p = p;
  cfg.boost = boost;
  cfg.r_max = r_max;
  return controller_step(view, sched, cfg, nullptr);
}

GameState simulate(RestakingGraph g0, IncentiveSchedule schedule,
                   ProfitSpec spec, const AttackSequence& script,
                   std::optional<ControllerConfig> controller) {
  GameState state(std::move(g0), std::move(schedule), spec, controller);
  for (const Attack& attack : script) {
    auto [next, log] = play_round(state, attack);
    state = std::move(next);
  }
  return state;
}

}  // namespace restake
