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

#ifndef RESTAKE_DYNAMICS_HPP_
#define RESTAKE_DYNAMICS_HPP_

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "restake/attack.hpp"
#include "restake/incentives.hpp"

namespace restake {

// Hysteresis band for the overlap-targeting reward controller, as multiples
// of sigma_min/sigma_max times S^(1/p).
struct ControllerBand {
  double lo_coeff = 0.0;
  double hi_coeff = 0.0;
};

struct ControllerConfig {
  ControllerBand band;
  double p = 2.0;
  double boost = 0.1;    // multiplicative reward boost on the low side
  double r_max = 1e6;    // reward cap
};

enum class RoundVerdict {
  kSeedLoss,             // scripted exogenous removal (empty A)
  kExecuted,
  kRepelledProfit,       // profitability condition failed
  kRepelledFeasibility,  // some service's feasibility condition failed
};

struct RewardChange {
  ServiceId service{0};
  double reward_before = 0.0;
  double reward_after = 0.0;
  double discount_before = 0.0;
  double discount_after = 0.0;
};

struct ServiceOverlapSnapshot {
  ServiceId service{0};
  double theta_min = 0.0;
  double theta_max = 0.0;
};

struct RoundLog {
  int round = 0;
  Attack attempted;
  RoundVerdict verdict = RoundVerdict::kExecuted;
  std::optional<ServiceId> failed_service;  // feasibility failure witness
  double slashed_stake = 0.0;
  std::vector<std::pair<OperatorId, ServiceId>> joins;
  std::vector<std::pair<OperatorId, ServiceId>> leaves;
  std::vector<RewardChange> reward_changes;
  std::vector<ServiceOverlapSnapshot> overlaps_before;
  std::vector<ServiceOverlapSnapshot> overlaps_after;
  int sweeps = 0;
};

// Dynamic incentivized graph. The state tracks the original graph plus live
// masks and a mutable copy of the edge set (strategic joins and leaves edit
// edges); all ids refer to the original graph so scripts stay stable across
// rounds.
class GameState {
 public:
  GameState(RestakingGraph g0, IncentiveSchedule schedule, ProfitSpec spec,
            std::optional<ControllerConfig> controller = std::nullopt);

  const RestakingGraph& base() const { return *base_; }
  const IncentiveSchedule& schedule() const { return schedule_; }
  const ProfitSpec& profit_spec() const { return spec_; }
  int round() const { return round_; }
  Mask live_operators() const { return live_ops_; }
  Mask live_services() const { return live_svcs_; }
  const std::vector<Mask>& boundaries() const { return boundaries_; }
  const std::vector<RoundLog>& trace() const { return trace_; }
  std::vector<OperatorId> removed_operators() const;

  double live_stake() const;
  // Current graph as a standalone value with re-densified ids.
  RemovalResult snapshot() const;

  friend std::pair<GameState, RoundLog> play_round(const GameState& state,
                                                   const Attack& attack);

 private:
  std::shared_ptr<const RestakingGraph> base_;
  IncentiveSchedule schedule_;
  ProfitSpec spec_;
  std::optional<ControllerConfig> controller_;
  Mask live_ops_ = 0;
  Mask live_svcs_ = 0;
  std::vector<Mask> boundaries_;  // current edge set, original operator ids
  int round_ = 0;
  std::vector<RoundLog> trace_;
};

// One round of the three-step game: controller reward update, a single
// scripted attack (executed iff valid on the current graph, otherwise
// logged as repelled and the round is consumed), then strategic rebalancing
// swept to a fixed point (at most 100 sweeps). An attack with empty A is an
// exogenous seed loss and removes B unconditionally.
std::pair<GameState, RoundLog> play_round(const GameState& state,
                                          const Attack& attack);

// Greedy per-operator policy on a static graph: join every service where
// joining is profitable with impact, leave every service whose pro-rata
// payout does not cover the cost. Returns the operator's new boundary.
std::vector<ServiceId> strategic_update(const RestakingGraph& g,
                                        const IncentiveSchedule& sched,
                                        OperatorId v);

struct HaltingReport {
  bool attack1_profitable = false;        // f(pi, A1) >= sigma_B1
  bool attack1_feasible = false;          // per-service alpha condition
  bool attack2_profitable = false;
  bool attack2_feasible_without = false;  // against ds - B1
  bool attack2_infeasible_with = false;   // against ds - B1 + D_s
  std::vector<RebalanceFeasibleSet> rebalance_sets;  // one per s in A2
};

// Evaluation of the five halting conditions for a two-attack cascade, with
// D_s = max_rebalance_set(g, sched, s, B1). The infeasibility condition is
// the strict negation of feasibility, so it reports whether attack 2 is
// actually repelled. Pure diagnosis; nothing is mutated.
HaltingReport halting_report(const RestakingGraph& g,
                             const IncentiveSchedule& sched,
                             const ProfitSpec& spec, const Attack& attack1,
                             const Attack& attack2);

// Overlap-targeting controller: services whose max overlap exceeds the band
// get the discount floor; services whose min overlap falls below it get the
// discount cleared and the reward boosted (capped at r_max).
IncentiveSchedule reward_controller(const RestakingGraph& g,
                                    const IncentiveSchedule& sched, double p,
                                    ControllerBand band, double boost = 0.1,
                                    double r_max = 1e6);

// Runs a whole script through play_round.
GameState simulate(RestakingGraph g0, IncentiveSchedule schedule,
                   ProfitSpec spec, const AttackSequence& script,
                   std::optional<ControllerConfig> controller = std::nullopt);

}  // namespace restake

#endif  // RESTAKE_DYNAMICS_HPP_
