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

#ifndef RESTAKE_OPTIMIZER_HPP_
#define RESTAKE_OPTIMIZER_HPP_

#include <string>
#include <utility>
#include <vector>

#include "restake/attack.hpp"
#include "restake/incentives.hpp"

namespace restake {

struct SequentialProfitQuery {
  ProfitSpec spec = ProfitSpec::linear();
  std::uint32_t horizon = 1;  // T >= 1
  RestakingGraph graph;
};

// Net profit of an ordered attack sequence: sum of f(pi, A_t) - sigma_{B_t}.
// Each step must be valid on the graph after all earlier removals.
double sequential_profit(const SequentialProfitQuery& query,
                         const AttackSequence& sequence);

// Greedy sequential-submodular maximization: at each step appends the valid
// attack on the running graph with the largest net profit (exact inner
// maximization by canonical enumeration; ties take the first in canonical
// order). Stops at the horizon, when no valid attack remains, or when the
// best marginal is nonpositive.
AttackSequence greedy_sequence(const SequentialProfitQuery& query);

// alpha(p) = (min pi / max pi) * S^(-1/p) and E(p) = 1 - exp(-alpha(p)).
// Requires every pi > 0.
std::pair<double, double> alpha_and_error(const RestakingGraph& g, double p);

// Convex relaxation of the minimal-reward feasibility objective: maximizes
//   sum_{a in A2} log(alpha_a sigma_{da - B1 + D} - sigma_{(da - B1 + D) n B2})
// over continuous joining mass D >= 0 on non-B1 operators with total at most
// (r_s - c_s) k - sigma_{ds - B1}. Mass on an operator counts toward the
// pools it is not already a member of. Returns -infinity when the radius is
// negative or no admissible mass makes every argument positive; a radius of
// exactly zero admits the origin, mirroring the empty discrete rebalance.
double relaxed_objective(const RestakingGraph& g,
                         const IncentiveSchedule& sched, ServiceId s,
                         const std::vector<OperatorId>& b1,
                         const std::vector<OperatorId>& b2,
                         const std::vector<ServiceId>& a2, double r_s,
                         double k);

struct BisectionProbe {
  double r = 0.0;
  bool feasible = false;
};

struct MinimalReward {
  double value = 0.0;
  double initial = 0.0;
  std::vector<BisectionProbe> probes;
};

// Smallest reward r_s making the relaxed objective positive for some
// k in {sigma_v}, found by doubling from the initialization
// sigma_{ds - B1} / max_v sigma_v + c_s and bisecting to relative tolerance
// 1e-6. Throws InfeasibleError when no reward up to 2^60 works.
MinimalReward minimal_reward(const RestakingGraph& g,
                             const IncentiveSchedule& sched, ServiceId s,
                             const std::vector<OperatorId>& b1,
                             const std::vector<OperatorId>& b2,
                             const std::vector<ServiceId>& a2);

struct ServiceRewardTrace {
  ServiceId service{0};
  double initial = 0.0;
  double pre_inflation = 0.0;
  std::vector<BisectionProbe> probes;
};

struct RewardSolution {
  std::vector<double> rewards;        // final, inflated by 1/E(p)
  std::vector<double> pre_inflation;  // bisection answers
  AttackSequence greedy_sequence;
  double alpha_p = 0.0;
  double approx_error_e = 0.0;
  bool already_safe = false;  // greedy found no second attack to repel
  std::vector<ServiceRewardTrace> bisection_traces;
  std::string integrality_gap_note;
};

// Full reward-selection pipeline: greedy attack sequence, per-service minimal
// rewards against (B1, B2, A2) from its first two steps, then inflation by
// the approximation error. When the greedy sequence is shorter than two
// steps the graph is marked already-safe and the initialization rewards are
// returned uninflated.
RewardSolution compute_optimal_rewards(const RestakingGraph& g,
                                       const IncentiveSchedule& sched,
                                       std::uint32_t horizon, double p);

}  // namespace restake

#endif  // RESTAKE_OPTIMIZER_HPP_
