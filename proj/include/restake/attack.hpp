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

#ifndef RESTAKE_ATTACK_HPP_
#define RESTAKE_ATTACK_HPP_

#include <optional>
#include <vector>

#include "restake/profit.hpp"

namespace restake {

// A candidate attack: corrupt services A by slashing coalition B. Both sets
// must be nonempty; an "attack" that slashes nothing is excluded by
// construction even though eq-style profitability would hold vacuously.
struct Attack {
  std::vector<ServiceId> services;   // A, ascending
  std::vector<OperatorId> operators;  // B, ascending
};

// Ordered cascade: step t must be valid on the graph after all earlier
// removals, with pairwise-disjoint A's and B's.
using AttackSequence = std::vector<Attack>;

// Hard caps for the exhaustive engines.
inline constexpr std::uint32_t kMaxExhaustiveServices = 16;
inline constexpr std::uint32_t kMaxExhaustiveOperators = 20;

// Attack validity per the profitability and feasibility conditions:
//   f(pi, A) >= sigma_B   and   forall s in A: sigma_{B n ds} >= alpha_s sigma_ds
// Both comparisons are >= with the library tolerance.
bool is_valid_attack(const RestakingGraph& g, const ProfitSpec& spec,
                     const Attack& attack);

// All valid attacks with |A| <= max_services and |B| <= max_operators, in
// canonical order (A by size then lexicographic, then B likewise). An empty
// result means the graph is secure under those caps.
std::vector<Attack> find_attacks(
    const RestakingGraph& g, const ProfitSpec& spec,
    std::uint32_t max_services = kMaxExhaustiveServices,
    std::uint32_t max_operators = kMaxExhaustiveOperators);

struct SecurityReport {
  bool secure = false;
  std::optional<Attack> witness;       // first valid attack in canonical order
  std::optional<double> gamma_star;    // present only when secure
  double gamma_queried = 0.0;
  bool sufficient_condition_ok = false;  // per-operator sufficient condition
};

// Exhaustive security classification. gamma_star is the minimum of
// sigma_B / f(pi, A) - 1 over all feasible pairs with nonempty A and
// f(pi, A) > 0, reported when that minimum is positive. The sufficient
// condition is (1+gamma) sum_{s in dv} pi_s / (alpha_s sigma_ds) <= 1 for
// every operator.
SecurityReport security_report(const RestakingGraph& g, const ProfitSpec& spec,
                               double gamma = 0.0);

struct CascadeResult {
  double psi = 0.0;
  std::vector<OperatorId> best_d;  // seed coalition achieving the max
  AttackSequence best_sequence;
  double r_psi = 0.0;  // psi + sigma(union B_t) / sigma_V for the witness
};

// Exact cascade coefficient by exhaustive search: every seed coalition D with
// sigma_D <= psi sigma_V, then a memoized DFS over maximal attack sequences on
// the survivor graph. The DFS memo is keyed on the surviving (operator,
// service) mask pair; the operator mask alone does not determine the future
// optimum. Witness is the first optimum in canonical search order.
CascadeResult cascade_coefficient(const RestakingGraph& g,
                                  const ProfitSpec& spec, double psi);

struct UnionCheck {
  std::vector<bool> each_valid;   // per step, on the running graph
  bool union_valid = false;       // (u A_t, u B_t) against the original graph
  bool sufficient_invalidity = false;  // p-norm sufficient condition
};

// Union check for a cascade: per-step validity along the way, validity
// of the union attack on the original graph, and the sufficient condition
//   sum_t |A_t|^(1/p) < (min_v sigma_v) (sum_t |B_t|) / max_{s in uA} pi_s
// for PNorm/MaxNorm specs (false for other variants).
UnionCheck union_attack_check(const RestakingGraph& g, const ProfitSpec& spec,
                              const AttackSequence& sequence);

// K * S^(1/p) with K = max_s pi_s / min_v sigma_v; every p-attack satisfies
// |B| <= this bound. PNorm specs only.
double claim1_bound(const RestakingGraph& g, const ProfitSpec& spec);

// Mask-level validity used by the engines; exposed for the simulator, which
// keeps its own live-edge view.
bool is_valid_attack_masks(const RestakingGraph& g, const ProfitSpec& spec,
                           Mask services, Mask operators,
                           const std::vector<Mask>& boundaries);

}  // namespace restake

#endif  // RESTAKE_ATTACK_HPP_
