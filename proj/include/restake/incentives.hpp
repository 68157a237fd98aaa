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

#ifndef RESTAKE_INCENTIVES_HPP_
#define RESTAKE_INCENTIVES_HPP_

#include <vector>

#include "restake/graph.hpp"

namespace restake {

// Per-service rewards r_s >= 0, operating costs c_s >= 0, and overlap
// discounts delta_s in [0, 1]. Indexed by service id; must cover every
// service of the graph it is used with.
struct IncentiveSchedule {
  std::vector<double> rewards;
  std::vector<double> costs;
  std::vector<double> discounts;

  static IncentiveSchedule uniform(std::uint32_t services, double reward,
                                   double cost, double discount = 0.0);
  void validate(const RestakingGraph& g) const;
};

// Lowest-id service attaining the maximum overlap with s, or nothing when
// the graph has a single service. Ties in tau are resolved by lowest id for
// payout purposes.
struct TauInfo {
  bool defined = false;
  ServiceId tau{0};
  Mask tau_boundary = 0;
};
TauInfo tau_of(const RestakingGraph& g, ServiceId s);

// Pro-rata payout rho_{sv} = r_s sigma_v / sigma_ds, scaled by (1 - delta_s)
// when v belongs to the boundary of tau(s). Zero for non-edges.
double pro_rata_reward(const RestakingGraph& g, const IncentiveSchedule& sched,
                       ServiceId s, OperatorId v);

// sigma_v >= c_s sigma_ds / r_s, evaluated without division so that r = c = 0
// counts as profitable. sigma_ds reflects v's current membership.
bool profitable_without_impact(const RestakingGraph& g,
                               const IncentiveSchedule& sched, OperatorId v,
                               ServiceId s);

// Joining predicate: sigma_v >= c_s sigma_ds / (r_s - c_s) with sigma_ds
// excluding v; false whenever r_s <= c_s.
bool profitable_with_impact(const RestakingGraph& g,
                            const IncentiveSchedule& sched, OperatorId v,
                            ServiceId s);

// The feasible-joiner family for service s after coalition B is slashed:
//   D subset of (live operators minus B minus ds) with, for every v in D,
//     sigma_v >= c_s sigma_{ds - B + D} / (r_sv - c_s)   (profitable after)
//     sigma_v <= c_s sigma_{ds}        / (r_sv - c_s)   (not profitable before)
// where r_sv applies the tau-discount of the schedule. `max_rebalance_set`
// returns an exact argmax of sigma_D over the family.
struct RebalanceFeasibleSet {
  ServiceId service{0};
  std::vector<OperatorId> removed;     // B
  std::vector<OperatorId> candidates;  // operators passing the static filter
  std::vector<OperatorId> best;        // D maximizing sigma_D
  double sigma_d = 0.0;
  double kappa = 0.0;  // (|D| c / (r - c)) / (1 - |D| c / (r - c)), 0 if n/a
};

RebalanceFeasibleSet max_rebalance_set(const RestakingGraph& g,
                                       const IncentiveSchedule& sched,
                                       ServiceId s,
                                       const std::vector<OperatorId>& removed);

// Overlap-control discount floor: max(0, 1 - S^(1/p) / r_s), clamped to [0, 1].
double min_discount(std::uint32_t service_count, double p, double r_s);

}  // namespace restake

#endif  // RESTAKE_INCENTIVES_HPP_
