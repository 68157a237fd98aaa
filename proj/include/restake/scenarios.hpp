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

#ifndef RESTAKE_SCENARIOS_HPP_
#define RESTAKE_SCENARIOS_HPP_

#include <string>

#include "restake/attack.hpp"
#include "restake/serialize.hpp"

namespace restake {

// Two services (pi = 1) fully shared by two operators (sigma = 1.1); secure
// iff alpha >= 1/2 under linear profit.
GraphDocument scenario_fig1(double alpha = 1.0 / 3.0);

// Twelve unit-stake operators in two rows; one row service per row (pi = 4)
// and four column services (pi = 2) tiling the rows; every alpha = 1.
GraphDocument scenario_fig2();

// The fig2 graph after the single-operator seed loss, with reward/cost
// fields attached (reward 0, cost 1). This is the halting-example start
// state: operator ids shift down by one because id 0 is gone.
GraphDocument scenario_fig3();

// The canonical four-step cascade on fig2 ids, preceded by the seed entry
// (empty A) that removes the first top-row operator.
AttackSequence fig2_cascade_script();

// The same four attacks in fig3 ids (post-seed id space).
AttackSequence fig3_cascade_script();

struct AppBParams {
  double sigma = 1.0;   // sigma_1 = sigma_2
  double k = 1.5;       // sigma_cap = k * sigma
  double pi1 = 1.75;
  double pi2 = 1.75;
  double alpha = 0.7;
};

// Three-operator overlap construction: each service has a private operator
// plus the shared one. Throws GenerationError naming the first violated
// inequality.
GraphDocument scenario_overlap_appb(const AppBParams& params = {});

// Two single-operator services with pi = 1.1 over unit stakes; under the
// max-norm profit each step of the two-step cascade nets 0.1 but their
// union is unprofitable.
GraphDocument scenario_union_appa();
AttackSequence union_appa_script();

struct RandomScenarioParams {
  std::uint64_t seed = 0;
  std::uint32_t services = 4;
  std::uint32_t operators = 6;
  double edge_prob = 0.6;
  std::string stake_dist = "uniform";  // uniform | exponential | pareto
};

// Seeded bipartite generator; a pure function of its parameters.
GraphDocument scenario_random(const RandomScenarioParams& params);

// Dispatch by name: fig1 | fig2 | fig3 | overlap-appb | union-appa | random.
GraphDocument generate_scenario(const std::string& name, double fig1_alpha,
                                const AppBParams& appb,
                                const RandomScenarioParams& random);

}  // namespace restake

#endif  // RESTAKE_SCENARIOS_HPP_
