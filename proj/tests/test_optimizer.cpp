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

#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>

#include "restake/dynamics.hpp"
#include "restake/optimizer.hpp"
#include "restake/subsets.hpp"
#include "test_util.hpp"

using namespace restake;
using namespace restake::testing;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Independent brute force over the discrete joiner family: enumerate every
// subset of the statically eligible candidates, keep those meeting the
// self-referential lower bound, and evaluate the log objective directly.
double discrete_objective(const RestakingGraph& g,
                          const IncentiveSchedule& sched, ServiceId s,
                          Mask b1, Mask b2, Mask a2, double r) {
  double c = sched.costs[s.v];
  if (!(r > c)) return kNegInf;
  Mask boundary = g.service_boundary(s);
  double pool_before = g.stake_of_mask(boundary);
  double pool_after = g.stake_of_mask(boundary & ~b1);
  double scale = c / (r - c);
  Mask candidates = 0;
  for (std::uint32_t v = 0; v < g.num_operators(); ++v) {
    Mask bit = Mask(1) << v;
    if ((b1 & bit) || (boundary & bit)) continue;
    if (!leq(g.sigma(OperatorId(v)), scale * pool_before)) continue;
    candidates |= bit;
  }
  auto eval = [&](Mask d) {
    double sum = 0.0;
    Mask am = a2;
    while (am != 0) {
      unsigned a = std::countr_zero(am);
      am &= am - 1;
      ServiceId aid(a);
      Mask pm = g.service_boundary(aid) & ~b1;
      double pool = g.stake_of_mask(pm) + g.stake_of_mask(d & ~pm);
      double covered =
          g.stake_of_mask(pm & b2) + g.stake_of_mask(d & ~pm & b2);
      double arg = g.alpha(aid) * pool - covered;
      if (!(arg > 0.0)) return kNegInf;
      sum += std::log(arg);
    }
    return sum;
  };
  double best = eval(0);
  for_each_subset(candidates, g.num_operators(), [&](Mask d) {
    double sigma_d = g.stake_of_mask(d);
    for (Mask m = d; m != 0; m &= m - 1) {
      std::uint32_t v = static_cast<std::uint32_t>(std::countr_zero(m));
      if (!geq(g.sigma(OperatorId(v)), scale * (pool_after + sigma_d))) {
        return false;
      }
    }
    best = std::max(best, eval(d));
    return false;
  });
  return best;
}

// Two single-operator services and a free joiner; a strictly profitable
// two-step cascade that rebalancing can cut to one step.
RestakingGraph two_step_family() {
  return make_graph({1.0, 1.0, 1.0}, {{1.5, 1.0}, {1.3, 1.0}},
                    {{0, 0}, {1, 1}});
}

}  // namespace

TEST_CASE("sequential profit of the union-appa two-step cascade") {
  RestakingGraph g = graph_from_document(scenario_union_appa());
  SequentialProfitQuery query{ProfitSpec::maxnorm(), 2, g};
  CHECK(sequential_profit(query, union_appa_script()) ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK(sequential_profit(query, {}) == 0.0);

  AttackSequence bad = {Attack{svc({0}), ops({0, 1})}};
  CHECK_THROWS_AS(sequential_profit(query, bad), DomainError);
}

TEST_CASE("sequential profit of the canonical fig2 cascade") {
  RestakingGraph g = fig3_graph();  // fig2 after the seed loss
  SequentialProfitQuery query{ProfitSpec::linear(), 4, g};
  // Per-step nets: (2-2) + (4-4) + (2-1) + (8-4).
  CHECK(sequential_profit(query, fig3_cascade_script()) ==
        doctest::Approx(5.0));
}

TEST_CASE("greedy sequence on a secure graph is empty") {
  SequentialProfitQuery query{ProfitSpec::linear(), 3, fig1_graph(0.6)};
  CHECK(greedy_sequence(query).empty());
}

TEST_CASE("greedy on the seed-lossed fig2 takes the one-shot optimum") {
  // Every scripted step has zero net profit under the linear f, while the
  // whole-graph attack nets 16 - 11 = 5; greedy takes it in one step and
  // that value is also the sequence optimum.
  RestakingGraph g = fig3_graph();
  SequentialProfitQuery query{ProfitSpec::linear(), 4, g};
  AttackSequence greedy = greedy_sequence(query);
  REQUIRE(greedy.size() == 1);
  CHECK(greedy[0].services.size() == 6);
  CHECK(greedy[0].operators.size() == 11);
  CHECK(sequential_profit(query, greedy) == doctest::Approx(5.0));
}

TEST_CASE("greedy never appends a nonpositive marginal") {
  // All attacks on the fig3 graph have zero net under pnorm(2).
  SequentialProfitQuery query{ProfitSpec::pnorm(2.0), 3, fig3_graph()};
  CHECK(greedy_sequence(query).empty());
}

TEST_CASE("greedy respects the horizon cap") {
  SequentialProfitQuery query{ProfitSpec::pnorm(2.0), 7, fig1_graph()};
  CHECK_THROWS_AS(greedy_sequence(query), ResourceError);
}

TEST_CASE("alpha and approximation error formulas") {
  // kappa = 0.5, S = 16, p = 2.
  std::vector<std::pair<double, double>> svcs;
  for (int i = 0; i < 16; ++i) {
    svcs.push_back({i == 0 ? 1.0 : 2.0, 0.5});
  }
  RestakingGraph g = make_graph({1.0}, svcs, {{0, 0}});
  auto [alpha, err] = alpha_and_error(g, 2.0);
  CHECK(alpha == doctest::Approx(0.125));
  CHECK(err == doctest::Approx(1.0 - std::exp(-0.125)));
  CHECK(err == doctest::Approx(0.117503).epsilon(1e-5));
  // E >= kappa / (2 S^(1/p)) whenever alpha <= 1/2.
  CHECK(err >= 0.5 / (2.0 * 4.0));

  RestakingGraph zero = make_graph({1.0}, {{0.0, 0.5}}, {{0, 0}});
  CHECK_THROWS_AS(alpha_and_error(zero, 2.0), DomainError);
}

TEST_CASE("relaxed objective sentinels and feasibility at the origin") {
  RestakingGraph g = two_step_family();
  IncentiveSchedule sched = IncentiveSchedule::uniform(2, 1.0, 1.0);
  // Negative radius (r - c) k < pool: infeasible sentinel. Service 1 keeps
  // its unit pool after B1 = {0}, so r = 1.5 gives radius -0.5.
  CHECK(relaxed_objective(g, sched, ServiceId(1), ops({0}), ops({1}),
                          svc({1}), 1.5, 1.0) == kNegInf);

  // A singleton A2 already holding slack at D = 0: alpha pool > covered.
  RestakingGraph slack = make_graph({1.0, 1.0, 1.0}, {{1.0, 0.4}},
                                    {{0, 0}, {1, 0}, {2, 0}});
  IncentiveSchedule s2 = IncentiveSchedule::uniform(1, 5.0, 1.0);
  // pool = 3, covered by B2 = {0}: 0.4 * 3 - 1 = 0.2 > 0 at the origin.
  double value = relaxed_objective(slack, s2, ServiceId(0), {}, ops({0}),
                                   svc({0}), 5.0, 1.0);
  CHECK(value >= std::log(0.2) - 1e-6);
}

TEST_CASE("relaxation dominates the discrete objective") {
  Rng rng(51);
  int finite = 0;
  for (int trial = 0; trial < 60; ++trial) {
    RestakingGraph g = random_graph(rng, 3, 7, 0.5);
    double c = 1.0 + rng.next_double();
    Mask all_ops = g.all_operators_mask();
    Mask b1 = rng.next_u64() & all_ops & 0x7;  // small slashed set
    Mask b2 = rng.next_u64() & all_ops & ~b1;
    if (b2 == 0) continue;
    Mask a2 = (1 + (rng.next_u64() & 0x3)) & g.all_services_mask();
    if (a2 == 0) continue;
    ServiceId s(static_cast<std::uint32_t>(rng.next_below(3)));
    // Keep the radius nonnegative: the relaxation's domain starts at the
    // initialization reward.
    double sigma_top = 0.0;
    for (const OperatorRecord& v : g.operators()) {
      sigma_top = std::max(sigma_top, v.sigma);
    }
    double pool_s = g.stake_of_mask(g.service_boundary(s) & ~b1);
    double r = c + (pool_s + 6.0 * rng.next_double()) / sigma_top;
    IncentiveSchedule sched = IncentiveSchedule::uniform(3, r, c);

    double discrete = discrete_objective(g, sched, s, b1, b2, a2, r);
    if (discrete == kNegInf) continue;
    ++finite;
    double sigma_max = 0.0;
    for (const OperatorRecord& v : g.operators()) {
      sigma_max = std::max(sigma_max, v.sigma);
    }
    double relaxed =
        relaxed_objective(g, sched, s, mask_to_operators(b1),
                          mask_to_operators(b2), mask_to_services(a2), r,
                          sigma_max);
    CHECK(relaxed >= discrete - 1e-6);
  }
  CHECK(finite >= 15);
}

TEST_CASE("minimal reward on the fig3 bottom service is exactly six") {
  RestakingGraph g = fig3_graph();
  IncentiveSchedule sched = IncentiveSchedule::uniform(6, 0.0, 1.0);
  AttackSequence script = fig3_cascade_script();
  MinimalReward mr = minimal_reward(g, sched, ServiceId(1),
                                    script[0].operators, script[1].operators,
                                    script[1].services);
  CHECK(mr.value == doctest::Approx(6.0).epsilon(1e-5));
  CHECK(mr.value > 6.0);  // feasible side of the boundary
  CHECK_FALSE(mr.probes.empty());
}

TEST_CASE("minimal reward returns the initialization when it is feasible") {
  // The initialization reward sits exactly at radius zero; it succeeds when
  // the origin already holds slack: alpha * pool - covered > 1 here.
  RestakingGraph g = make_graph({1.0, 2.0, 2.0, 2.0},
                                {{1.5, 1.0}, {2.5, 0.9}},
                                {{0, 0}, {1, 1}, {2, 1}, {3, 1}});
  IncentiveSchedule sched = IncentiveSchedule::uniform(2, 0.0, 0.2);
  MinimalReward mr =
      minimal_reward(g, sched, ServiceId(1), ops({0}), ops({1}), svc({1}));
  CHECK(mr.value == doctest::Approx(mr.initial));
  CHECK(mr.initial == doctest::Approx(3.2));
  REQUIRE(mr.probes.size() == 1);
  CHECK(mr.probes[0].feasible);
}

TEST_CASE("bisection answer is tight to relative 1e-6") {
  RestakingGraph g = two_step_family();
  IncentiveSchedule sched = IncentiveSchedule::uniform(2, 0.0, 1.0);
  MinimalReward mr =
      minimal_reward(g, sched, ServiceId(1), ops({0}), ops({1}), svc({1}));
  // Feasibility needs joined mass above 1 from the free unit operator:
  // radius (r - 1) - 1 > 1.
  CHECK(mr.value == doctest::Approx(3.0).epsilon(1e-5));
  double sigma_max = 1.0;
  CHECK(relaxed_objective(g, sched, ServiceId(1), ops({0}), ops({1}),
                          svc({1}), mr.value, sigma_max) > 0.0);
  double below = relaxed_objective(g, sched, ServiceId(1), ops({0}), ops({1}),
                                   svc({1}), mr.value * (1.0 - 1e-6),
                                   sigma_max);
  CHECK((below == kNegInf || below <= 0.0));
}

TEST_CASE("minimal reward is nonincreasing as the cost decreases") {
  RestakingGraph g = two_step_family();
  double prev = std::numeric_limits<double>::infinity();
  for (double c : {2.0, 1.5, 1.0, 0.5, 0.25}) {
    IncentiveSchedule sched = IncentiveSchedule::uniform(2, 0.0, c);
    MinimalReward mr =
        minimal_reward(g, sched, ServiceId(1), ops({0}), ops({1}), svc({1}));
    CHECK(mr.value <= prev + 1e-9);
    prev = mr.value;
  }
}

TEST_CASE("minimal reward reports infeasibility when no mass can help") {
  // alpha = 0 keeps the log argument nonpositive for every reward.
  RestakingGraph g = make_graph({1.0, 1.0}, {{1.0, 0.0}}, {{0, 0}, {1, 0}});
  IncentiveSchedule sched = IncentiveSchedule::uniform(1, 0.0, 1.0);
  CHECK_THROWS_AS(
      minimal_reward(g, sched, ServiceId(0), {}, ops({0}), svc({0})),
      InfeasibleError);
}

TEST_CASE("compute_optimal_rewards marks secure graphs already safe") {
  RestakingGraph g = fig1_graph(0.6);
  IncentiveSchedule sched = IncentiveSchedule::uniform(2, 0.0, 1.0);
  RewardSolution sol = compute_optimal_rewards(g, sched, 3, 2.0);
  CHECK(sol.already_safe);
  CHECK(sol.greedy_sequence.empty());
  for (std::uint32_t s = 0; s < 2; ++s) {
    // Initialization: sigma_ds / sigma_max + c_s = 2.2 / 1.1 + 1.
    CHECK(sol.rewards[s] == doctest::Approx(3.0));
    CHECK(sol.pre_inflation[s] == sol.rewards[s]);
  }
}

TEST_CASE("full pipeline halts the two-step family") {
  RestakingGraph g = two_step_family();
  IncentiveSchedule sched = IncentiveSchedule::uniform(2, 0.0, 1.0);
  RewardSolution sol = compute_optimal_rewards(g, sched, 2, 2.0);
  CHECK_FALSE(sol.already_safe);
  REQUIRE(sol.greedy_sequence.size() == 2);
  CHECK(sol.greedy_sequence[0].services == svc({0}));
  CHECK(sol.greedy_sequence[0].operators == ops({0}));
  CHECK(sol.greedy_sequence[1].services == svc({1}));
  CHECK(sol.greedy_sequence[1].operators == ops({1}));

  auto [alpha, err] = alpha_and_error(g, 2.0);
  CHECK(sol.alpha_p == doctest::Approx(alpha));
  CHECK(sol.approx_error_e == doctest::Approx(err));
  for (std::uint32_t s = 0; s < 2; ++s) {
    CHECK(sol.rewards[s] == doctest::Approx(sol.pre_inflation[s] / err));
    CHECK(sol.rewards[s] >= sol.pre_inflation[s]);
  }
  // The repelled service's bisection answer: joined mass above 1 needs
  // radius (r - 1) - 1 > 1.
  CHECK(sol.pre_inflation[1] == doctest::Approx(3.0).epsilon(1e-5));

  // End to end: the inflated rewards repel the second greedy attack.
  IncentiveSchedule chosen = sched;
  chosen.rewards = sol.rewards;
  GameState state(g, chosen, ProfitSpec::pnorm(2.0));
  auto [after1, log1] = play_round(state, sol.greedy_sequence[0]);
  CHECK(log1.verdict == RoundVerdict::kExecuted);
  auto [after2, log2] = play_round(after1, sol.greedy_sequence[1]);
  CHECK(log2.verdict == RoundVerdict::kRepelledFeasibility);
}

TEST_CASE("greedy ratio against brute force on seeded instances") {
  Rng rng(52);
  int meaningful = 0;
  for (int trial = 0; trial < 25; ++trial) {
    RestakingGraph g = random_attackable_graph(rng, 4, 6);
    for (double p : {2.0, 4.0}) {
      SequentialProfitQuery query{ProfitSpec::pnorm(p), 3, g};
      AttackSequence greedy = greedy_sequence(query);
      double greedy_value =
          greedy.empty() ? 0.0 : sequential_profit(query, greedy);

      // Brute force over all valid sequences of length <= 3.
      struct Brute {
        const RestakingGraph& g;
        const ProfitSpec& spec;
        double best = 0.0;
        void run(Mask ops_left, Mask svcs_left, double acc, int depth) {
          best = std::max(best, acc);
          if (depth == 0) return;
          std::vector<Mask> boundaries(g.num_services(), 0);
          for (std::uint32_t s = 0; s < g.num_services(); ++s) {
            if ((svcs_left >> s) & 1) {
              boundaries[s] = g.service_boundary(ServiceId(s)) & ops_left;
            }
          }
          for (Mask a = 1; a <= svcs_left && svcs_left != 0; ++a) {
            if ((a & ~svcs_left) == 0) {
              for (Mask b = 1; b <= ops_left && ops_left != 0; ++b) {
                if ((b & ~ops_left) == 0 &&
                    is_valid_attack_masks(g, spec, a, b, boundaries)) {
                  run(ops_left & ~b, svcs_left & ~a,
                      acc + profit(spec, g, a) - g.stake_of_mask(b),
                      depth - 1);
                }
                if (b == ops_left) break;
              }
            }
            if (a == svcs_left) break;
          }
        }
      };
      Brute brute{g, query.spec};
      brute.run(g.all_operators_mask(), g.all_services_mask(), 0.0, 3);
      if (brute.best > 1e-9) ++meaningful;

      auto [alpha, err] = alpha_and_error(g, p);
      CHECK(greedy_value >= err * brute.best - 1e-9);
    }
  }
  CHECK(meaningful >= 10);
}
