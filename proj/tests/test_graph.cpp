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

#include "restake/graph.hpp"
#include "test_util.hpp"

using namespace restake;
using namespace restake::testing;

TEST_CASE("construction rejects malformed graphs") {
  CHECK_THROWS_AS(make_graph({1.0}, {{1.0, 0.5}}, {{0, 0}, {0, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_graph({0.0}, {{1.0, 0.5}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_graph({1.0}, {{-1.0, 0.5}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_graph({1.0}, {{1.0, 1.5}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_graph({1.0}, {{1.0, 0.5}}, {{1, 0}}),
                  std::invalid_argument);
}

TEST_CASE("neighborhood on fig1 and empty boundaries") {
  RestakingGraph g = fig1_graph();
  CHECK(neighborhood(g, ServiceId(0)) == ops({0, 1}));
  CHECK(neighborhood(g, OperatorId(1)) == svc({0, 1}));

  RestakingGraph lonely = make_graph({1.0}, {{1.0, 0.5}}, {});
  CHECK(neighborhood(lonely, ServiceId(0)).empty());
  CHECK(neighborhood(lonely, OperatorId(0)).empty());
  CHECK_THROWS_AS(neighborhood(lonely, ServiceId(3)), LookupError);
}

TEST_CASE("neighborhood of fig2 left column service") {
  RestakingGraph g = fig2_graph();
  // First top-row operator plus the first two bottom-row operators;
  // cross-checked by the cascade replay in the dynamics tests.
  CHECK(neighborhood(g, ServiceId(2)) == ops({0, 6, 7}));
}

TEST_CASE("stake_of sums and handles the empty set") {
  RestakingGraph g = fig1_graph();
  CHECK(stake_of(g, ops({0, 1})) == doctest::Approx(2.2));
  CHECK(stake_of(g, {}) == 0.0);
  RestakingGraph f2 = fig2_graph();
  std::vector<OperatorId> all;
  for (std::uint32_t v = 0; v < 12; ++v) all.push_back(OperatorId(v));
  CHECK(stake_of(f2, all) == doctest::Approx(12.0));
  CHECK_THROWS_AS(stake_of(g, ops({9})), LookupError);
}

TEST_CASE("overlap is symmetric and matches hand values") {
  RestakingGraph g = fig1_graph();
  CHECK(overlap(g, ServiceId(0), ServiceId(1)) == doctest::Approx(2.2));
  CHECK(overlap(g, ServiceId(1), ServiceId(0)) == doctest::Approx(2.2));
  CHECK_THROWS_AS(overlap(g, ServiceId(0), ServiceId(0)), DomainError);

  RestakingGraph disjoint =
      make_graph({1.0, 1.0}, {{1.0, 0.5}, {1.0, 0.5}}, {{0, 0}, {1, 1}});
  CHECK(overlap(disjoint, ServiceId(0), ServiceId(1)) == 0.0);

  RestakingGraph appb = graph_from_document(scenario_overlap_appb());
  CHECK(overlap(appb, ServiceId(0), ServiceId(1)) == doctest::Approx(1.5));
}

TEST_CASE("overlap_bounds reports min, max, and all argmax partners") {
  RestakingGraph g = fig1_graph();
  OverlapBounds b = overlap_bounds(g, ServiceId(0));
  CHECK(b.theta_min == doctest::Approx(2.2));
  CHECK(b.theta_max == doctest::Approx(2.2));
  CHECK(b.tau_set == svc({1}));

  // Services sharing nothing tie every partner at zero overlap.
  RestakingGraph star = make_graph(
      {1.0, 1.0, 1.0}, {{1.0, 0.5}, {1.0, 0.5}, {1.0, 0.5}},
      {{0, 0}, {1, 1}, {2, 2}});
  OverlapBounds sb = overlap_bounds(star, ServiceId(0));
  CHECK(sb.theta_min == 0.0);
  CHECK(sb.theta_max == 0.0);
  CHECK(sb.tau_set == svc({1, 2}));

  RestakingGraph lonely = make_graph({1.0}, {{1.0, 0.5}}, {{0, 0}});
  CHECK_THROWS_AS(overlap_bounds(lonely, ServiceId(0)), DomainError);
}

TEST_CASE("overlap_bounds on fig2 matches brute force over pairs") {
  RestakingGraph g = fig2_graph();
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    double lo = 1e300;
    double hi = -1e300;
    for (std::uint32_t t = 0; t < g.num_services(); ++t) {
      if (t == s) continue;
      double theta = overlap(g, ServiceId(s), ServiceId(t));
      lo = std::min(lo, theta);
      hi = std::max(hi, theta);
    }
    OverlapBounds b = overlap_bounds(g, ServiceId(s));
    CHECK(b.theta_min == doctest::Approx(lo));
    CHECK(b.theta_max == doctest::Approx(hi));
  }
  // The top row service shares one or two top-row operators with each
  // column service and nothing with the bottom row.
  OverlapBounds top = overlap_bounds(g, ServiceId(0));
  CHECK(top.theta_min == 0.0);
  CHECK(top.theta_max == doctest::Approx(2.0));
}

TEST_CASE("overlap never exceeds either boundary stake") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    RestakingGraph g = random_graph(rng, 5, 8);
    for (std::uint32_t s = 0; s < g.num_services(); ++s) {
      for (std::uint32_t t = s + 1; t < g.num_services(); ++t) {
        double theta = overlap(g, ServiceId(s), ServiceId(t));
        CHECK(theta == overlap(g, ServiceId(t), ServiceId(s)));
        CHECK(theta <=
              std::min(g.boundary_stake(ServiceId(s)),
                       g.boundary_stake(ServiceId(t))) + 1e-12);
      }
    }
  }
}

TEST_CASE("remove_attack deletes and remaps while preserving the original") {
  RestakingGraph g = fig1_graph();
  RemovalResult identity = remove_attack(g, {}, {});
  CHECK(identity.graph.num_services() == 2);
  CHECK(identity.graph.num_operators() == 2);
  CHECK(identity.graph.edges().size() == 4);

  RemovalResult r = remove_attack(g, svc({0}), ops({0}));
  CHECK(r.graph.num_services() == 1);
  CHECK(r.graph.num_operators() == 1);
  CHECK(r.graph.edges().size() == 1);
  CHECK(r.service_map[0] == std::nullopt);
  CHECK(r.service_map[1] == ServiceId(0));
  CHECK(r.operator_map[1] == OperatorId(0));
  CHECK(g.num_services() == 2);  // original untouched

  RestakingGraph f2 = fig2_graph();
  RemovalResult seed = remove_attack(f2, {}, ops({0}));
  CHECK(seed.graph.num_operators() == 11);
  // The left column service keeps two operators after the seed loss.
  CHECK(neighborhood(seed.graph, ServiceId(2)).size() == 2);
}

TEST_CASE("removal conserves stake exactly") {
  Rng rng(2026);
  for (int trial = 0; trial < 50; ++trial) {
    RestakingGraph g = random_graph(rng, 4, 8);
    Mask b_mask = rng.next_u64() & g.all_operators_mask();
    std::vector<OperatorId> removed = mask_to_operators(b_mask);
    RemovalResult r = remove_attack(g, {}, removed);
    double removed_stake = stake_of(g, removed);
    CHECK(r.graph.total_stake() ==
          doctest::Approx(g.total_stake() - removed_stake).epsilon(1e-9));
  }
}
