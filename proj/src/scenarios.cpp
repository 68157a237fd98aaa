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

#include "restake/scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace restake {
namespace {

ServiceDoc make_service(std::uint32_t id, double pi, double alpha) {
  ServiceDoc s;
  s.id = id;
  s.pi = pi;
  s.alpha = alpha;
  return s;
}

Attack make_attack(std::vector<std::uint32_t> services,
                   std::vector<std::uint32_t> operators) {
  Attack a;
  for (std::uint32_t s : services) a.services.push_back(ServiceId(s));
  for (std::uint32_t v : operators) a.operators.push_back(OperatorId(v));
  return a;
}

}  // namespace

GraphDocument scenario_fig1(double alpha) {
  GraphDocument doc;
  doc.profit.kind = "linear";
  doc.services.push_back(make_service(0, 1.0, alpha));
  doc.services.push_back(make_service(1, 1.0, alpha));
  doc.operators.push_back(OperatorDoc{0, 1.1});
  doc.operators.push_back(OperatorDoc{1, 1.1});
  doc.edges = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  return doc;
}

GraphDocument scenario_fig2() {
  GraphDocument doc;
  doc.profit.kind = "linear";
  // Operators 0..5 form the top row, 6..11 the bottom row.
  for (std::uint32_t v = 0; v < 12; ++v) {
    doc.operators.push_back(OperatorDoc{v, 1.0});
  }
  // Row services first, then the four column services.
  doc.services.push_back(make_service(0, 4.0, 1.0));
  doc.services.push_back(make_service(1, 4.0, 1.0));
  doc.services.push_back(make_service(2, 2.0, 1.0));
  doc.services.push_back(make_service(3, 2.0, 1.0));
  doc.services.push_back(make_service(4, 2.0, 1.0));
  doc.services.push_back(make_service(5, 2.0, 1.0));
  for (std::uint32_t v = 0; v < 6; ++v) doc.edges.push_back({v, 0});
  for (std::uint32_t v = 6; v < 12; ++v) doc.edges.push_back({v, 1});
  const std::uint32_t reds[4][3] = {
      {0, 6, 7},   // t0, b0, b1
      {1, 2, 8},   // t1, t2, b2
      {3, 9, 10},  // t3, b3, b4
      {4, 5, 11},  // t4, t5, b5
  };
  for (std::uint32_t r = 0; r < 4; ++r) {
    for (std::uint32_t j = 0; j < 3; ++j) {
      doc.edges.push_back({reds[r][j], 2 + r});
    }
  }
  std::sort(doc.edges.begin(), doc.edges.end());
  return doc;
}

GraphDocument scenario_fig3() {
  GraphDocument fig2 = scenario_fig2();
  RestakingGraph g = graph_from_document(fig2);
  RemovalResult removed = remove_attack(g, {}, {OperatorId(0)});
  GraphDocument doc =
      document_from_graph(removed.graph, ProfitSpec::linear(), nullptr);
  for (ServiceDoc& s : doc.services) {
    s.reward = 0.0;
    s.cost = 1.0;
    s.discount = 0.0;
  }
  return doc;
}

AttackSequence fig2_cascade_script() {
  AttackSequence script;
  script.push_back(make_attack({}, {0}));          // seed loss of t0
  script.push_back(make_attack({2}, {6, 7}));      // left column service
  script.push_back(make_attack({1}, {8, 9, 10, 11}));  // bottom row service
  script.push_back(make_attack({4}, {3}));         // middle column service
  script.push_back(make_attack({0, 3, 5}, {1, 2, 4, 5}));  // top row remnant
  return script;
}

AttackSequence fig3_cascade_script() {
  // Same cascade in the post-seed id space (old operator v maps to v - 1).
  AttackSequence script;
  script.push_back(make_attack({2}, {5, 6}));
  script.push_back(make_attack({1}, {7, 8, 9, 10}));
  script.push_back(make_attack({4}, {2}));
  script.push_back(make_attack({0, 3, 5}, {0, 1, 3, 4}));
  return script;
}

GraphDocument scenario_overlap_appb(const AppBParams& params) {
  const double sigma = params.sigma;
  const double sigma_cap = params.k * params.sigma;
  const double alpha = params.alpha;
  const double pi[2] = {params.pi1, params.pi2};

  for (int i = 0; i < 2; ++i) {
    if (!(pi[i] > sigma)) {
      throw GenerationError("violated: pi_i > sigma_i (attack ({s_i},{v_i}) "
                            "must be profitable)");
    }
    if (!(sigma < alpha * (sigma + sigma_cap))) {
      throw GenerationError(
          "violated: sigma_i < alpha (sigma_i + sigma_cap) (attack "
          "({s_i},{v_i}) must be infeasible)");
    }
    if (!(pi[i] > sigma_cap)) {
      throw GenerationError(
          "violated: pi_i > sigma_cap (attack ({s_i},{v_cap}) must be "
          "profitable)");
    }
    if (!(sigma_cap < alpha * (sigma + sigma_cap))) {
      throw GenerationError(
          "violated: sigma_cap < alpha (sigma_i + sigma_cap) (attack "
          "({s_i},{v_cap}) must be infeasible)");
    }
    if (!(pi[i] < sigma + sigma_cap)) {
      throw GenerationError(
          "violated: pi_i < sigma_i + sigma_cap (attack ({s_i},{v_i,v_cap}) "
          "must be unprofitable)");
    }
    if (!(alpha < 1.0)) {
      throw GenerationError(
          "violated: alpha < 1 (full coalitions must be feasible)");
    }
  }
  double lhs = pi[0] + pi[1];
  double rhs = 2.0 * sigma + sigma_cap;
  if (std::abs(lhs - rhs) > comparison_slack(lhs, rhs)) {
    throw GenerationError(
        "violated: pi_1 + pi_2 = sigma_1 + sigma_2 + sigma_cap (full attack "
        "must have zero profit)");
  }

  GraphDocument doc;
  doc.profit.kind = "linear";
  doc.services.push_back(make_service(0, params.pi1, alpha));
  doc.services.push_back(make_service(1, params.pi2, alpha));
  doc.operators.push_back(OperatorDoc{0, sigma});      // v_1
  doc.operators.push_back(OperatorDoc{1, sigma_cap});  // v_cap
  doc.operators.push_back(OperatorDoc{2, sigma});      // v_2
  doc.edges = {{0, 0}, {1, 0}, {1, 1}, {2, 1}};
  return doc;
}

GraphDocument scenario_union_appa() {
  GraphDocument doc;
  doc.profit.kind = "maxnorm";
  doc.services.push_back(make_service(0, 1.1, 1.0));
  doc.services.push_back(make_service(1, 1.1, 1.0));
  doc.operators.push_back(OperatorDoc{0, 1.0});
  doc.operators.push_back(OperatorDoc{1, 1.0});
  doc.edges = {{0, 0}, {1, 1}};
  return doc;
}

AttackSequence union_appa_script() {
  AttackSequence script;
  script.push_back(make_attack({0}, {0}));
  script.push_back(make_attack({1}, {1}));
  return script;
}

GraphDocument scenario_random(const RandomScenarioParams& params) {
  if (params.services == 0 || params.operators == 0) {
    throw GenerationError("random scenario needs at least one node per side");
  }
  if (params.services > kMaxSideSize || params.operators > kMaxSideSize) {
    throw GenerationError("random scenario exceeds the 64-node side cap");
  }
  if (!(params.edge_prob >= 0.0 && params.edge_prob <= 1.0)) {
    throw GenerationError("edge_prob must lie in [0, 1]");
  }
  Rng rng(params.seed);
  auto draw_stake = [&]() {
    double u = rng.next_double();
    if (params.stake_dist == "uniform") return 0.5 + 1.5 * u;
    if (params.stake_dist == "exponential") {
      return 0.5 - std::log(1.0 - u);
    }
    if (params.stake_dist == "pareto") {
      return 0.5 * std::pow(1.0 - u, -1.0 / 2.5);
    }
    throw GenerationError("unknown stake distribution: " + params.stake_dist);
  };

  GraphDocument doc;
  doc.profit.kind = "linear";
  for (std::uint32_t s = 0; s < params.services; ++s) {
    double pi = 0.2 + 2.3 * rng.next_double();
    double alpha = 0.1 + 0.8 * rng.next_double();
    doc.services.push_back(make_service(s, pi, alpha));
  }
  for (std::uint32_t v = 0; v < params.operators; ++v) {
    doc.operators.push_back(OperatorDoc{v, draw_stake()});
  }
  for (std::uint32_t v = 0; v < params.operators; ++v) {
    for (std::uint32_t s = 0; s < params.services; ++s) {
      if (rng.next_double() < params.edge_prob) {
        doc.edges.push_back({v, s});
      }
    }
  }
  return doc;
}

GraphDocument generate_scenario(const std::string& name, double fig1_alpha,
                                const AppBParams& appb,
                                const RandomScenarioParams& random) {
  if (name == "fig1") return scenario_fig1(fig1_alpha);
  if (name == "fig2") return scenario_fig2();
  if (name == "fig3") return scenario_fig3();
  if (name == "overlap-appb") return scenario_overlap_appb(appb);
  if (name == "union-appa") return scenario_union_appa();
  if (name == "random") return scenario_random(random);
  throw GenerationError("unknown scenario: " + name);
}

}  // namespace restake
