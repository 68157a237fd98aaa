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

#ifndef RESTAKE_TESTS_TEST_UTIL_HPP_
#define RESTAKE_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <vector>

#include "restake/graph.hpp"
#include "restake/incentives.hpp"
#include "restake/scenarios.hpp"
#include "restake/serialize.hpp"

namespace restake::testing {

inline std::vector<ServiceId> svc(std::initializer_list<std::uint32_t> ids) {
  std::vector<ServiceId> out;
  for (std::uint32_t i : ids) out.push_back(ServiceId(i));
  return out;
}

inline std::vector<OperatorId> ops(std::initializer_list<std::uint32_t> ids) {
  std::vector<OperatorId> out;
  for (std::uint32_t i : ids) out.push_back(OperatorId(i));
  return out;
}

// Compact builder: stakes, (pi, alpha) pairs, edges as (operator, service).
inline RestakingGraph make_graph(
    const std::vector<double>& sigmas,
    const std::vector<std::pair<double, double>>& services,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  std::vector<ServiceRecord> svcs;
  for (std::size_t i = 0; i < services.size(); ++i) {
    svcs.push_back(ServiceRecord{ServiceId(static_cast<std::uint32_t>(i)),
                                 services[i].first, services[i].second});
  }
  std::vector<OperatorRecord> operators;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    operators.push_back(
        OperatorRecord{OperatorId(static_cast<std::uint32_t>(i)), sigmas[i]});
  }
  std::vector<std::pair<OperatorId, ServiceId>> edge_list;
  for (const auto& [v, s] : edges) {
    edge_list.emplace_back(OperatorId(v), ServiceId(s));
  }
  return RestakingGraph(std::move(svcs), std::move(operators),
                        std::move(edge_list));
}

inline RestakingGraph fig1_graph(double alpha = 1.0 / 3.0) {
  return graph_from_document(scenario_fig1(alpha));
}

inline RestakingGraph fig2_graph() {
  return graph_from_document(scenario_fig2());
}

inline RestakingGraph fig3_graph() {
  return graph_from_document(scenario_fig3());
}

// Seeded generator biased toward attackable graphs: low collusion
// thresholds and profits comparable to single stakes.
inline RestakingGraph random_attackable_graph(Rng& rng, std::uint32_t services,
                                              std::uint32_t operators) {
  std::vector<std::pair<double, double>> svcs;
  for (std::uint32_t s = 0; s < services; ++s) {
    svcs.push_back({0.8 + 2.2 * rng.next_double(),
                    0.05 + 0.3 * rng.next_double()});
  }
  std::vector<double> sigmas;
  for (std::uint32_t v = 0; v < operators; ++v) {
    sigmas.push_back(0.5 + 1.0 * rng.next_double());
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t v = 0; v < operators; ++v) {
    for (std::uint32_t s = 0; s < services; ++s) {
      if (rng.next_double() < 0.6) edges.push_back({v, s});
    }
  }
  return make_graph(sigmas, svcs, edges);
}

// Seeded generator for generic graphs (all pi > 0).
inline RestakingGraph random_graph(Rng& rng, std::uint32_t services,
                                   std::uint32_t operators,
                                   double edge_prob = 0.6) {
  std::vector<std::pair<double, double>> svcs;
  for (std::uint32_t s = 0; s < services; ++s) {
    svcs.push_back({0.2 + 2.3 * rng.next_double(),
                    0.1 + 0.8 * rng.next_double()});
  }
  std::vector<double> sigmas;
  for (std::uint32_t v = 0; v < operators; ++v) {
    sigmas.push_back(0.5 + 1.5 * rng.next_double());
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t v = 0; v < operators; ++v) {
    for (std::uint32_t s = 0; s < services; ++s) {
      if (rng.next_double() < edge_prob) edges.push_back({v, s});
    }
  }
  return make_graph(sigmas, svcs, edges);
}

// Instance of the small-overlap regime used by the coalition- and
// cascade-bound suites: S = 3 services sharing a common block of thirteen
// unit-stake operators, one heavy private operator per service, and a few
// free unit-stake operators. With max pi = S^(-1/p) the ratio K satisfies
// K S^(1/p) = 1, so every valid p-attack slashes exactly one unit operator.
//
// Hypotheses realized (and re-checked by the suites):
//   |ds n dt| = 13 >= (1 + delta) K S^(1/p) with delta = 12,
//   theta_max = 13 <= sigma_max K S^(1/p) = 13,
//   delta sigma_min / sigma_max = 12/13 >= 1 - 1/(e (S-1)^2) ~ 0.908,
//   sigma_ds = 26 >= (1 + sigma_min) K sigma_max S^(1/p) = 26.
struct SmallOverlapInstance {
  RestakingGraph graph;
  IncentiveSchedule schedule;
  double p = 2.0;
  double k_stake = 0.0;          // max pi / min sigma
  double k0 = 0.0;               // K S^(1/p)
  double delta = 0.0;            // intersection slack
  double sigma_min = 1.0;
  double sigma_max = 13.0;
};

// `alpha_large` selects the high-threshold regime (alpha sigma_max >= 2);
// otherwise alpha is small enough for unit-operator coalitions to clear it.
inline SmallOverlapInstance make_small_overlap_instance(Rng& rng, double p,
                                             bool alpha_large) {
  constexpr std::uint32_t kShared = 13;
  constexpr std::uint32_t kServices = 3;
  constexpr double kSigmaMax = 13.0;
  const double max_pi = std::pow(3.0, -1.0 / p);

  double alpha = alpha_large ? (2.0 / kSigmaMax) * (1.0 + rng.next_double())
                             : 0.005 + rng.next_double() * (1.0 / 26.5 - 0.005);

  std::vector<std::pair<double, double>> services(
      kServices, {max_pi, alpha});
  std::vector<double> sigmas;
  for (std::uint32_t v = 0; v < kShared; ++v) sigmas.push_back(1.0);
  for (std::uint32_t s = 0; s < kServices; ++s) sigmas.push_back(kSigmaMax);
  for (int i = 0; i < 4; ++i) sigmas.push_back(1.0);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t v = 0; v < kShared; ++v) {
    for (std::uint32_t s = 0; s < kServices; ++s) edges.push_back({v, s});
  }
  for (std::uint32_t s = 0; s < kServices; ++s) {
    edges.push_back({kShared + s, s});
  }

  SmallOverlapInstance out{make_graph(sigmas, services, edges),
                      IncentiveSchedule::uniform(kServices, 27.0, 1.0),
                      p,
                      max_pi,
                      max_pi * std::pow(3.0, 1.0 / p),
                      12.0,
                      1.0,
                      kSigmaMax};
  return out;
}

// Instance family for the overlap-discount bound: small K, overlaps kept to
// one or two shared unit operators per service pair, heavier private
// operators, and free unit operators that can rebalance in.
struct DiscountInstance {
  RestakingGraph graph;
  IncentiveSchedule schedule;
  double p = 2.0;
  double k_stake = 0.0;
};

inline DiscountInstance make_discount_instance(Rng& rng, double p) {
  constexpr std::uint32_t kServices = 3;
  std::vector<std::pair<double, double>> services;
  double max_pi = 0.0;
  for (std::uint32_t s = 0; s < kServices; ++s) {
    double pi = 0.2 + 0.4 * rng.next_double();
    max_pi = pi > max_pi ? pi : max_pi;
    services.push_back({pi, 0.2 + 0.4 * rng.next_double()});
  }
  std::vector<double> sigmas;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::uint32_t next = 0;
  // One shared unit operator per service pair, sometimes two.
  for (std::uint32_t s = 0; s < kServices; ++s) {
    for (std::uint32_t t = s + 1; t < kServices; ++t) {
      std::uint32_t copies = 1 + (rng.next_double() < 0.4 ? 1 : 0);
      for (std::uint32_t i = 0; i < copies; ++i) {
        sigmas.push_back(1.0);
        edges.push_back({next, s});
        edges.push_back({next, t});
        ++next;
      }
    }
  }
  // Two private operators per service.
  for (std::uint32_t s = 0; s < kServices; ++s) {
    for (int i = 0; i < 2; ++i) {
      sigmas.push_back(1.0 + rng.next_double());
      edges.push_back({next, s});
      ++next;
    }
  }
  // Free unit operators.
  sigmas.push_back(1.0);
  sigmas.push_back(1.0);

  double s_scale = std::pow(3.0, 1.0 / p);
  double r = (4.0 + 2.0 * rng.next_double()) * s_scale;
  IncentiveSchedule sched = IncentiveSchedule::uniform(kServices, r, 1.0);
  for (std::uint32_t s = 0; s < kServices; ++s) {
    sched.discounts[s] = min_discount(kServices, p, r);
  }
  return DiscountInstance{make_graph(sigmas, services, edges), sched, p,
                          max_pi};
}

}  // namespace restake::testing

#endif  // RESTAKE_TESTS_TEST_UTIL_HPP_
