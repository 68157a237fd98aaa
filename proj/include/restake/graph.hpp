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

#ifndef RESTAKE_GRAPH_HPP_
#define RESTAKE_GRAPH_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "restake/core.hpp"

namespace restake {

// A service purchasing security: corruption profit pi (stake units) and
// collusion threshold alpha (fraction of boundary stake).
struct ServiceRecord {
  ServiceId id;
  double pi = 0.0;
  double alpha = 0.0;
};

// A node operator with stake sigma > 0.
struct OperatorRecord {
  OperatorId id;
  double sigma = 0.0;
};

using Mask = std::uint64_t;

inline constexpr std::uint32_t kMaxSideSize = 64;  // bitmask representation cap

/// Immutable bipartite restaking graph: services with corruption profits and
/// collusion thresholds on one side, staked operators on the other.
///
/// Invariants enforced at construction: dense ids 0..n-1 per side, sigma > 0,
/// pi >= 0, alpha in [0, 1], edges reference existing ids, no duplicates.
/// Values are immutable after construction and safe to share across threads.
class RestakingGraph {
 public:
  RestakingGraph() = default;
  RestakingGraph(std::vector<ServiceRecord> services,
                 std::vector<OperatorRecord> operators,
                 std::vector<std::pair<OperatorId, ServiceId>> edges);

  std::uint32_t num_services() const {
    return static_cast<std::uint32_t>(services_.size());
  }
  std::uint32_t num_operators() const {
    return static_cast<std::uint32_t>(operators_.size());
  }

  const std::vector<ServiceRecord>& services() const { return services_; }
  const std::vector<OperatorRecord>& operators() const { return operators_; }
  // Canonically sorted (operator, service) pairs.
  const std::vector<std::pair<OperatorId, ServiceId>>& edges() const {
    return edges_;
  }

  const ServiceRecord& service(ServiceId s) const;
  const OperatorRecord& op(OperatorId v) const;
  bool has_edge(OperatorId v, ServiceId s) const;

  // Boundary masks: bit i of service_boundary(s) is operator i.
  Mask service_boundary(ServiceId s) const;
  Mask operator_boundary(OperatorId v) const;

  double sigma(OperatorId v) const { return op(v).sigma; }
  double pi(ServiceId s) const { return service(s).pi; }
  double alpha(ServiceId s) const { return service(s).alpha; }

  // Stake of an operator set given as a bitmask.
  double stake_of_mask(Mask operators) const;
  double total_stake() const { return total_stake_; }
  // Sum of pi over a service bitmask.
  double pi_of_mask(Mask services) const;

  double boundary_stake(ServiceId s) const {
    return stake_of_mask(service_boundary(s));
  }

  Mask all_operators_mask() const;
  Mask all_services_mask() const;

 private:
  std::vector<ServiceRecord> services_;
  std::vector<OperatorRecord> operators_;
  std::vector<std::pair<OperatorId, ServiceId>> edges_;
  std::vector<Mask> service_boundary_;   // per service: mask over operators
  std::vector<Mask> operator_boundary_;  // per operator: mask over services
  double total_stake_ = 0.0;
};

// Result of deleting an attack from a graph. Ids in the subgraph are
// re-densified; the maps give new ids for surviving old ids.
struct RemovalResult {
  RestakingGraph graph;
  std::vector<std::optional<ServiceId>> service_map;   // old -> new
  std::vector<std::optional<OperatorId>> operator_map;  // old -> new
};

std::vector<OperatorId> neighborhood(const RestakingGraph& g, ServiceId s);
std::vector<ServiceId> neighborhood(const RestakingGraph& g, OperatorId v);

// Total stake sigma_D of an operator set; sigma of the empty set is 0.
double stake_of(const RestakingGraph& g, const std::vector<OperatorId>& ops);

// theta_{s,t}: stake shared between the two services' operator sets.
double overlap(const RestakingGraph& g, ServiceId s, ServiceId t);

struct OverlapBounds {
  double theta_min = 0.0;
  double theta_max = 0.0;
  std::vector<ServiceId> tau_set;  // all argmax partners, ascending by id
};

// Min/max overlap of s against every other service. Requires |S| >= 2.
OverlapBounds overlap_bounds(const RestakingGraph& g, ServiceId s);

// Subgraph with services A and operators B deleted; the original graph is
// unchanged. Cascades keep the full history of intermediate graphs, so this
// returns a fresh value plus the id remapping.
RemovalResult remove_attack(const RestakingGraph& g,
                            const std::vector<ServiceId>& services,
                            const std::vector<OperatorId>& operators);

// Mask helpers shared by the engines.
std::vector<OperatorId> mask_to_operators(Mask m);
std::vector<ServiceId> mask_to_services(Mask m);
Mask operators_to_mask(const RestakingGraph& g,
                       const std::vector<OperatorId>& ops);
Mask services_to_mask(const RestakingGraph& g,
                      const std::vector<ServiceId>& svcs);

}  // namespace restake

#endif  // RESTAKE_GRAPH_HPP_
