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

#include "restake/graph.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <set>

namespace restake {

RestakingGraph::RestakingGraph(
    std::vector<ServiceRecord> services, std::vector<OperatorRecord> operators,
    std::vector<std::pair<OperatorId, ServiceId>> edges)
    : services_(std::move(services)),
      operators_(std::move(operators)),
      edges_(std::move(edges)) {
  if (services_.size() > kMaxSideSize || operators_.size() > kMaxSideSize) {
    throw ResourceError("graph side exceeds bitmask capacity of 64");
  }
  for (std::size_t i = 0; i < services_.size(); ++i) {
    const ServiceRecord& s = services_[i];
    if (s.id.v != i) {
      throw std::invalid_argument("service ids must be dense 0..n-1");
    }
    if (!(s.pi >= 0.0)) {
      throw std::invalid_argument("service pi must be >= 0");
    }
    if (!(s.alpha >= 0.0 && s.alpha <= 1.0)) {
      throw std::invalid_argument("service alpha must be in [0, 1]");
    }
  }
  total_stake_ = 0.0;
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    const OperatorRecord& v = operators_[i];
    if (v.id.v != i) {
      throw std::invalid_argument("operator ids must be dense 0..n-1");
    }
    if (!(v.sigma > 0.0)) {
      throw std::invalid_argument("operator sigma must be > 0");
    }
    total_stake_ += v.sigma;
  }
  service_boundary_.assign(services_.size(), 0);
  operator_boundary_.assign(operators_.size(), 0);
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& [v, s] : edges_) {
    if (v.v >= operators_.size() || s.v >= services_.size()) {
      throw std::invalid_argument("edge references unknown id");
    }
    if (!seen.insert({v.v, s.v}).second) {
      throw std::invalid_argument("duplicate edge");
    }
    service_boundary_[s.v] |= Mask(1) << v.v;
    operator_boundary_[v.v] |= Mask(1) << s.v;
  }
  std::sort(edges_.begin(), edges_.end());
}

const ServiceRecord& RestakingGraph::service(ServiceId s) const {
  if (s.v >= services_.size()) {
    throw LookupError("unknown service id " + std::to_string(s.v));
  }
  return services_[s.v];
}

const OperatorRecord& RestakingGraph::op(OperatorId v) const {
  if (v.v >= operators_.size()) {
    throw LookupError("unknown operator id " + std::to_string(v.v));
  }
  return operators_[v.v];
}

bool RestakingGraph::has_edge(OperatorId v, ServiceId s) const {
  return (service_boundary(s) >> op(v).id.v) & 1;
}

Mask RestakingGraph::service_boundary(ServiceId s) const {
  return service_boundary_[service(s).id.v];
}

Mask RestakingGraph::operator_boundary(OperatorId v) const {
  return operator_boundary_[op(v).id.v];
}

double RestakingGraph::stake_of_mask(Mask operators) const {
  double total = 0.0;
  while (operators != 0) {
    unsigned bit = std::countr_zero(operators);
    if (bit >= operators_.size()) {
      throw LookupError("operator mask references unknown id");
    }
    total += operators_[bit].sigma;
    operators &= operators - 1;
  }
  return total;
}

double RestakingGraph::pi_of_mask(Mask services) const {
  double total = 0.0;
  while (services != 0) {
    unsigned bit = std::countr_zero(services);
    if (bit >= services_.size()) {
      throw LookupError("service mask references unknown id");
    }
    total += services_[bit].pi;
    services &= services - 1;
  }
  return total;
}

Mask RestakingGraph::all_operators_mask() const {
  return operators_.empty()
             ? 0
             : (operators_.size() == 64 ? ~Mask(0)
                                        : (Mask(1) << operators_.size()) - 1);
}

Mask RestakingGraph::all_services_mask() const {
  return services_.empty()
             ? 0
             : (services_.size() == 64 ? ~Mask(0)
                                       : (Mask(1) << services_.size()) - 1);
}

std::vector<OperatorId> neighborhood(const RestakingGraph& g, ServiceId s) {
  return mask_to_operators(g.service_boundary(s));
}

std::vector<ServiceId> neighborhood(const RestakingGraph& g, OperatorId v) {
  return mask_to_services(g.operator_boundary(v));
}

double stake_of(const RestakingGraph& g, const std::vector<OperatorId>& ops) {
  double total = 0.0;
  for (OperatorId v : ops) total += g.sigma(v);
  return total;
}

double overlap(const RestakingGraph& g, ServiceId s, ServiceId t) {
  if (s == t) {
    throw DomainError("overlap requires two distinct services");
  }
  return g.stake_of_mask(g.service_boundary(s) & g.service_boundary(t));
}

OverlapBounds overlap_bounds(const RestakingGraph& g, ServiceId s) {
  if (g.num_services() < 2) {
    throw DomainError("overlap bounds require at least two services");
  }
  g.service(s);
  OverlapBounds out;
  out.theta_min = std::numeric_limits<double>::infinity();
  out.theta_max = -std::numeric_limits<double>::infinity();
  for (std::uint32_t t = 0; t < g.num_services(); ++t) {
    if (t == s.v) continue;
    double theta = overlap(g, s, ServiceId(t));
    out.theta_min = std::min(out.theta_min, theta);
    out.theta_max = std::max(out.theta_max, theta);
  }
  for (std::uint32_t t = 0; t < g.num_services(); ++t) {
    if (t == s.v) continue;
    if (overlap(g, s, ServiceId(t)) == out.theta_max) {
      out.tau_set.push_back(ServiceId(t));
    }
  }
  return out;
}

RemovalResult remove_attack(const RestakingGraph& g,
                            const std::vector<ServiceId>& services,
                            const std::vector<OperatorId>& operators) {
  Mask removed_services = services_to_mask(g, services);
  Mask removed_operators = operators_to_mask(g, operators);

  RemovalResult out;
  out.service_map.assign(g.num_services(), std::nullopt);
  out.operator_map.assign(g.num_operators(), std::nullopt);

  std::vector<ServiceRecord> new_services;
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    if ((removed_services >> s) & 1) continue;
    ServiceId new_id(static_cast<std::uint32_t>(new_services.size()));
    out.service_map[s] = new_id;
    ServiceRecord rec = g.services()[s];
    rec.id = new_id;
    new_services.push_back(rec);
  }
  std::vector<OperatorRecord> new_operators;
  for (std::uint32_t v = 0; v < g.num_operators(); ++v) {
    if ((removed_operators >> v) & 1) continue;
    OperatorId new_id(static_cast<std::uint32_t>(new_operators.size()));
    out.operator_map[v] = new_id;
    OperatorRecord rec = g.operators()[v];
    rec.id = new_id;
    new_operators.push_back(rec);
  }
  std::vector<std::pair<OperatorId, ServiceId>> new_edges;
  for (const auto& [v, s] : g.edges()) {
    if (out.operator_map[v.v] && out.service_map[s.v]) {
      new_edges.emplace_back(*out.operator_map[v.v], *out.service_map[s.v]);
    }
  }
  out.graph = RestakingGraph(std::move(new_services), std::move(new_operators),
                             std::move(new_edges));
  return out;
}

std::vector<OperatorId> mask_to_operators(Mask m) {
  std::vector<OperatorId> out;
  while (m != 0) {
    out.push_back(OperatorId(static_cast<std::uint32_t>(std::countr_zero(m))));
    m &= m - 1;
  }
  return out;
}

std::vector<ServiceId> mask_to_services(Mask m) {
  std::vector<ServiceId> out;
  while (m != 0) {
    out.push_back(ServiceId(static_cast<std::uint32_t>(std::countr_zero(m))));
    m &= m - 1;
  }
  return out;
}

Mask operators_to_mask(const RestakingGraph& g,
                       const std::vector<OperatorId>& ops) {
  Mask m = 0;
  for (OperatorId v : ops) {
    g.op(v);
    if ((m >> v.v) & 1) {
      throw std::invalid_argument("duplicate operator id in set");
    }
    m |= Mask(1) << v.v;
  }
  return m;
}

Mask services_to_mask(const RestakingGraph& g,
                      const std::vector<ServiceId>& svcs) {
  Mask m = 0;
  for (ServiceId s : svcs) {
    g.service(s);
    if ((m >> s.v) & 1) {
      throw std::invalid_argument("duplicate service id in set");
    }
    m |= Mask(1) << s.v;
  }
  return m;
}

}  // namespace restake
