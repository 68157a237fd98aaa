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

#include "restake/profit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace restake {

ProfitSpec ProfitSpec::pnorm(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument(
        "pnorm requires finite p > 1 (p = 1 is linear, p = inf is maxnorm)");
  }
  return ProfitSpec(Kind::kPNorm, p);
}

ProfitSpec ProfitSpec::power_scaled(double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw std::invalid_argument("power_scaled requires c in (0, 1)");
  }
  return ProfitSpec(Kind::kPowerScaled, c);
}

std::string ProfitSpec::describe() const {
  switch (kind_) {
    case Kind::kLinear:
      return "linear";
    case Kind::kPNorm:
      return "pnorm(" + std::to_string(param_) + ")";
    case Kind::kMaxNorm:
      return "maxnorm";
    case Kind::kPowerScaled:
      return "powerscaled(" + std::to_string(param_) + ")";
  }
  return "?";
}

double profit(const ProfitSpec& spec, const RestakingGraph& g, Mask services) {
  if (services == 0) return 0.0;
  switch (spec.kind()) {
    case ProfitSpec::Kind::kLinear:
      return g.pi_of_mask(services);
    case ProfitSpec::Kind::kPNorm: {
      double sum = 0.0;
      Mask m = services;
      while (m != 0) {
        unsigned bit = std::countr_zero(m);
        sum += std::pow(g.pi(ServiceId(bit)), spec.p());
        m &= m - 1;
      }
      return std::pow(sum, 1.0 / spec.p());
    }
    case ProfitSpec::Kind::kMaxNorm: {
      double best = 0.0;
      Mask m = services;
      while (m != 0) {
        unsigned bit = std::countr_zero(m);
        best = std::max(best, g.pi(ServiceId(bit)));
        m &= m - 1;
      }
      return best;
    }
    case ProfitSpec::Kind::kPowerScaled: {
      double count = static_cast<double>(std::popcount(services));
      return std::pow(count, -spec.c()) * g.pi_of_mask(services);
    }
  }
  return 0.0;
}

double profit(const ProfitSpec& spec, const RestakingGraph& g,
              const std::vector<ServiceId>& services) {
  return profit(spec, g, services_to_mask(g, services));
}

bool check_strict_submodularity(const ProfitSpec& spec,
                                const RestakingGraph& g) {
  const std::uint32_t n = g.num_services();
  if (n > 12) {
    throw ResourceError("strict submodularity check limited to |S| <= 12");
  }
  const Mask all = g.all_services_mask();
  std::vector<double> f(std::size_t(1) << n);
  for (Mask a = 0; a <= all && all != 0; ++a) {
    f[a] = profit(spec, g, a);
    if (a == all) break;
  }
  for (Mask a = 1; a <= all && all != 0; ++a) {
    for (Mask b = a + 1; b <= all; ++b) {
      Mask meet = a & b;
      if (meet == a || meet == b) {
        if (b == all) break;
        continue;  // comparable pair
      }
      if (!(f[a | b] + f[meet] < f[a] + f[b] - kAbsTol)) {
        return false;
      }
      if (b == all) break;
    }
    if (a == all) break;
  }
  return true;
}

StakeProfitRatio StakeProfitRatio::from(const RestakingGraph& g) {
  if (g.num_services() == 0 || g.num_operators() == 0) {
    throw DomainError("stake/profit ratios need a nonempty graph");
  }
  double max_pi = 0.0;
  double min_pi = std::numeric_limits<double>::infinity();
  for (const ServiceRecord& s : g.services()) {
    max_pi = std::max(max_pi, s.pi);
    min_pi = std::min(min_pi, s.pi);
  }
  if (!(min_pi > 0.0)) {
    throw DomainError("profit ratio undefined when some pi_s = 0");
  }
  double min_sigma = std::numeric_limits<double>::infinity();
  for (const OperatorRecord& v : g.operators()) {
    min_sigma = std::min(min_sigma, v.sigma);
  }
  StakeProfitRatio out;
  out.k_stake = max_pi / min_sigma;
  out.kappa_pi = min_pi / max_pi;
  return out;
}

}  // namespace restake
