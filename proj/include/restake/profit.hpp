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

#ifndef RESTAKE_PROFIT_HPP_
#define RESTAKE_PROFIT_HPP_

#include <string>
#include <vector>

#include "restake/graph.hpp"

namespace restake {

// Adversary profit function over attacked service sets.
//
// Linear sums the profits; PNorm takes the p-norm of the profit vector
// (strictly submodular for p > 1); MaxNorm is the p -> infinity limit, kept
// as its own variant so no finite exponent has to stand in for it;
// PowerScaled applies the multiplicative cost |A|^(-c).
class ProfitSpec {
 public:
  enum class Kind { kLinear, kPNorm, kMaxNorm, kPowerScaled };

  static ProfitSpec linear() { return ProfitSpec(Kind::kLinear, 0.0); }
  static ProfitSpec pnorm(double p);         // requires p > 1, finite
  static ProfitSpec maxnorm() { return ProfitSpec(Kind::kMaxNorm, 0.0); }
  static ProfitSpec power_scaled(double c);  // requires c in (0, 1)

  Kind kind() const { return kind_; }
  double p() const { return param_; }  // exponent for PNorm
  double c() const { return param_; }  // cost exponent for PowerScaled

  std::string describe() const;

 private:
  ProfitSpec(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

// f(pi, A) for the service set given as a bitmask; f(pi, {}) = 0.
double profit(const ProfitSpec& spec, const RestakingGraph& g, Mask services);

double profit(const ProfitSpec& spec, const RestakingGraph& g,
              const std::vector<ServiceId>& services);

// Exhaustive strict-submodularity check over all incomparable pairs A, A'
// (neither containing the other). True iff
//   f(A u A') + f(A n A') < f(A) + f(A')
// for every such pair, with absolute slack 1e-12. Refuses |S| > 12.
bool check_strict_submodularity(const ProfitSpec& spec,
                                const RestakingGraph& g);

// The two profit/stake ratios used by the bounds. The paper overloads the
// symbol K for both; they are kept apart here.
struct StakeProfitRatio {
  double k_stake = 0.0;   // max_s pi_s / min_v sigma_v
  double kappa_pi = 0.0;  // min_s pi_s / max_s pi_s

  // Requires a nonempty graph with every pi > 0.
  static StakeProfitRatio from(const RestakingGraph& g);
};

}  // namespace restake

#endif  // RESTAKE_PROFIT_HPP_
