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

#include "restake/optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "restake/subsets.hpp"

namespace restake {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxPgaIterations = 10000;
constexpr double kPgaResidualTol = 1e-8;
constexpr double kDoublingCap = 1152921504606846976.0;  // 2^60

double max_sigma(const RestakingGraph& g) {
  double best = 0.0;
  for (const OperatorRecord& v : g.operators()) best = std::max(best, v.sigma);
  return best;
}

double min_live_sigma_mask(const RestakingGraph& g, Mask ops) {
  double best = std::numeric_limits<double>::infinity();
  while (ops != 0) {
    unsigned v = std::countr_zero(ops);
    ops &= ops - 1;
    best = std::min(best, g.sigma(OperatorId(v)));
  }
  return best;
}

// arg_a(D) = base_a + w_a . D for each service a of A2; D lives on the
// non-B1 operators listed in vars.
struct RelaxedProblem {
  Eigen::MatrixXd w;
  Eigen::VectorXd base;
  double radius = 0.0;
  std::vector<std::uint32_t> vars;
};

RelaxedProblem build_problem(const RestakingGraph& g,
                             const IncentiveSchedule& sched, ServiceId s,
                             Mask b1, Mask b2, Mask a2, double r_s, double k) {
  if (!(r_s > sched.costs[s.v])) {
    throw DomainError("relaxed objective requires r_s > c_s");
  }
  if (!(k > 0.0)) {
    throw DomainError("relaxed objective requires k > 0");
  }
  RelaxedProblem problem;
  double pool_s = g.stake_of_mask(g.service_boundary(s) & ~b1);
  problem.radius = (r_s - sched.costs[s.v]) * k - pool_s;

  for (std::uint32_t v = 0; v < g.num_operators(); ++v) {
    if ((b1 >> v) & 1) continue;
    problem.vars.push_back(v);
  }
  const int n = static_cast<int>(problem.vars.size());
  const int rows = std::popcount(a2);
  problem.w = Eigen::MatrixXd::Zero(rows, n);
  problem.base = Eigen::VectorXd::Zero(rows);
  int row = 0;
  Mask am = a2;
  while (am != 0) {
    unsigned a = std::countr_zero(am);
    am &= am - 1;
    ServiceId aid(a);
    Mask pool_mask = g.service_boundary(aid) & ~b1;
    double alpha = g.alpha(aid);
    problem.base(row) =
        alpha * g.stake_of_mask(pool_mask) - g.stake_of_mask(pool_mask & b2);
    for (int j = 0; j < n; ++j) {
      std::uint32_t v = problem.vars[static_cast<std::size_t>(j)];
      if ((pool_mask >> v) & 1) continue;  // already in the pool
      double weight = alpha - (((b2 >> v) & 1) ? 1.0 : 0.0);
      problem.w(row, j) = weight;
    }
    ++row;
  }
  return problem;
}

// Euclidean projection onto {x >= 0, sum x <= radius}.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& y,
                                       double radius) {
  Eigen::VectorXd x = y.cwiseMax(0.0);
  if (x.sum() <= radius) return x;
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) {
      tau = candidate;
    } else {
      break;
    }
  }
  return (y.array() - tau).cwiseMax(0.0);
}

double objective_value(const RelaxedProblem& p, const Eigen::VectorXd& d) {
  if (p.base.size() == 0) return 0.0;
  Eigen::VectorXd args = p.base + p.w * d;
  double value = 0.0;
  for (Eigen::Index i = 0; i < args.size(); ++i) {
    if (!(args(i) > 0.0)) return kNegInf;
    value += std::log(args(i));
  }
  return value;
}

// Phase 1: find mass with every argument positive by maximizing the minimum
// argument (projected subgradient with vertex warm starts).
bool find_interior_point(const RelaxedProblem& p, Eigen::VectorXd* out) {
  const int n = static_cast<int>(p.vars.size());
  auto min_arg = [&](const Eigen::VectorXd& d) {
    if (p.base.size() == 0) return std::numeric_limits<double>::infinity();
    return (p.base + p.w * d).minCoeff();
  };
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_value = min_arg(best);
  if (n > 0 && p.radius > 0.0) {
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd vertex = Eigen::VectorXd::Zero(n);
      vertex(j) = p.radius;
      double value = min_arg(vertex);
      if (value > best_value) {
        best_value = value;
        best = vertex;
      }
    }
    Eigen::VectorXd d = best;
    for (int iter = 1; iter <= 2000 && best_value <= kAbsTol; ++iter) {
      Eigen::VectorXd args = p.base + p.w * d;
      Eigen::Index worst = 0;
      args.minCoeff(&worst);
      Eigen::VectorXd grad = p.w.row(worst).transpose();
      double norm = grad.norm();
      if (norm <= 0.0) break;
      double step = p.radius / (norm * std::sqrt(static_cast<double>(iter)));
      d = project_capped_simplex(d + step * grad, p.radius);
      double value = min_arg(d);
      if (value > best_value) {
        best_value = value;
        best = d;
      }
    }
  }
  if (best_value <= kAbsTol) return false;
  *out = best;
  return true;
}

// Phase 2: projected gradient ascent with backtracking from an interior
// point. `stop_when_positive` turns the solver into a sign probe.
double maximize(const RelaxedProblem& p, const Eigen::VectorXd& start,
                bool stop_when_positive) {
  if (p.base.size() == 0) return 0.0;
  if (p.vars.empty() || p.radius <= 0.0) return objective_value(p, start);
  Eigen::VectorXd d = start;
  double value = objective_value(p, d);
  double step_seed = 1.0;
  for (int iter = 0; iter < kMaxPgaIterations; ++iter) {
    if (stop_when_positive && value > kAbsTol) return value;
    Eigen::VectorXd args = p.base + p.w * d;
    Eigen::VectorXd grad =
        p.w.transpose() * args.cwiseInverse();
    Eigen::VectorXd mapped = project_capped_simplex(d + grad, p.radius);
    double residual = (mapped - d).norm();
    if (residual <= kPgaResidualTol * std::max(1.0, d.norm())) {
      return value;
    }
    double step = step_seed;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::VectorXd y = project_capped_simplex(d + step * grad, p.radius);
      double candidate = objective_value(p, y);
      double expected = grad.dot(y - d);
      if (candidate > kNegInf && candidate >= value + 1e-4 * expected) {
        if (candidate <= value && expected <= kAbsTol) break;  // stalled
        d = y;
        value = candidate;
        step_seed = std::min(step * 2.0, 1e6);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return value;  // line search exhausted at the optimum
  }
  throw ConvergenceError("projected gradient ascent hit the iteration cap");
}

double solve_relaxed(const RelaxedProblem& p, bool stop_when_positive) {
  if (p.base.size() == 0) return 0.0;
  // A negative radius leaves no admissible mass at all; radius zero leaves
  // exactly the origin, matching the empty discrete rebalance.
  if (p.radius < 0.0) return kNegInf;
  if (p.vars.empty() || p.radius == 0.0) {
    return objective_value(p, Eigen::VectorXd::Zero(
                                  static_cast<Eigen::Index>(p.vars.size())));
  }
  Eigen::VectorXd start;
  if (!find_interior_point(p, &start)) return kNegInf;
  return maximize(p, start, stop_when_positive);
}

bool reward_feasible(const RestakingGraph& g, const IncentiveSchedule& sched,
                     ServiceId s, Mask b1, Mask b2, Mask a2, double r_s) {
  if (!(r_s > sched.costs[s.v])) return false;
  // The objective is monotone in k (the radius grows with it), so the
  // maximum over k in {sigma_v} is attained at the largest stake.
  RelaxedProblem p =
      build_problem(g, sched, s, b1, b2, a2, r_s, max_sigma(g));
  return solve_relaxed(p, /*stop_when_positive=*/true) > kAbsTol;
}

}  // namespace

double sequential_profit(const SequentialProfitQuery& query,
                         const AttackSequence& sequence) {
  if (query.horizon < 1) {
    throw DomainError("horizon must be at least 1");
  }
  if (sequence.size() > query.horizon) {
    throw DomainError("sequence exceeds the query horizon");
  }
  const RestakingGraph& g = query.graph;
  std::vector<Mask> boundaries(g.num_services());
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    boundaries[s] = g.service_boundary(ServiceId(s));
  }
  Mask live_ops = g.all_operators_mask();
  Mask live_svcs = g.all_services_mask();
  double total = 0.0;
  for (const Attack& step : sequence) {
    Mask a = services_to_mask(g, step.services);
    Mask b = operators_to_mask(g, step.operators);
    std::vector<Mask> live_boundaries(g.num_services(), 0);
    Mask sm = live_svcs;
    while (sm != 0) {
      unsigned s = std::countr_zero(sm);
      sm &= sm - 1;
      live_boundaries[s] = boundaries[s] & live_ops;
    }
    if ((a & ~live_svcs) != 0 || (b & ~live_ops) != 0 ||
        !is_valid_attack_masks(g, query.spec, a, b, live_boundaries)) {
      throw DomainError("sequence step is not a valid attack on the running graph");
    }
    total += profit(query.spec, g, a) - g.stake_of_mask(b);
    live_ops &= ~b;
    live_svcs &= ~a;
  }
  return total;
}

AttackSequence greedy_sequence(const SequentialProfitQuery& query) {
  const RestakingGraph& g = query.graph;
  if (g.num_services() > kMaxExhaustiveServices ||
      g.num_operators() > kMaxExhaustiveOperators) {
    throw ResourceError("greedy search refuses |S| > 16 or |V| > 20");
  }
  if (query.horizon > 6) {
    throw ResourceError("greedy search limited to horizon <= 6");
  }
  std::vector<Mask> boundaries(g.num_services());
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    boundaries[s] = g.service_boundary(ServiceId(s));
  }
  Mask live_ops = g.all_operators_mask();
  Mask live_svcs = g.all_services_mask();
  AttackSequence out;
  for (std::uint32_t t = 0; t < query.horizon; ++t) {
    std::vector<Mask> live_boundaries(g.num_services(), 0);
    Mask sm = live_svcs;
    while (sm != 0) {
      unsigned s = std::countr_zero(sm);
      sm &= sm - 1;
      live_boundaries[s] = boundaries[s] & live_ops;
    }
    double min_sigma = min_live_sigma_mask(g, live_ops);
    double best_net = kAbsTol;  // marginal profit must be strictly positive
    Mask best_a = 0;
    Mask best_b = 0;
    for_each_subset(live_svcs, g.num_services(), [&](Mask a) {
      double f = profit(query.spec, g, a);
      if (!(f > min_sigma)) return false;  // no strictly profitable B
      std::uint32_t max_b = static_cast<std::uint32_t>(std::min(
          std::floor(f / min_sigma + 1e-6),
          static_cast<double>(std::popcount(live_ops))));
      for_each_subset(live_ops, max_b, [&](Mask b) {
        double net = f - g.stake_of_mask(b);
        if (net > best_net &&
            is_valid_attack_masks(g, query.spec, a, b, live_boundaries)) {
          best_net = net;
          best_a = a;
          best_b = b;
        }
        return false;
      });
      return false;
    });
    if (best_a == 0) break;
    out.push_back(Attack{mask_to_services(best_a), mask_to_operators(best_b)});
    live_ops &= ~best_b;
    live_svcs &= ~best_a;
  }
  return out;
}

std::pair<double, double> alpha_and_error(const RestakingGraph& g, double p) {
  StakeProfitRatio ratio = StakeProfitRatio::from(g);  // needs every pi > 0
  double alpha = ratio.kappa_pi *
                 std::pow(static_cast<double>(g.num_services()), -1.0 / p);
  return {alpha, 1.0 - std::exp(-alpha)};
}

double relaxed_objective(const RestakingGraph& g,
                         const IncentiveSchedule& sched, ServiceId s,
                         const std::vector<OperatorId>& b1,
                         const std::vector<OperatorId>& b2,
                         const std::vector<ServiceId>& a2, double r_s,
                         double k) {
  sched.validate(g);
  RelaxedProblem p =
      build_problem(g, sched, s, operators_to_mask(g, b1),
                    operators_to_mask(g, b2), services_to_mask(g, a2), r_s, k);
  return solve_relaxed(p, /*stop_when_positive=*/false);
}

MinimalReward minimal_reward(const RestakingGraph& g,
                             const IncentiveSchedule& sched, ServiceId s,
                             const std::vector<OperatorId>& b1,
                             const std::vector<OperatorId>& b2,
                             const std::vector<ServiceId>& a2) {
  sched.validate(g);
  Mask b1m = operators_to_mask(g, b1);
  Mask b2m = operators_to_mask(g, b2);
  Mask a2m = services_to_mask(g, a2);
  double sigma_max = max_sigma(g);
  if (!(sigma_max > 0.0)) {
    throw DomainError("minimal reward needs at least one operator");
  }

  MinimalReward out;
  double pool1 = g.stake_of_mask(g.service_boundary(s) & ~b1m);
  out.initial = std::max(pool1 / sigma_max + sched.costs[s.v], 1e-9);

  auto probe = [&](double r) {
    bool ok = reward_feasible(g, sched, s, b1m, b2m, a2m, r);
    out.probes.push_back(BisectionProbe{r, ok});
    return ok;
  };

  double r = out.initial;
  if (probe(r)) {
    out.value = r;
    return out;
  }
  double lo = r;
  while (true) {
    r *= 2.0;
    if (r > kDoublingCap) {
      throw InfeasibleError(
          "no reward up to 2^60 makes the relaxed objective positive");
    }
    if (probe(r)) break;
    lo = r;
  }
  double hi = r;
  while (hi - lo > 1e-6 * hi) {
    double mid = 0.5 * (lo + hi);
    if (probe(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.value = hi;
  return out;
}

RewardSolution compute_optimal_rewards(const RestakingGraph& g,
                                       const IncentiveSchedule& sched,
                                       std::uint32_t horizon, double p) {
  sched.validate(g);
  if (!(p > 1.0)) {
    throw DomainError("reward optimization requires p > 1");
  }
  if (horizon < 2) {
    throw DomainError("reward optimization requires horizon >= 2");
  }
  RewardSolution sol;
  auto [alpha, err] = alpha_and_error(g, p);
  sol.alpha_p = alpha;
  sol.approx_error_e = err;

  SequentialProfitQuery query{ProfitSpec::pnorm(p), horizon, g};
  sol.greedy_sequence = greedy_sequence(query);

  const double sigma_max = max_sigma(g);
  sol.rewards.resize(g.num_services());
  sol.pre_inflation.resize(g.num_services());

  if (sol.greedy_sequence.size() < 2) {
    sol.already_safe = true;
    std::vector<OperatorId> b1 = sol.greedy_sequence.empty()
                                     ? std::vector<OperatorId>{}
                                     : sol.greedy_sequence[0].operators;
    Mask b1m = operators_to_mask(g, b1);
    for (std::uint32_t s = 0; s < g.num_services(); ++s) {
      double pool = g.stake_of_mask(g.service_boundary(ServiceId(s)) & ~b1m);
      double r = sigma_max > 0.0 ? pool / sigma_max + sched.costs[s] : sched.costs[s];
      sol.pre_inflation[s] = r;
      sol.rewards[s] = r;
      sol.bisection_traces.push_back(
          ServiceRewardTrace{ServiceId(s), r, r, {}});
    }
    sol.integrality_gap_note = "not sampled: graph already safe";
    return sol;
  }

  const std::vector<OperatorId>& b1 = sol.greedy_sequence[0].operators;
  const std::vector<OperatorId>& b2 = sol.greedy_sequence[1].operators;
  const std::vector<ServiceId>& a2 = sol.greedy_sequence[1].services;
  for (std::uint32_t s = 0; s < g.num_services(); ++s) {
    MinimalReward mr = minimal_reward(g, sched, ServiceId(s), b1, b2, a2);
    sol.pre_inflation[s] = mr.value;
    sol.rewards[s] = mr.value / err;
    sol.bisection_traces.push_back(
        ServiceRewardTrace{ServiceId(s), mr.initial, mr.value,
                           std::move(mr.probes)});
  }

  // Diagnostic only: sampled excess of the relaxation over the discrete
  // objective at the chosen rewards, for the first repelled service.
  if (g.num_operators() <= 14 && !a2.empty()) {
    ServiceId s0 = a2.front();
    double r_star = sol.pre_inflation[s0.v];
    double relaxed = relaxed_objective(g, sched, s0, b1, b2, a2, r_star,
                                       sigma_max);
    Mask b1m = operators_to_mask(g, b1);
    Mask b2m = operators_to_mask(g, b2);
    Mask a2m = services_to_mask(g, a2);
    double c = sched.costs[s0.v];
    double discrete = kNegInf;
    if (r_star > c) {
      Mask boundary = g.service_boundary(s0);
      double pool_before = g.stake_of_mask(boundary);
      double scale = c / (r_star - c);
      Mask candidates = 0;
      for (std::uint32_t v = 0; v < g.num_operators(); ++v) {
        Mask bit = Mask(1) << v;
        if ((b1m & bit) || (boundary & bit)) continue;
        if (!leq(g.sigma(OperatorId(v)), scale * pool_before)) continue;
        candidates |= bit;
      }
      double pool_after = g.stake_of_mask(boundary & ~b1m);
      auto eval = [&](Mask d) {
        double sum = 0.0;
        Mask am = a2m;
        while (am != 0) {
          unsigned a = std::countr_zero(am);
          am &= am - 1;
          ServiceId aid(a);
          Mask pm = g.service_boundary(aid) & ~b1m;
          double pool = g.stake_of_mask(pm) + g.stake_of_mask(d & ~pm);
          double covered = g.stake_of_mask(pm & b2m) +
                           g.stake_of_mask(d & ~pm & b2m);
          double arg = g.alpha(aid) * pool - covered;
          if (!(arg > 0.0)) return kNegInf;
          sum += std::log(arg);
        }
        return sum;
      };
      if (eval(0) > discrete) discrete = eval(0);
      for_each_subset(candidates, g.num_operators(), [&](Mask d) {
        double sigma_d = g.stake_of_mask(d);
        bool member_ok = true;
        Mask dm = d;
        while (dm != 0) {
          unsigned v = std::countr_zero(dm);
          dm &= dm - 1;
          if (!geq(g.sigma(OperatorId(v)),
                   scale * (pool_after + sigma_d))) {
            member_ok = false;
            break;
          }
        }
        if (member_ok) discrete = std::max(discrete, eval(d));
        return false;
      });
    }
    std::ostringstream note;
    if (discrete == kNegInf) {
      note << "sampled gap at r=" << r_star
           << ": discrete objective infeasible, relaxed=" << relaxed;
    } else {
      note << "sampled gap at r=" << r_star << ": " << (relaxed - discrete);
    }
    sol.integrality_gap_note = note.str();
  } else {
    sol.integrality_gap_note = "not sampled: instance too large";
  }
  return sol;
}

}  // namespace restake
