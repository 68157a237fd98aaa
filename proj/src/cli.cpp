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

#include "restake/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "restake/dynamics.hpp"
#include "restake/optimizer.hpp"
#include "restake/scenarios.hpp"
#include "restake/serialize.hpp"

namespace restake {
namespace {

struct GlobalOptions {
  std::string format = "json";  // json | csv
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot write file: " + path);
  }
  out << content;
}

ProfitSpec parse_profit_spec(const std::string& text) {
  if (text == "linear") return ProfitSpec::linear();
  if (text == "maxnorm") return ProfitSpec::maxnorm();
  auto colon = text.find(':');
  if (colon != std::string::npos) {
    std::string kind = text.substr(0, colon);
    double value = std::stod(text.substr(colon + 1));
    if (kind == "pnorm") return ProfitSpec::pnorm(value);
    if (kind == "powerscaled") return ProfitSpec::power_scaled(value);
  }
  throw std::invalid_argument(
      "profit spec must be linear, maxnorm, pnorm:P, or powerscaled:C");
}

struct LoadedInput {
  GraphDocument doc;
  RestakingGraph graph;
  std::string digest;
};

LoadedInput load_input(const std::string& path) {
  std::string text = read_file(path);
  LoadedInput input;
  input.doc = parse_document(text);
  input.graph = graph_from_document(input.doc);
  input.digest = content_digest(text);
  return input;
}

void emit_envelope_start(JsonWriter& w, const std::string& command,
                         const std::string& digest) {
  w.begin_object();
  w.key("schema_version");
  w.value(kSchemaVersion);
  w.key("tool");
  w.begin_object();
  w.key("name");
  w.value(kToolName);
  w.key("version");
  w.value(kToolVersion);
  w.end_object();
  w.key("command");
  w.value(command);
  w.key("input_digest");
  w.value(digest);
}

void emit_id_array(JsonWriter& w, const std::vector<ServiceId>& ids) {
  w.begin_array();
  for (ServiceId s : ids) w.value(s.v);
  w.end_array();
}

void emit_id_array(JsonWriter& w, const std::vector<OperatorId>& ids) {
  w.begin_array();
  for (OperatorId v : ids) w.value(v.v);
  w.end_array();
}

void emit_attack(JsonWriter& w, const RestakingGraph& g,
                 const ProfitSpec& spec, const Attack& attack) {
  w.begin_object();
  w.key("A");
  emit_id_array(w, attack.services);
  w.key("B");
  emit_id_array(w, attack.operators);
  w.key("profit");
  w.value(profit(spec, g, attack.services));
  w.key("stake");
  w.value(stake_of(g, attack.operators));
  w.end_object();
}

std::string join_ids(const std::vector<ServiceId>& ids) {
  std::string out;
  for (ServiceId s : ids) {
    if (!out.empty()) out += ';';
    out += std::to_string(s.v);
  }
  return out;
}

std::string join_ids(const std::vector<OperatorId>& ids) {
  std::string out;
  for (OperatorId v : ids) {
    if (!out.empty()) out += ';';
    out += std::to_string(v.v);
  }
  return out;
}

void print_report(const GlobalOptions& global, std::ostream& out,
                  const std::string& json_report, const std::string& csv) {
  if (global.quiet) return;
  if (global.format == "csv") {
    out << csv;
  } else {
    out << json_report << "\n";
  }
}

const char* verdict_name(RoundVerdict v) {
  switch (v) {
    case RoundVerdict::kSeedLoss:
      return "seed_loss";
    case RoundVerdict::kExecuted:
      return "executed";
    case RoundVerdict::kRepelledProfit:
      return "repelled_profit";
    case RoundVerdict::kRepelledFeasibility:
      return "repelled_feasibility";
  }
  return "?";
}

int cmd_validate(const GlobalOptions& global, const std::string& file,
                 bool fail_on_insecure, double gamma, std::ostream& out) {
  LoadedInput input = load_input(file);
  ProfitSpec spec = profit_from_document(input.doc);
  SecurityReport report = security_report(input.graph, spec, gamma);

  JsonWriter w;
  emit_envelope_start(w, "validate", input.digest);
  w.key("result");
  w.begin_object();
  w.key("valid");
  w.value(true);
  w.key("services");
  w.value(input.graph.num_services());
  w.key("operators");
  w.value(input.graph.num_operators());
  w.key("profit");
  w.value(spec.describe());
  w.key("secure");
  w.value(report.secure);
  w.key("witness");
  if (report.witness) {
    emit_attack(w, input.graph, spec, *report.witness);
  } else {
    w.null_value();
  }
  w.key("gamma_star");
  if (report.gamma_star) {
    w.value(*report.gamma_star);
  } else {
    w.null_value();
  }
  w.key("sufficient_condition_ok");
  w.value(report.sufficient_condition_ok);
  w.end_object();
  w.end_object();

  std::ostringstream csv;
  csv << "secure,witness_a,witness_b\n";
  csv << (report.secure ? "true" : "false") << ','
      << (report.witness ? join_ids(report.witness->services) : "") << ','
      << (report.witness ? join_ids(report.witness->operators) : "") << "\n";
  print_report(global, out, w.str(), csv.str());
  if (fail_on_insecure && !report.secure) return 1;
  return 0;
}

int cmd_attack(const GlobalOptions& global, const std::string& file,
               const std::optional<std::string>& profit_text,
               std::uint32_t max_a, std::uint32_t max_b, std::ostream& out) {
  LoadedInput input = load_input(file);
  ProfitSpec spec = profit_text ? parse_profit_spec(*profit_text)
                                : profit_from_document(input.doc);
  std::vector<Attack> attacks = find_attacks(input.graph, spec, max_a, max_b);

  JsonWriter w;
  emit_envelope_start(w, "attack", input.digest);
  w.key("result");
  w.begin_object();
  w.key("profit");
  w.value(spec.describe());
  w.key("count");
  w.value(static_cast<std::int64_t>(attacks.size()));
  w.key("attacks");
  w.begin_array();
  for (const Attack& a : attacks) emit_attack(w, input.graph, spec, a);
  w.end_array();
  w.end_object();
  w.end_object();

  std::ostringstream csv;
  csv << "index,A,B,profit,stake\n";
  for (std::size_t i = 0; i < attacks.size(); ++i) {
    csv << i << ',' << join_ids(attacks[i].services) << ','
        << join_ids(attacks[i].operators) << ','
        << format_number(profit(spec, input.graph, attacks[i].services)) << ','
        << format_number(stake_of(input.graph, attacks[i].operators)) << "\n";
  }
  print_report(global, out, w.str(), csv.str());
  return 0;
}

int cmd_cascade(const GlobalOptions& global, const std::string& file,
                double psi, const std::optional<std::string>& profit_text,
                std::ostream& out) {
  LoadedInput input = load_input(file);
  ProfitSpec spec = profit_text ? parse_profit_spec(*profit_text)
                                : profit_from_document(input.doc);
  CascadeResult cascade = cascade_coefficient(input.graph, spec, psi);

  JsonWriter w;
  emit_envelope_start(w, "cascade", input.digest);
  w.key("result");
  w.begin_object();
  w.key("psi");
  w.value(cascade.psi);
  w.key("r_psi");
  w.value(cascade.r_psi);
  w.key("best_d");
  emit_id_array(w, cascade.best_d);
  w.key("sequence_length");
  w.value(static_cast<std::int64_t>(cascade.best_sequence.size()));
  w.key("sequence");
  w.begin_array();
  for (const Attack& a : cascade.best_sequence) {
    emit_attack(w, input.graph, spec, a);
  }
  w.end_array();
  w.end_object();
  w.end_object();

  std::ostringstream csv;
  csv << "step,A,B,stake\n";
  for (std::size_t i = 0; i < cascade.best_sequence.size(); ++i) {
    const Attack& a = cascade.best_sequence[i];
    csv << i + 1 << ',' << join_ids(a.services) << ','
        << join_ids(a.operators) << ','
        << format_number(stake_of(input.graph, a.operators)) << "\n";
  }
  print_report(global, out, w.str(), csv.str());
  return 0;
}

int cmd_gamma(const GlobalOptions& global, const std::string& file,
              const std::optional<std::string>& profit_text, double gamma,
              std::ostream& out) {
  LoadedInput input = load_input(file);
  ProfitSpec spec = profit_text ? parse_profit_spec(*profit_text)
                                : profit_from_document(input.doc);
  SecurityReport report = security_report(input.graph, spec, gamma);

  JsonWriter w;
  emit_envelope_start(w, "gamma", input.digest);
  w.key("result");
  w.begin_object();
  w.key("gamma");
  w.value(gamma);
  w.key("secure");
  w.value(report.secure);
  w.key("gamma_star");
  if (report.gamma_star) {
    w.value(*report.gamma_star);
  } else {
    w.null_value();
  }
  w.key("sufficient_condition_ok");
  w.value(report.sufficient_condition_ok);
  w.key("witness");
  if (report.witness) {
    emit_attack(w, input.graph, spec, *report.witness);
  } else {
    w.null_value();
  }
  w.end_object();
  w.end_object();

  std::ostringstream csv;
  csv << "gamma,secure,gamma_star,sufficient_condition_ok\n";
  csv << format_number(gamma) << ',' << (report.secure ? "true" : "false")
      << ',' << (report.gamma_star ? format_number(*report.gamma_star) : "")
      << ',' << (report.sufficient_condition_ok ? "true" : "false") << "\n";
  print_report(global, out, w.str(), csv.str());
  return 0;
}

int cmd_optimize(const GlobalOptions& global, const std::string& file,
                 double p, std::uint32_t horizon, std::ostream& out) {
  LoadedInput input = load_input(file);
  IncentiveSchedule sched = schedule_from_document(input.doc);
  RewardSolution sol =
      compute_optimal_rewards(input.graph, sched, horizon, p);

  JsonWriter w;
  emit_envelope_start(w, "optimize", input.digest);
  w.key("result");
  w.begin_object();
  w.key("p");
  w.value(p);
  w.key("horizon");
  w.value(horizon);
  w.key("already_safe");
  w.value(sol.already_safe);
  w.key("alpha_p");
  w.value(sol.alpha_p);
  w.key("approx_error_e");
  w.value(sol.approx_error_e);
  w.key("rewards");
  w.begin_array();
  for (std::uint32_t s = 0; s < sol.rewards.size(); ++s) {
    w.begin_object();
    w.key("service");
    w.value(s);
    w.key("reward");
    w.value(sol.rewards[s]);
    w.key("pre_inflation");
    w.value(sol.pre_inflation[s]);
    w.key("initial");
    w.value(sol.bisection_traces[s].initial);
    w.key("probes");
    w.value(static_cast<std::int64_t>(sol.bisection_traces[s].probes.size()));
    w.end_object();
  }
  w.end_array();
  w.key("greedy_sequence");
  w.begin_array();
  for (const Attack& a : sol.greedy_sequence) {
    emit_attack(w, input.graph, ProfitSpec::pnorm(p), a);
  }
  w.end_array();
  w.key("integrality_gap_note");
  w.value(sol.integrality_gap_note);
  w.end_object();
  w.end_object();

  std::ostringstream csv;
  csv << "service,reward,pre_inflation\n";
  for (std::uint32_t s = 0; s < sol.rewards.size(); ++s) {
    csv << s << ',' << format_number(sol.rewards[s]) << ','
        << format_number(sol.pre_inflation[s]) << "\n";
  }
  print_report(global, out, w.str(), csv.str());
  return 0;
}

int cmd_simulate(const GlobalOptions& global, const std::string& file,
                 const std::string& script_file,
                 const std::optional<std::string>& controller_band,
                 double controller_p, std::uint64_t seed,
                 const std::optional<std::string>& profit_text,
                 std::ostream& out) {
  LoadedInput input = load_input(file);
  ProfitSpec spec = profit_text ? parse_profit_spec(*profit_text)
                                : profit_from_document(input.doc);
  IncentiveSchedule sched = schedule_from_document(input.doc);

  auto raw_script = parse_script(read_file(script_file));
  AttackSequence script;
  for (const auto& [a, b] : raw_script) {
    Attack attack;
    for (std::uint32_t s : a) attack.services.push_back(ServiceId(s));
    for (std::uint32_t v : b) attack.operators.push_back(OperatorId(v));
    script.push_back(std::move(attack));
  }

  std::optional<ControllerConfig> controller;
  if (controller_band) {
    auto comma = controller_band->find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("--controller expects LO,HI");
    }
    ControllerConfig cfg;
    cfg.band.lo_coeff = std::stod(controller_band->substr(0, comma));
    cfg.band.hi_coeff = std::stod(controller_band->substr(comma + 1));
    cfg.p = controller_p;
    controller = cfg;
  }

  const double initial_stake = input.graph.total_stake();
  GameState state = simulate(input.graph, sched, spec, script, controller);

  double seed_loss = 0.0;
  double attack_loss = 0.0;
  int executed = 0;
  int repelled = 0;
  for (const RoundLog& log : state.trace()) {
    if (log.verdict == RoundVerdict::kSeedLoss) {
      seed_loss += log.slashed_stake;
    } else if (log.verdict == RoundVerdict::kExecuted) {
      attack_loss += log.slashed_stake;
      ++executed;
    } else {
      ++repelled;
    }
  }

  JsonWriter w;
  emit_envelope_start(w, "simulate", input.digest);
  w.key("seed");
  w.value(static_cast<std::int64_t>(seed));
  w.key("result");
  w.begin_object();
  w.key("rounds");
  w.begin_array();
  for (const RoundLog& log : state.trace()) {
    w.begin_object();
    w.key("round");
    w.value(log.round);
    w.key("verdict");
    w.value(verdict_name(log.verdict));
    w.key("A");
    emit_id_array(w, log.attempted.services);
    w.key("B");
    emit_id_array(w, log.attempted.operators);
    if (log.failed_service) {
      w.key("failed_service");
      w.value(log.failed_service->v);
    }
    w.key("slashed_stake");
    w.value(log.slashed_stake);
    w.key("sweeps");
    w.value(log.sweeps);
    w.key("joins");
    w.begin_array();
    for (const auto& [v, s] : log.joins) {
      w.begin_array();
      w.value(v.v);
      w.value(s.v);
      w.end_array();
    }
    w.end_array();
    w.key("leaves");
    w.begin_array();
    for (const auto& [v, s] : log.leaves) {
      w.begin_array();
      w.value(v.v);
      w.value(s.v);
      w.end_array();
    }
    w.end_array();
    w.key("reward_changes");
    w.begin_array();
    for (const RewardChange& rc : log.reward_changes) {
      w.begin_object();
      w.key("service");
      w.value(rc.service.v);
      w.key("reward_before");
      w.value(rc.reward_before);
      w.key("reward_after");
      w.value(rc.reward_after);
      w.key("discount_before");
      w.value(rc.discount_before);
      w.key("discount_after");
      w.value(rc.discount_after);
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.key("executed");
  w.value(executed);
  w.key("repelled");
  w.value(repelled);
  w.key("seed_loss_stake");
  w.value(seed_loss);
  w.key("attack_loss_stake");
  w.value(attack_loss);
  w.key("loss_fraction");
  w.value(initial_stake > 0.0 ? (seed_loss + attack_loss) / initial_stake
                              : 0.0);
  w.key("surviving_stake");
  w.value(state.live_stake());
  w.end_object();
  w.end_object();

  std::ostringstream csv;
  csv << "round,verdict,A,B,slashed,sweeps\n";
  for (const RoundLog& log : state.trace()) {
    csv << log.round << ',' << verdict_name(log.verdict) << ','
        << join_ids(log.attempted.services) << ','
        << join_ids(log.attempted.operators) << ','
        << format_number(log.slashed_stake) << ',' << log.sweeps << "\n";
  }
  print_report(global, out, w.str(), csv.str());
  return 0;
}

int cmd_scenario(const GlobalOptions& global, const std::string& name,
                 const std::string& out_file, double alpha,
                 const AppBParams& appb, const RandomScenarioParams& random,
                 std::ostream& out) {
  GraphDocument doc = generate_scenario(name, alpha, appb, random);
  std::string text = serialize_canonical(doc);
  write_file(out_file, text);

  JsonWriter w;
  emit_envelope_start(w, "scenario", content_digest(text));
  w.key("result");
  w.begin_object();
  w.key("name");
  w.value(name);
  w.key("written");
  w.value(out_file);
  w.end_object();
  w.end_object();
  std::ostringstream csv;
  csv << "name,written\n" << name << ',' << out_file << "\n";
  print_report(global, out, w.str(), csv.str());
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"restaking-network security analyzer"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  if (const char* env_format = std::getenv("RESTAKE_FORMAT")) {
    global.format = env_format;
  }
  app.add_option("--format", global.format, "report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet", global.quiet, "suppress report output");

  std::string file;
  std::string script_file;
  std::string out_file;
  std::string scenario_name;
  std::optional<std::string> profit_text;
  std::optional<std::string> controller_band;
  bool fail_on_insecure = false;
  double gamma = 0.0;
  double psi = 0.0;
  double p = 2.0;
  double controller_p = 2.0;
  std::uint32_t horizon = 2;
  std::uint32_t max_a = kMaxExhaustiveServices;
  std::uint32_t max_b = kMaxExhaustiveOperators;
  std::uint64_t seed = 0;
  double alpha = 1.0 / 3.0;
  AppBParams appb;
  RandomScenarioParams random;

  CLI::App* validate = app.add_subcommand("validate", "check a graph file");
  validate->fallthrough();
  validate->add_option("file", file)->required();
  validate->add_flag("--fail-on-insecure", fail_on_insecure);
  validate->add_option("--gamma", gamma);

  CLI::App* attack = app.add_subcommand("attack", "enumerate valid attacks");
  attack->fallthrough();
  attack->add_option("file", file)->required();
  attack->add_option("--profit", profit_text);
  attack->add_option("--max-a", max_a);
  attack->add_option("--max-b", max_b);

  CLI::App* cascade = app.add_subcommand("cascade", "cascade coefficient");
  cascade->fallthrough();
  cascade->add_option("file", file)->required();
  cascade->add_option("--psi", psi)->required();
  cascade->add_option("--profit", profit_text);

  CLI::App* gamma_cmd = app.add_subcommand("gamma", "gamma-security report");
  gamma_cmd->fallthrough();
  gamma_cmd->add_option("file", file)->required();
  gamma_cmd->add_option("--profit", profit_text);
  gamma_cmd->add_option("--gamma", gamma);

  CLI::App* optimize = app.add_subcommand("optimize", "compute rewards");
  optimize->fallthrough();
  optimize->add_option("file", file)->required();
  optimize->add_option("--p", p)->required();
  optimize->add_option("--t", horizon)->required();

  CLI::App* simulate = app.add_subcommand("simulate", "run an attack script");
  simulate->fallthrough();
  simulate->add_option("file", file)->required();
  simulate->add_option("--script", script_file)->required();
  simulate->add_option("--controller", controller_band);
  simulate->add_option("--controller-p", controller_p);
  simulate->add_option("--seed", seed);
  simulate->add_option("--profit", profit_text);

  CLI::App* scenario = app.add_subcommand("scenario", "emit a named scenario");
  scenario->fallthrough();
  scenario->add_option("name", scenario_name)->required();
  scenario->add_option("--out", out_file)->required();
  scenario->add_option("--alpha", alpha);
  scenario->add_option("--sigma", appb.sigma);
  scenario->add_option("--k", appb.k);
  scenario->add_option("--pi1", appb.pi1);
  scenario->add_option("--pi2", appb.pi2);
  scenario->add_option("--appb-alpha", appb.alpha);
  scenario->add_option("--seed", random.seed);
  scenario->add_option("--services", random.services);
  scenario->add_option("--operators", random.operators);
  scenario->add_option("--edge-prob", random.edge_prob);
  scenario->add_option("--stake-dist", random.stake_dist);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*validate) {
      return cmd_validate(global, file, fail_on_insecure, gamma, out);
    }
    if (*attack) {
      return cmd_attack(global, file, profit_text, max_a, max_b, out);
    }
    if (*cascade) {
      return cmd_cascade(global, file, psi, profit_text, out);
    }
    if (*gamma_cmd) {
      return cmd_gamma(global, file, profit_text, gamma, out);
    }
    if (*optimize) {
      return cmd_optimize(global, file, p, horizon, out);
    }
    if (*simulate) {
      return cmd_simulate(global, file, script_file, controller_band,
                          controller_p, seed, profit_text, out);
    }
    if (*scenario) {
      return cmd_scenario(global, scenario_name, out_file, alpha, appb, random,
                          out);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << " (line " << e.line() << ", column "
        << e.column() << ")\n";
    return 2;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace restake
