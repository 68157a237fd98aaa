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

#include "restake/serialize.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

namespace restake {
namespace {

using nlohmann::json;

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_json_or_throw(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(e.what(), line, column);
  }
}

double require_number(const json& j, const char* what) {
  if (!j.is_number()) {
    throw ParseError(std::string(what) + " must be a number", 0, 0);
  }
  return j.get<double>();
}

std::uint32_t require_id(const json& j, const char* what) {
  if (!j.is_number_unsigned()) {
    throw ParseError(std::string(what) + " must be a nonnegative integer", 0,
                     0);
  }
  return j.get<std::uint32_t>();
}

std::string escape_string(const std::string& text) {
  std::string out;
  out.reserve(text.size() + 2);
  for (char c : text) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string content_digest(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

void JsonWriter::separator() {
  if (!needs_comma_.empty() && needs_comma_.back() && !pending_key_) {
    out_ += ',';
  }
  if (!needs_comma_.empty() && !pending_key_) needs_comma_.back() = true;
  pending_key_ = false;
}

void JsonWriter::raw(const std::string& text) { out_ += text; }

void JsonWriter::begin_object() {
  separator();
  raw("{");
  needs_comma_.push_back(false);
}

void JsonWriter::end_object() {
  needs_comma_.pop_back();
  raw("}");
}

void JsonWriter::begin_array() {
  separator();
  raw("[");
  needs_comma_.push_back(false);
}

void JsonWriter::end_array() {
  needs_comma_.pop_back();
  raw("]");
}

void JsonWriter::key(const std::string& name) {
  separator();
  raw("\"" + escape_string(name) + "\":");
  pending_key_ = true;
}

void JsonWriter::value(const std::string& text) {
  separator();
  raw("\"" + escape_string(text) + "\"");
}

void JsonWriter::value(const char* text) { value(std::string(text)); }

void JsonWriter::value(double number) {
  separator();
  raw(format_number(number));
}

void JsonWriter::value(int number) {
  separator();
  raw(std::to_string(number));
}

void JsonWriter::value(std::int64_t number) {
  separator();
  raw(std::to_string(number));
}

void JsonWriter::value(std::uint32_t number) {
  separator();
  raw(std::to_string(number));
}

void JsonWriter::value(bool flag) {
  separator();
  raw(flag ? "true" : "false");
}

void JsonWriter::null_value() {
  separator();
  raw("null");
}

GraphDocument parse_document(const std::string& text) {
  json j = parse_json_or_throw(text);
  if (!j.is_object()) throw ParseError("document must be an object", 1, 1);
  GraphDocument doc;
  if (!j.contains("schema_version") ||
      !j["schema_version"].is_number_integer()) {
    throw ParseError("missing schema_version", 1, 1);
  }
  doc.schema_version = j["schema_version"].get<int>();
  if (doc.schema_version != kSchemaVersion) {
    throw ParseError("unsupported schema_version", 1, 1);
  }
  if (j.contains("profit")) {
    const json& p = j["profit"];
    doc.profit.kind = p.value("kind", "linear");
    if (p.contains("p")) doc.profit.p = require_number(p["p"], "profit.p");
    if (p.contains("c")) doc.profit.c = require_number(p["c"], "profit.c");
  }
  for (const json& s : j.value("services", json::array())) {
    ServiceDoc sd;
    sd.id = require_id(s.at("id"), "service id");
    sd.pi = require_number(s.at("pi"), "service pi");
    sd.alpha = require_number(s.at("alpha"), "service alpha");
    if (s.contains("reward")) {
      sd.reward = require_number(s["reward"], "service reward");
    }
    if (s.contains("cost")) sd.cost = require_number(s["cost"], "service cost");
    if (s.contains("discount")) {
      sd.discount = require_number(s["discount"], "service discount");
    }
    doc.services.push_back(sd);
  }
  for (const json& v : j.value("operators", json::array())) {
    OperatorDoc od;
    od.id = require_id(v.at("id"), "operator id");
    od.sigma = require_number(v.at("sigma"), "operator sigma");
    doc.operators.push_back(od);
  }
  for (const json& e : j.value("edges", json::array())) {
    if (!e.is_array() || e.size() != 2) {
      throw ParseError("edges must be [operator_id, service_id] pairs", 1, 1);
    }
    doc.edges.emplace_back(require_id(e[0], "edge operator id"),
                           require_id(e[1], "edge service id"));
  }
  std::sort(doc.services.begin(), doc.services.end(),
            [](const ServiceDoc& a, const ServiceDoc& b) { return a.id < b.id; });
  std::sort(doc.operators.begin(), doc.operators.end(),
            [](const OperatorDoc& a, const OperatorDoc& b) {
              return a.id < b.id;
            });
  std::sort(doc.edges.begin(), doc.edges.end());
  return doc;
}

std::string serialize_canonical(const GraphDocument& doc) {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version");
  w.value(doc.schema_version);
  w.key("profit");
  w.begin_object();
  w.key("kind");
  w.value(doc.profit.kind);
  if (doc.profit.p) {
    w.key("p");
    w.value(*doc.profit.p);
  }
  if (doc.profit.c) {
    w.key("c");
    w.value(*doc.profit.c);
  }
  w.end_object();
  w.key("services");
  w.begin_array();
  for (const ServiceDoc& s : doc.services) {
    w.begin_object();
    w.key("id");
    w.value(s.id);
    w.key("pi");
    w.value(s.pi);
    w.key("alpha");
    w.value(s.alpha);
    if (s.reward) {
      w.key("reward");
      w.value(*s.reward);
    }
    if (s.cost) {
      w.key("cost");
      w.value(*s.cost);
    }
    if (s.discount) {
      w.key("discount");
      w.value(*s.discount);
    }
    w.end_object();
  }
  w.end_array();
  w.key("operators");
  w.begin_array();
  for (const OperatorDoc& v : doc.operators) {
    w.begin_object();
    w.key("id");
    w.value(v.id);
    w.key("sigma");
    w.value(v.sigma);
    w.end_object();
  }
  w.end_array();
  w.key("edges");
  w.begin_array();
  for (const auto& [op, svc] : doc.edges) {
    w.begin_array();
    w.value(op);
    w.value(svc);
    w.end_array();
  }
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

GraphDocument document_from_graph(const RestakingGraph& g,
                                  const ProfitSpec& spec,
                                  const IncentiveSchedule* sched) {
  GraphDocument doc;
  for (const ServiceRecord& s : g.services()) {
    ServiceDoc sd;
    sd.id = s.id.v;
    sd.pi = s.pi;
    sd.alpha = s.alpha;
    if (sched != nullptr) {
      sd.reward = sched->rewards[s.id.v];
      sd.cost = sched->costs[s.id.v];
      sd.discount = sched->discounts[s.id.v];
    }
    doc.services.push_back(sd);
  }
  for (const OperatorRecord& v : g.operators()) {
    doc.operators.push_back(OperatorDoc{v.id.v, v.sigma});
  }
  for (const auto& [v, s] : g.edges()) {
    doc.edges.emplace_back(v.v, s.v);
  }
  switch (spec.kind()) {
    case ProfitSpec::Kind::kLinear:
      doc.profit.kind = "linear";
      break;
    case ProfitSpec::Kind::kPNorm:
      doc.profit.kind = "pnorm";
      doc.profit.p = spec.p();
      break;
    case ProfitSpec::Kind::kMaxNorm:
      doc.profit.kind = "maxnorm";
      break;
    case ProfitSpec::Kind::kPowerScaled:
      doc.profit.kind = "powerscaled";
      doc.profit.c = spec.c();
      break;
  }
  return doc;
}

RestakingGraph graph_from_document(const GraphDocument& doc) {
  std::vector<ServiceRecord> services;
  for (const ServiceDoc& s : doc.services) {
    services.push_back(ServiceRecord{ServiceId(s.id), s.pi, s.alpha});
  }
  std::vector<OperatorRecord> operators;
  for (const OperatorDoc& v : doc.operators) {
    operators.push_back(OperatorRecord{OperatorId(v.id), v.sigma});
  }
  std::vector<std::pair<OperatorId, ServiceId>> edges;
  for (const auto& [op, svc] : doc.edges) {
    edges.emplace_back(OperatorId(op), ServiceId(svc));
  }
  return RestakingGraph(std::move(services), std::move(operators),
                        std::move(edges));
}

IncentiveSchedule schedule_from_document(const GraphDocument& doc) {
  IncentiveSchedule sched;
  for (const ServiceDoc& s : doc.services) {
    sched.rewards.push_back(s.reward.value_or(0.0));
    sched.costs.push_back(s.cost.value_or(0.0));
    sched.discounts.push_back(s.discount.value_or(0.0));
  }
  return sched;
}

ProfitSpec profit_from_document(const GraphDocument& doc) {
  const std::string& kind = doc.profit.kind;
  if (kind == "linear") return ProfitSpec::linear();
  if (kind == "maxnorm") return ProfitSpec::maxnorm();
  if (kind == "pnorm") {
    if (!doc.profit.p) {
      throw ParseError("pnorm profit requires field p", 1, 1);
    }
    return ProfitSpec::pnorm(*doc.profit.p);
  }
  if (kind == "powerscaled") {
    if (!doc.profit.c) {
      throw ParseError("powerscaled profit requires field c", 1, 1);
    }
    return ProfitSpec::power_scaled(*doc.profit.c);
  }
  throw ParseError("unknown profit kind: " + kind, 1, 1);
}

std::string serialize_script(
    const std::vector<std::pair<std::vector<std::uint32_t>,
                                std::vector<std::uint32_t>>>& steps) {
  JsonWriter w;
  w.begin_array();
  for (const auto& [a, b] : steps) {
    w.begin_object();
    w.key("A");
    w.begin_array();
    for (std::uint32_t s : a) w.value(s);
    w.end_array();
    w.key("B");
    w.begin_array();
    for (std::uint32_t v : b) w.value(v);
    w.end_array();
    w.end_object();
  }
  w.end_array();
  return w.str() + "\n";
}

std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>>
parse_script(const std::string& text) {
  json j = parse_json_or_throw(text);
  if (!j.is_array()) throw ParseError("script must be a JSON list", 1, 1);
  std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>>
      out;
  for (const json& step : j) {
    std::vector<std::uint32_t> a;
    std::vector<std::uint32_t> b;
    for (const json& s : step.at("A")) a.push_back(require_id(s, "script A"));
    for (const json& v : step.at("B")) b.push_back(require_id(v, "script B"));
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

}  // namespace restake
