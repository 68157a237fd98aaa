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

#ifndef RESTAKE_SERIALIZE_HPP_
#define RESTAKE_SERIALIZE_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "restake/graph.hpp"
#include "restake/incentives.hpp"
#include "restake/profit.hpp"

namespace restake {

inline constexpr int kSchemaVersion = 1;

struct ServiceDoc {
  std::uint32_t id = 0;
  double pi = 0.0;
  double alpha = 0.0;
  std::optional<double> reward;
  std::optional<double> cost;
  std::optional<double> discount;
};

struct OperatorDoc {
  std::uint32_t id = 0;
  double sigma = 0.0;
};

struct ProfitDoc {
  std::string kind = "linear";  // linear | pnorm | maxnorm | powerscaled
  std::optional<double> p;
  std::optional<double> c;
};

// On-disk graph description. Canonical serialization is deterministic:
// fixed key order, entries sorted by id, numbers with 17 significant digits.
struct GraphDocument {
  int schema_version = kSchemaVersion;
  std::vector<ServiceDoc> services;
  std::vector<OperatorDoc> operators;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // [op, svc]
  ProfitDoc profit;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

GraphDocument parse_document(const std::string& text);
std::string serialize_canonical(const GraphDocument& doc);

GraphDocument document_from_graph(const RestakingGraph& g,
                                  const ProfitSpec& spec,
                                  const IncentiveSchedule* sched = nullptr);
RestakingGraph graph_from_document(const GraphDocument& doc);
IncentiveSchedule schedule_from_document(const GraphDocument& doc);
ProfitSpec profit_from_document(const GraphDocument& doc);

// FNV-1a 64-bit content digest, hex encoded.
std::string content_digest(const std::string& bytes);

// Number formatting shared by all emitters: %.17g.
std::string format_number(double value);

// Small streaming JSON writer with deterministic formatting.
class JsonWriter {
 public:
  void begin_object();
  void end_object();
  void begin_array();
  void end_array();
  void key(const std::string& name);
  void value(const std::string& text);
  void value(const char* text);
  void value(double number);
  void value(int number);
  void value(std::int64_t number);
  void value(std::uint32_t number);
  void value(bool flag);
  void null_value();

  const std::string& str() const { return out_; }

 private:
  void separator();
  void raw(const std::string& text);
  std::string out_;
  std::vector<bool> needs_comma_;
  bool pending_key_ = false;
};

// Attack scripts: ordered JSON list of {"A": [...], "B": [...]}. An entry
// with empty A is an exogenous seed loss.
std::string serialize_script(const std::vector<std::pair<
                                 std::vector<std::uint32_t>,
                                 std::vector<std::uint32_t>>>& steps);
std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>>
parse_script(const std::string& text);

}  // namespace restake

#endif  // RESTAKE_SERIALIZE_HPP_
