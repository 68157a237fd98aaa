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

#ifndef RESTAKE_CORE_HPP_
#define RESTAKE_CORE_HPP_

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace restake {

inline constexpr const char* kToolName = "restake";
inline constexpr const char* kToolVersion = "0.1.0";

// Strongly typed vertex ids. Ids are dense 0..n-1 within each side of the
// bipartite graph.
struct ServiceId {
  std::uint32_t v = 0;
  constexpr ServiceId() = default;
  constexpr explicit ServiceId(std::uint32_t value) : v(value) {}
  friend constexpr auto operator<=>(ServiceId, ServiceId) = default;
};

struct OperatorId {
  std::uint32_t v = 0;
  constexpr OperatorId() = default;
  constexpr explicit OperatorId(std::uint32_t value) : v(value) {}
  friend constexpr auto operator<=>(OperatorId, OperatorId) = default;
};

// All threshold comparisons in the library go through these helpers:
// relative tolerance 1e-9, absolute 1e-12 near zero.
inline constexpr double kRelTol = 1e-9;
inline constexpr double kAbsTol = 1e-12;

inline double comparison_slack(double a, double b) {
  double scale = std::abs(a) > std::abs(b) ? std::abs(a) : std::abs(b);
  double rel = kRelTol * scale;
  return rel > kAbsTol ? rel : kAbsTol;
}

// a >= b up to tolerance.
inline bool geq(double a, double b) { return a >= b - comparison_slack(a, b); }
// a <= b up to tolerance.
inline bool leq(double a, double b) { return a <= b + comparison_slack(a, b); }
// a < b with the same slack (complement of geq).
inline bool lt(double a, double b) { return !geq(a, b); }

class LookupError : public std::out_of_range {
 public:
  explicit LookupError(const std::string& what) : std::out_of_range(what) {}
};

class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& what)
      : std::runtime_error(what) {}
};

// Deterministic cross-platform PRNG (splitmix64). std:: distributions are
// implementation-defined, so all randomized generators draw through this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace restake

#endif  // RESTAKE_CORE_HPP_
