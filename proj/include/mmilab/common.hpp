// include/mmilab/common.hpp
//
// Copyright 2026 mmi-lab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MMILAB_COMMON_HPP
#define MMILAB_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmilab {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Violated precondition or invariant of an operation.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// A decode graph admits no complete path for the given frame count.
// Distinct from numeric failure so callers can treat "this transcription
// cannot align" as zero probability where that is meaningful.
class EmptyCompositionError : public std::runtime_error {
 public:
  explicit EmptyCompositionError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// The reference transcription scored -inf; training cannot proceed.
class ReferenceStarvedError : public std::runtime_error {
 public:
  explicit ReferenceStarvedError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Bad or inconsistent configuration (also used for enumeration cap overruns).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractError(msg);
}

// log(exp(a) + exp(b)) without leaving the log domain.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  double d = b - a;
  if (d < -45.0) return a;  // below double epsilon of the result
  return a + std::log1p(std::exp(d));
}

// log sum exp over a non-empty list, max-shifted. Exact for one element.
inline double log_sum_exp(std::span<const double> values) {
  require(!values.empty(), "log_sum_exp: empty list");
  double m = kLogZero;
  for (double v : values) m = std::max(m, v);
  if (m == kLogZero) return kLogZero;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& values) {
  return log_sum_exp(std::span<const double>(values));
}

// FNV-1a, used for output manifests and counter-based per-utterance seeding.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return fnv1a64(&value, sizeof(value), seed ^ 0xcbf29ce484222325ull);
}

}  // namespace mmilab

#endif  // MMILAB_COMMON_HPP
