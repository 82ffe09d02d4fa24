// Copyright 2026 The recbench Authors. All Rights Reserved.
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
// =============================================================================

#ifndef RECBENCH_SEARCHSPACE_HPP
#define RECBENCH_SEARCHSPACE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "recbench/random.hpp"

namespace recbench {

using Json = nlohmann::ordered_json;

enum class Scale { kLinear, kLog };

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

struct FloatRange {
  double lo = 0.0;
  double hi = 0.0;
  Scale scale = Scale::kLinear;
};

struct Categorical {
  std::vector<std::string> choices;
};

using ParamKind = std::variant<IntRange, FloatRange, Categorical>;

// One hyperparameter dimension. Construction validates the range so a
// ParamSpec that exists is always usable.
class ParamSpec {
 public:
  ParamSpec(std::string name, ParamKind kind);

  static ParamSpec integer(std::string name, std::int64_t lo, std::int64_t hi);
  static ParamSpec real(std::string name, double lo, double hi, Scale scale = Scale::kLinear);
  static ParamSpec categorical(std::string name, std::vector<std::string> choices);

  const std::string& name() const { return name_; }
  const ParamKind& kind() const { return kind_; }

  bool is_int() const { return std::holds_alternative<IntRange>(kind_); }
  bool is_float() const { return std::holds_alternative<FloatRange>(kind_); }
  bool is_categorical() const { return std::holds_alternative<Categorical>(kind_); }

 private:
  std::string name_;
  ParamKind kind_;
};

using ParamValue = std::variant<std::int64_t, double, std::string>;

std::string format_value(const ParamValue& v);

// One assignment of values, ordered like the owning space.
class Config {
 public:
  struct Entry {
    std::string name;
    ParamValue value;
  };

  Config() = default;
  explicit Config(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  bool contains(std::string_view name) const;
  const ParamValue& at(std::string_view name) const;
  void set(std::string_view name, ParamValue value);

  std::int64_t as_int(std::string_view name) const;
  double as_double(std::string_view name) const;  // ints widen to double
  const std::string& as_label(std::string_view name) const;

  // Integers and labels compare exactly; reals compare to 1e-12 relative so
  // that a decode/encode round trip through log10 counts as identity.
  bool operator==(const Config& other) const;
  bool bitwise_equal(const Config& other) const;

  // Canonical one-line rendering used in hashing and logs.
  std::string canonical() const;

 private:
  std::vector<Entry> entries_;
};

class SearchSpace {
 public:
  SearchSpace() = default;
  explicit SearchSpace(std::vector<ParamSpec> params);

  const std::vector<ParamSpec>& params() const { return params_; }
  std::size_t dim() const { return params_.size(); }
  bool contains(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

 private:
  std::vector<ParamSpec> params_;
};

SearchSpace default_space(std::string_view model_name);

// Throws InvalidConfig unless keys match the space exactly and every value is
// in range.
void validate(const SearchSpace& space, const Config& config);
bool is_valid(const SearchSpace& space, const Config& config);

Config sample_uniform(const SearchSpace& space, Rng& rng);

std::vector<double> encode_unit(const SearchSpace& space, const Config& config);
Config decode_unit(const SearchSpace& space, std::span<const double> u);

// Round half up, used wherever a unit coordinate is quantized.
inline double round_half_up(double x) { return std::floor(x + 0.5); }

Json param_to_json(const ParamSpec& p);
ParamSpec param_from_json(const Json& j);
Json space_to_json(const SearchSpace& space);
SearchSpace space_from_json(const Json& j);
Json config_to_json(const Config& c);
Config config_from_json(const SearchSpace& space, const Json& j);

}  // namespace recbench

#endif  // RECBENCH_SEARCHSPACE_HPP
