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

#include "recbench/searchspace.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "recbench/error.hpp"

namespace recbench {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool reals_match(double a, double b) {
  if (a == b) return true;
  return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

ParamSpec::ParamSpec(std::string name, ParamKind kind) : name_(std::move(name)), kind_(std::move(kind)) {
  if (name_.empty()) throw Error(ErrorCode::kInvalidSpace, "parameter name must be non-empty");
  std::visit(Overloaded{
                 [&](const IntRange& r) {
                   if (!(r.lo < r.hi))
                     throw Error(ErrorCode::kInvalidSpace, name_ + ": integer range needs lo < hi");
                 },
                 [&](const FloatRange& r) {
                   if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi))
                     throw Error(ErrorCode::kInvalidSpace, name_ + ": float range needs finite lo < hi");
                   if (r.scale == Scale::kLog && r.lo <= 0.0)
                     throw Error(ErrorCode::kInvalidSpace, name_ + ": log scale needs lo > 0");
                 },
                 [&](const Categorical& c) {
                   if (c.choices.empty())
                     throw Error(ErrorCode::kInvalidSpace, name_ + ": categorical needs at least one choice");
                   std::set<std::string> seen(c.choices.begin(), c.choices.end());
                   if (seen.size() != c.choices.size())
                     throw Error(ErrorCode::kInvalidSpace, name_ + ": duplicate categorical choice");
                 },
             },
             kind_);
}

ParamSpec ParamSpec::integer(std::string name, std::int64_t lo, std::int64_t hi) {
  return ParamSpec(std::move(name), IntRange{lo, hi});
}

ParamSpec ParamSpec::real(std::string name, double lo, double hi, Scale scale) {
  return ParamSpec(std::move(name), FloatRange{lo, hi, scale});
}

ParamSpec ParamSpec::categorical(std::string name, std::vector<std::string> choices) {
  return ParamSpec(std::move(name), Categorical{std::move(choices)});
}

std::string format_value(const ParamValue& v) {
  return std::visit(Overloaded{
                        [](std::int64_t x) { return std::to_string(x); },
                        [](double x) { return format_double(x); },
                        [](const std::string& s) { return s; },
                    },
                    v);
}

bool Config::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

const ParamValue& Config::at(std::string_view name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e.value;
  throw Error(ErrorCode::kInvalidConfig, "config has no parameter '" + std::string(name) + "'");
}

void Config::set(std::string_view name, ParamValue value) {
  for (auto& e : entries_) {
    if (e.name == name) {
      e.value = std::move(value);
      return;
    }
  }
  entries_.push_back({std::string(name), std::move(value)});
}

std::int64_t Config::as_int(std::string_view name) const {
  const auto& v = at(name);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* s = std::get_if<std::string>(&v)) {
    try {
      std::size_t pos = 0;
      const long long x = std::stoll(*s, &pos);
      if (pos == s->size()) return x;
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "parameter '" + std::string(name) + "' is not an integer");
}

double Config::as_double(std::string_view name) const {
  const auto& v = at(name);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw Error(ErrorCode::kInvalidConfig, "parameter '" + std::string(name) + "' is not numeric");
}

const std::string& Config::as_label(std::string_view name) const {
  const auto& v = at(name);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw Error(ErrorCode::kInvalidConfig, "parameter '" + std::string(name) + "' is not a label");
}

bool Config::operator==(const Config& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& a = entries_[k];
    const auto& b = other.entries_[k];
    if (a.name != b.name || a.value.index() != b.value.index()) return false;
    if (const auto* x = std::get_if<double>(&a.value)) {
      if (!reals_match(*x, std::get<double>(b.value))) return false;
    } else if (a.value != b.value) {
      return false;
    }
  }
  return true;
}

bool Config::bitwise_equal(const Config& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (entries_[k].name != other.entries_[k].name || entries_[k].value != other.entries_[k].value) return false;
  }
  return true;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& e : entries_) {
    if (!out.empty()) out += ';';
    out += e.name;
    out += '=';
    out += format_value(e.value);
  }
  return out;
}

SearchSpace::SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
  std::set<std::string> seen;
  for (const auto& p : params_) {
    if (!seen.insert(p.name()).second)
      throw Error(ErrorCode::kInvalidSpace, "duplicate parameter name '" + p.name() + "'");
  }
}

bool SearchSpace::contains(std::string_view name) const {
  return std::any_of(params_.begin(), params_.end(), [&](const ParamSpec& p) { return p.name() == name; });
}

std::size_t SearchSpace::index_of(std::string_view name) const {
  for (std::size_t k = 0; k < params_.size(); ++k)
    if (params_[k].name() == name) return k;
  throw Error(ErrorCode::kUnknownParam, "no parameter named '" + std::string(name) + "'");
}

SearchSpace default_space(std::string_view model_name) {
  const auto num_ng = ParamSpec::integer("num_ng", 1, 10);
  const auto factors = ParamSpec::integer("factors", 1, 100);
  const auto lr = ParamSpec::real("lr", 1e-4, 1e-2, Scale::kLog);
  const auto reg = ParamSpec::real("reg_2", 1e-4, 1e-2, Scale::kLog);
  if (model_name == "itemknn") return SearchSpace({ParamSpec::integer("maxk", 1, 100)});
  if (model_name == "puresvd") return SearchSpace({factors});
  if (model_name == "bprmf" || model_name == "fm") return SearchSpace({num_ng, factors, lr, reg});
  if (model_name == "neumf") {
    return SearchSpace({num_ng, factors, ParamSpec::integer("num_layers", 1, 3), ParamSpec::real("dropout", 0.0, 1.0),
                        lr, reg, ParamSpec::categorical("batch_size", {"64", "128", "256", "512"})});
  }
  throw Error(ErrorCode::kUnknownModel, "unknown model '" + std::string(model_name) + "'");
}

void validate(const SearchSpace& space, const Config& config) {
  const auto& params = space.params();
  const auto& entries = config.entries();
  if (params.size() != entries.size())
    throw Error(ErrorCode::kInvalidConfig, "config has " + std::to_string(entries.size()) + " values, space has " +
                                               std::to_string(params.size()));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = params[k];
    const auto& e = entries[k];
    if (p.name() != e.name)
      throw Error(ErrorCode::kInvalidConfig, "expected parameter '" + p.name() + "', found '" + e.name + "'");
    const bool ok = std::visit(
        Overloaded{
            [&](const IntRange& r) {
              const auto* v = std::get_if<std::int64_t>(&e.value);
              return v && *v >= r.lo && *v <= r.hi;
            },
            [&](const FloatRange& r) {
              const auto* v = std::get_if<double>(&e.value);
              return v && std::isfinite(*v) && *v >= r.lo && *v <= r.hi;
            },
            [&](const Categorical& c) {
              const auto* v = std::get_if<std::string>(&e.value);
              return v && std::find(c.choices.begin(), c.choices.end(), *v) != c.choices.end();
            },
        },
        p.kind());
    if (!ok) throw Error(ErrorCode::kInvalidConfig, p.name() + " = " + format_value(e.value) + " is out of range");
  }
}

bool is_valid(const SearchSpace& space, const Config& config) {
  try {
    validate(space, config);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Config sample_uniform(const SearchSpace& space, Rng& rng) {
  std::vector<Config::Entry> entries;
  entries.reserve(space.dim());
  for (const auto& p : space.params()) {
    ParamValue v = std::visit(Overloaded{
                                  [&](const IntRange& r) -> ParamValue { return rng.uniform_int(r.lo, r.hi); },
                                  [&](const FloatRange& r) -> ParamValue {
                                    if (r.scale == Scale::kLinear) return rng.uniform(r.lo, r.hi);
                                    const double e = rng.uniform(std::log10(r.lo), std::log10(r.hi));
                                    return std::clamp(std::pow(10.0, e), r.lo, r.hi);
                                  },
                                  [&](const Categorical& c) -> ParamValue { return c.choices[rng.index(c.choices.size())]; },
                              },
                              p.kind());
    entries.push_back({p.name(), std::move(v)});
  }
  return Config(std::move(entries));
}

std::vector<double> encode_unit(const SearchSpace& space, const Config& config) {
  validate(space, config);
  std::vector<double> u;
  u.reserve(space.dim());
  const auto& entries = config.entries();
  for (std::size_t k = 0; k < space.dim(); ++k) {
    const auto& v = entries[k].value;
    u.push_back(std::visit(Overloaded{
                               [&](const IntRange& r) {
                                 return static_cast<double>(std::get<std::int64_t>(v) - r.lo) /
                                        static_cast<double>(r.hi - r.lo);
                               },
                               [&](const FloatRange& r) {
                                 const double x = std::get<double>(v);
                                 if (r.scale == Scale::kLinear) return (x - r.lo) / (r.hi - r.lo);
                                 const double a = std::log10(r.lo);
                                 const double b = std::log10(r.hi);
                                 return std::clamp((std::log10(x) - a) / (b - a), 0.0, 1.0);
                               },
                               [&](const Categorical& c) {
                                 if (c.choices.size() == 1) return 0.0;
                                 const auto it = std::find(c.choices.begin(), c.choices.end(), std::get<std::string>(v));
                                 return static_cast<double>(it - c.choices.begin()) /
                                        static_cast<double>(c.choices.size() - 1);
                               },
                           },
                           space.params()[k].kind()));
  }
  return u;
}

Config decode_unit(const SearchSpace& space, std::span<const double> u) {
  if (u.size() != space.dim())
    throw Error(ErrorCode::kInvalidVector,
                "vector has " + std::to_string(u.size()) + " components, space has " + std::to_string(space.dim()));
  std::vector<Config::Entry> entries;
  entries.reserve(space.dim());
  for (std::size_t k = 0; k < space.dim(); ++k) {
    if (std::isnan(u[k])) throw Error(ErrorCode::kInvalidVector, "NaN component");
    const double x = std::clamp(u[k], 0.0, 1.0);
    const auto& p = space.params()[k];
    ParamValue v = std::visit(
        Overloaded{
            [&](const IntRange& r) -> ParamValue {
              const auto span = static_cast<double>(r.hi - r.lo);
              return std::clamp(r.lo + static_cast<std::int64_t>(round_half_up(x * span)), r.lo, r.hi);
            },
            [&](const FloatRange& r) -> ParamValue {
              if (r.scale == Scale::kLinear) return std::clamp(r.lo + x * (r.hi - r.lo), r.lo, r.hi);
              const double a = std::log10(r.lo);
              const double b = std::log10(r.hi);
              return std::clamp(std::pow(10.0, a + x * (b - a)), r.lo, r.hi);
            },
            [&](const Categorical& c) -> ParamValue {
              const auto idx = static_cast<std::size_t>(round_half_up(x * static_cast<double>(c.choices.size() - 1)));
              return c.choices[std::min(idx, c.choices.size() - 1)];
            },
        },
        p.kind());
    entries.push_back({p.name(), std::move(v)});
  }
  return Config(std::move(entries));
}

Json param_to_json(const ParamSpec& p) {
  Json j;
  j["name"] = p.name();
  std::visit(Overloaded{
                 [&](const IntRange& r) {
                   j["kind"] = "int";
                   j["lo"] = r.lo;
                   j["hi"] = r.hi;
                 },
                 [&](const FloatRange& r) {
                   j["kind"] = "float";
                   j["lo"] = r.lo;
                   j["hi"] = r.hi;
                   j["scale"] = r.scale == Scale::kLog ? "log" : "linear";
                 },
                 [&](const Categorical& c) {
                   j["kind"] = "categorical";
                   j["choices"] = c.choices;
                 },
             },
             p.kind());
  return j;
}

ParamSpec param_from_json(const Json& j) {
  try {
    const std::string name = j.at("name").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "int") return ParamSpec::integer(name, j.at("lo").get<std::int64_t>(), j.at("hi").get<std::int64_t>());
    if (kind == "float") {
      const std::string scale = j.value("scale", std::string("linear"));
      if (scale != "linear" && scale != "log")
        throw Error(ErrorCode::kInvalidSpace, name + ": scale must be 'linear' or 'log'");
      return ParamSpec::real(name, j.at("lo").get<double>(), j.at("hi").get<double>(),
                             scale == "log" ? Scale::kLog : Scale::kLinear);
    }
    if (kind == "categorical") {
      std::vector<std::string> choices;
      for (const auto& c : j.at("choices")) choices.push_back(c.is_string() ? c.get<std::string>() : c.dump());
      return ParamSpec::categorical(name, std::move(choices));
    }
    throw Error(ErrorCode::kInvalidSpace, name + ": unknown kind '" + kind + "'");
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidSpace, std::string("malformed parameter spec: ") + e.what());
  }
}

Json space_to_json(const SearchSpace& space) {
  Json arr = Json::array();
  for (const auto& p : space.params()) arr.push_back(param_to_json(p));
  return arr;
}

SearchSpace space_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kInvalidSpace, "search space must be a JSON array");
  std::vector<ParamSpec> params;
  for (const auto& p : j) params.push_back(param_from_json(p));
  return SearchSpace(std::move(params));
}

Json config_to_json(const Config& c) {
  Json j = Json::object();
  for (const auto& e : c.entries()) {
    std::visit(Overloaded{
                   [&](std::int64_t x) { j[e.name] = x; },
                   [&](double x) { j[e.name] = x; },
                   [&](const std::string& s) { j[e.name] = s; },
               },
               e.value);
  }
  return j;
}

Config config_from_json(const SearchSpace& space, const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be a JSON object");
  std::vector<Config::Entry> entries;
  for (const auto& p : space.params()) {
    if (!j.contains(p.name())) throw Error(ErrorCode::kInvalidConfig, "missing parameter '" + p.name() + "'");
    const auto& v = j.at(p.name());
    ParamValue value;
    if (p.is_int() && v.is_number_integer()) {
      value = v.get<std::int64_t>();
    } else if (p.is_float() && v.is_number()) {
      value = v.get<double>();
    } else if (p.is_categorical()) {
      value = v.is_string() ? v.get<std::string>() : v.dump();
    } else {
      throw Error(ErrorCode::kInvalidConfig, "parameter '" + p.name() + "' has the wrong type");
    }
    entries.push_back({p.name(), std::move(value)});
  }
  if (j.size() != entries.size()) throw Error(ErrorCode::kInvalidConfig, "config has parameters outside the space");
  Config c(std::move(entries));
  validate(space, c);
  return c;
}

}  // namespace recbench
