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

#include "recbench/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "recbench/error.hpp"
#include "recbench/hash.hpp"

namespace recbench {

namespace {

std::vector<std::string_view> split_on(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + sep.size();
  }
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ')) s.remove_suffix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line_no, const std::string& why) {
  throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) + ": " + why);
}

}  // namespace

InputFormat parse_input_format(std::string_view s) {
  if (s == "generic-tsv" || s == "tsv") return InputFormat::kGenericTsv;
  if (s == "ml1m") return InputFormat::kMl1m;
  if (s == "lastfm") return InputFormat::kLastfm;
  throw Error(ErrorCode::kInvalidSpec, "unknown input format '" + std::string(s) + "'");
}

FeedbackMode parse_feedback_mode(std::string_view s) {
  if (s == "explicit") return FeedbackMode::kExplicit;
  if (s == "implicit") return FeedbackMode::kImplicit;
  throw Error(ErrorCode::kInvalidSpec, "unknown feedback mode '" + std::string(s) + "'");
}

std::vector<Interaction> load_interactions(const std::filesystem::path& path, InputFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<Interaction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (format == InputFormat::kLastfm && line_no == 1 && line.rfind("userID", 0) == 0) continue;

    const auto fields = split_on(line, format == InputFormat::kMl1m ? "::" : "\t");
    Interaction rec;
    switch (format) {
      case InputFormat::kGenericTsv:
        if (fields.size() < 2 || fields.size() > 4) parse_fail(path, line_no, "expected 2 to 4 tab-separated fields");
        break;
      case InputFormat::kMl1m:
        if (fields.size() != 4) parse_fail(path, line_no, "expected user::item::rating::timestamp");
        break;
      case InputFormat::kLastfm:
        if (fields.size() != 3) parse_fail(path, line_no, "expected user<TAB>artist<TAB>weight");
        break;
    }
    if (fields[0].empty() || fields[1].empty()) parse_fail(path, line_no, "empty user or item id");
    rec.user = std::string(fields[0]);
    rec.item = std::string(fields[1]);
    if (fields.size() >= 3 && !fields[2].empty()) {
      double r = 0.0;
      if (!parse_number(fields[2], r)) parse_fail(path, line_no, "rating is not a number");
      rec.rating = r;
    }
    if (fields.size() == 4 && !fields[3].empty()) {
      std::int64_t t = 0;
      if (!parse_number(fields[3], t)) parse_fail(path, line_no, "timestamp is not an integer");
      rec.timestamp = t;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<Interaction> binarize(const std::vector<Interaction>& interactions, double threshold, FeedbackMode mode) {
  if (mode == FeedbackMode::kImplicit) return interactions;
  std::vector<Interaction> out;
  for (std::size_t k = 0; k < interactions.size(); ++k) {
    const auto& r = interactions[k];
    if (!r.rating) throw Error(ErrorCode::kMissingRating, "row " + std::to_string(k + 1) + " has no rating");
    if (*r.rating > threshold) out.push_back(r);
  }
  return out;
}

UserItems::UserItems(Index n_users, std::vector<std::pair<Index, Index>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  offsets_.assign(static_cast<std::size_t>(n_users) + 1, 0);
  items_.reserve(pairs.size());
  for (const auto& [u, i] : pairs) {
    ++offsets_[static_cast<std::size_t>(u) + 1];
    items_.push_back(i);
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

bool UserItems::contains(Index user, Index item) const {
  const auto items = of(user);
  return std::binary_search(items.begin(), items.end(), item);
}

UserItems UserItems::merge(const UserItems& a, const UserItems& b) {
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(a.nnz() + b.nnz());
  for (Index u = 0; u < a.n_users(); ++u)
    for (Index i : a.of(u)) pairs.emplace_back(u, i);
  for (Index u = 0; u < b.n_users(); ++u)
    for (Index i : b.of(u)) pairs.emplace_back(u, i);
  return UserItems(std::max(a.n_users(), b.n_users()), std::move(pairs));
}

Dataset::Dataset(std::vector<std::string> user_ids, std::vector<std::string> item_ids, std::vector<Record> records)
    : user_ids_(std::move(user_ids)), item_ids_(std::move(item_ids)), records_(std::move(records)) {
  for (Index k = 0; k < n_users(); ++k) user_lookup_.emplace(user_ids_[k], k);
  for (Index k = 0; k < n_items(); ++k) item_lookup_.emplace(item_ids_[k], k);
  if (user_lookup_.size() != user_ids_.size() || item_lookup_.size() != item_ids_.size())
    throw Error(ErrorCode::kInvalidSpec, "index maps are not bijective");
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(records_.size());
  for (const auto& r : records_) {
    if (r.user < 0 || r.user >= n_users() || r.item < 0 || r.item >= n_items())
      throw Error(ErrorCode::kInvalidSpec, "record index out of range");
    pairs.emplace_back(r.user, r.item);
  }
  positives_ = UserItems(n_users(), std::move(pairs));
  if (positives_.nnz() != records_.size()) throw Error(ErrorCode::kInvalidSpec, "duplicate (user, item) record");
}

double Dataset::sparsity() const {
  if (n_users() == 0 || n_items() == 0) return 0.0;
  return static_cast<double>(records_.size()) / (static_cast<double>(n_users()) * static_cast<double>(n_items()));
}

std::optional<Index> Dataset::user_index(const std::string& raw) const {
  const auto it = user_lookup_.find(raw);
  if (it == user_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<Index> Dataset::item_index(const std::string& raw) const {
  const auto it = item_lookup_.find(raw);
  if (it == item_lookup_.end()) return std::nullopt;
  return it->second;
}

std::string Dataset::id() const {
  Fnv1a h;
  for (const auto& u : user_ids_) {
    h.update(u);
    h.update("\n");
  }
  h.update("|");
  for (const auto& i : item_ids_) {
    h.update(i);
    h.update("\n");
  }
  for (const auto& r : records_) h.update(&r, sizeof(r));
  return h.hex();
}

Dataset build_dataset(const std::vector<Interaction>& interactions) {
  if (interactions.empty()) throw Error(ErrorCode::kInvalidSpec, "no interactions to build a dataset from");
  std::vector<std::string> users, items;
  std::unordered_map<std::string, Index> user_map, item_map;
  std::unordered_set<std::uint64_t> seen;
  std::vector<Record> records;
  records.reserve(interactions.size());
  for (const auto& x : interactions) {
    auto [uit, unew] = user_map.try_emplace(x.user, static_cast<Index>(users.size()));
    if (unew) users.push_back(x.user);
    auto [iit, inew] = item_map.try_emplace(x.item, static_cast<Index>(items.size()));
    if (inew) items.push_back(x.item);
    const auto key = (static_cast<std::uint64_t>(uit->second) << 32) | static_cast<std::uint32_t>(iit->second);
    if (!seen.insert(key).second) continue;
    records.push_back({uit->second, iit->second, x.timestamp});
  }
  return Dataset(std::move(users), std::move(items), std::move(records));
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("users.tsv");
    for (Index k = 0; k < dataset.n_users(); ++k) out << k << '\t' << dataset.user_ids()[k] << '\n';
  }
  {
    auto out = open("items.tsv");
    for (Index k = 0; k < dataset.n_items(); ++k) out << k << '\t' << dataset.item_ids()[k] << '\n';
  }
  {
    auto out = open("interactions.tsv");
    for (const auto& r : dataset.records()) out << r.user << '\t' << r.item << '\t' << r.timestamp << '\n';
  }
  Json stats;
  stats["users"] = dataset.n_users();
  stats["items"] = dataset.n_items();
  stats["interactions"] = dataset.n_interactions();
  stats["sparsity"] = dataset.sparsity();
  stats["id"] = dataset.id();
  open("stats.json") << stats.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& dir) {
  auto read_ids = [&](const char* name) {
    std::ifstream in(dir / name);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open " + (dir / name).string());
    std::vector<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = split_on(line, "\t");
      Index k = 0;
      if (fields.size() != 2 || !parse_number(fields[0], k) || k != static_cast<Index>(ids.size()))
        parse_fail(dir / name, line_no, "expected contiguous index<TAB>raw id");
      ids.emplace_back(fields[1]);
    }
    return ids;
  };
  auto users = read_ids("users.tsv");
  auto items = read_ids("items.tsv");
  std::ifstream in(dir / "interactions.tsv");
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + (dir / "interactions.tsv").string());
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_on(line, "\t");
    Record r;
    if (fields.size() != 3 || !parse_number(fields[0], r.user) || !parse_number(fields[1], r.item) ||
        !parse_number(fields[2], r.timestamp))
      parse_fail(dir / "interactions.tsv", line_no, "expected user<TAB>item<TAB>timestamp indices");
    records.push_back(r);
  }
  return Dataset(std::move(users), std::move(items), std::move(records));
}

SplitMethod parse_split_method(std::string_view s) {
  if (s == "random") return SplitMethod::kRandom;
  if (s == "temporal") return SplitMethod::kTemporal;
  throw Error(ErrorCode::kInvalidSpec, "unknown split method '" + std::string(s) + "'");
}

std::string_view split_method_name(SplitMethod m) { return m == SplitMethod::kRandom ? "random" : "temporal"; }

SplitDataset split_global(const Dataset& dataset, const SplitSpec& spec) {
  const bool ratios_ok = spec.test_ratio > 0.0 && spec.test_ratio < 1.0 && spec.valid_ratio > 0.0 &&
                         spec.valid_ratio < 1.0 && spec.test_ratio + spec.valid_ratio < 1.0;
  if (!ratios_ok) throw Error(ErrorCode::kInvalidSpec, "split ratios must lie in (0,1) and sum below 1");
  const std::size_t n = dataset.n_interactions();
  if (n == 0) throw Error(ErrorCode::kInvalidSpec, "cannot split an empty dataset");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (spec.method == SplitMethod::kRandom) {
    Rng rng(spec.seed);
    rng.shuffle(order);
  } else {
    const auto& recs = dataset.records();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return recs[a].timestamp < recs[b].timestamp; });
  }

  const auto n_test = static_cast<std::size_t>(std::ceil(spec.test_ratio * static_cast<double>(n)));
  const std::size_t remaining = n - std::min(n_test, n);
  const auto n_valid = std::min(remaining, static_cast<std::size_t>(std::ceil(spec.valid_ratio * static_cast<double>(remaining))));
  const std::size_t n_train = remaining - n_valid;

  SplitDataset s;
  s.n_users_ = dataset.n_users();
  s.n_items_ = dataset.n_items();
  s.spec_ = spec;
  s.dataset_id_ = dataset.id();
  s.train_records_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.valid_records_.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                          order.begin() + static_cast<std::ptrdiff_t>(remaining));
  s.test_records_.assign(order.begin() + static_cast<std::ptrdiff_t>(remaining), order.end());
  for (auto* part : {&s.train_records_, &s.valid_records_, &s.test_records_}) std::sort(part->begin(), part->end());

  auto to_user_items = [&](const std::vector<std::size_t>& part) {
    std::vector<std::pair<Index, Index>> pairs;
    pairs.reserve(part.size());
    for (std::size_t k : part) pairs.emplace_back(dataset.records()[k].user, dataset.records()[k].item);
    return UserItems(dataset.n_users(), std::move(pairs));
  };
  s.train_ = to_user_items(s.train_records_);
  s.valid_ = to_user_items(s.valid_records_);
  s.test_ = to_user_items(s.test_records_);
  s.train_valid_ = UserItems::merge(s.train_, s.valid_);
  s.all_ = dataset.positives();
  return s;
}

std::vector<Triple> sample_triples(const UserItems& positives, const UserItems& exclude, Index n_items, int num_ng,
                                   Rng& rng, std::size_t* saturated_users) {
  if (num_ng < 1) throw Error(ErrorCode::kInvalidConfig, "num_ng must be at least 1");
  std::vector<Triple> out;
  out.reserve(positives.nnz() * static_cast<std::size_t>(num_ng));
  std::size_t saturated = 0;
  std::vector<Index> allowed;
  for (Index u = 0; u < positives.n_users(); ++u) {
    const auto pos = positives.of(u);
    if (pos.empty()) continue;
    const auto excl = u < exclude.n_users() ? exclude.of(u) : std::span<const Index>{};
    const std::size_t free_items = static_cast<std::size_t>(n_items) - excl.size();
    if (free_items == 0) {
      ++saturated;
      continue;
    }
    bool enumerated = false;
    for (Index i : pos) {
      for (int k = 0; k < num_ng; ++k) {
        Index neg = -1;
        if (!enumerated) {
          for (int attempt = 0; attempt < 100; ++attempt) {
            const auto cand = static_cast<Index>(rng.index(static_cast<std::size_t>(n_items)));
            if (!std::binary_search(excl.begin(), excl.end(), cand)) {
              neg = cand;
              break;
            }
          }
        }
        if (neg < 0) {
          // Retry cap hit: draw uniformly from the explicit complement instead.
          if (!enumerated) {
            allowed.clear();
            for (Index j = 0; j < n_items; ++j)
              if (!std::binary_search(excl.begin(), excl.end(), j)) allowed.push_back(j);
            enumerated = true;
          }
          neg = allowed[rng.index(allowed.size())];
        }
        out.push_back({u, i, neg});
      }
    }
  }
  if (saturated_users) *saturated_users = saturated;
  return out;
}

std::vector<Triple> sample_train_triples(const SplitDataset& split, int num_ng, Rng& rng, std::size_t* saturated_users) {
  return sample_triples(split.train(), split.train_valid(), split.n_items(), num_ng, rng, saturated_users);
}

CandidateLists build_candidates(const UserItems& targets, const UserItems& known, Index n_items, std::size_t pool_size,
                                Rng& rng) {
  CandidateLists out(static_cast<std::size_t>(targets.n_users()));
  std::vector<Index> allowed;
  std::unordered_set<Index> chosen;
  for (Index u = 0; u < targets.n_users(); ++u) {
    const auto tgt = targets.of(u);
    if (tgt.empty()) continue;
    const auto excl = known.of(u);
    auto& list = out[static_cast<std::size_t>(u)];
    list.assign(tgt.begin(), tgt.end());
    const std::size_t available = static_cast<std::size_t>(n_items) - excl.size();
    const std::size_t need = pool_size > list.size() ? std::min(pool_size - list.size(), available) : 0;
    if (need == 0) {
    } else if (need * 4 < available) {
      chosen.clear();
      while (chosen.size() < need) {
        const auto cand = static_cast<Index>(rng.index(static_cast<std::size_t>(n_items)));
        if (std::binary_search(excl.begin(), excl.end(), cand)) continue;
        if (chosen.insert(cand).second) list.push_back(cand);
      }
    } else {
      allowed.clear();
      for (Index j = 0; j < n_items; ++j)
        if (!std::binary_search(excl.begin(), excl.end(), j)) allowed.push_back(j);
      for (std::size_t k = 0; k < need; ++k) {
        const std::size_t pick = k + rng.index(allowed.size() - k);
        std::swap(allowed[k], allowed[pick]);
        list.push_back(allowed[k]);
      }
    }
    std::sort(list.begin(), list.end());
  }
  return out;
}

CandidateLists build_eval_candidates(const SplitDataset& split, std::size_t pool_size, Rng& rng) {
  return build_candidates(split.test(), split.all(), split.n_items(), pool_size, rng);
}

CandidateLists build_valid_candidates(const SplitDataset& split, std::size_t pool_size, Rng& rng) {
  return build_candidates(split.valid(), split.all(), split.n_items(), pool_size, rng);
}

Json split_manifest(const SplitDataset& split) {
  Json j;
  j["dataset_id"] = split.dataset_id();
  j["method"] = std::string(split_method_name(split.spec().method));
  j["seed"] = split.spec().seed;
  j["ratios"] = {{"test", split.spec().test_ratio}, {"valid", split.spec().valid_ratio}};
  j["counts"] = {{"users", split.n_users()},
                 {"items", split.n_items()},
                 {"train", split.train_records().size()},
                 {"valid", split.valid_records().size()},
                 {"test", split.test_records().size()}};
  return j;
}

void write_split(const Dataset& dataset, const SplitDataset& split, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto dump = [&](const char* name, const std::vector<std::size_t>& part) {
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / name).string());
    for (std::size_t k : part) {
      const auto& r = dataset.records()[k];
      out << dataset.user_ids()[r.user] << '\t' << dataset.item_ids()[r.item] << '\t' << r.timestamp << '\n';
    }
  };
  dump("train.tsv", split.train_records());
  dump("valid.tsv", split.valid_records());
  dump("test.tsv", split.test_records());
  std::ofstream out(dir / "split.json");
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / "split.json").string());
  out << split_manifest(split).dump(2) << '\n';
}

}  // namespace recbench
