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

#ifndef RECBENCH_DATAIO_HPP
#define RECBENCH_DATAIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recbench/random.hpp"
#include "recbench/searchspace.hpp"

namespace recbench {

using Index = std::int32_t;

struct Interaction {
  std::string user;
  std::string item;
  std::optional<double> rating;
  std::int64_t timestamp = 0;
};

// generic-tsv: user<TAB>item[<TAB>rating[<TAB>timestamp]]
// ml1m:        user::item::rating::timestamp
// lastfm:      hetrec2011 user_artists.dat (header row, user<TAB>artist<TAB>weight)
enum class InputFormat { kGenericTsv, kMl1m, kLastfm };
enum class FeedbackMode { kExplicit, kImplicit };

InputFormat parse_input_format(std::string_view s);
FeedbackMode parse_feedback_mode(std::string_view s);

std::vector<Interaction> load_interactions(const std::filesystem::path& path, InputFormat format);

std::vector<Interaction> binarize(const std::vector<Interaction>& interactions, double threshold = 4.0,
                                  FeedbackMode mode = FeedbackMode::kExplicit);

// Per-user sorted item lists in compressed sparse row layout.
class UserItems {
 public:
  UserItems() = default;
  UserItems(Index n_users, std::vector<std::pair<Index, Index>> pairs);

  Index n_users() const { return static_cast<Index>(offsets_.empty() ? 0 : offsets_.size() - 1); }
  std::size_t nnz() const { return items_.size(); }
  std::span<const Index> of(Index user) const {
    return {items_.data() + offsets_[user], items_.data() + offsets_[user + 1]};
  }
  bool contains(Index user, Index item) const;

  static UserItems merge(const UserItems& a, const UserItems& b);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Index> items_;
};

struct Record {
  Index user = 0;
  Index item = 0;
  std::int64_t timestamp = 0;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> user_ids, std::vector<std::string> item_ids, std::vector<Record> records);

  Index n_users() const { return static_cast<Index>(user_ids_.size()); }
  Index n_items() const { return static_cast<Index>(item_ids_.size()); }
  std::size_t n_interactions() const { return records_.size(); }
  double sparsity() const;

  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  std::optional<Index> user_index(const std::string& raw) const;
  std::optional<Index> item_index(const std::string& raw) const;

  // Records in input order after de-duplication.
  const std::vector<Record>& records() const { return records_; }
  const UserItems& positives() const { return positives_; }

  // Content hash of indices and records, stable across runs.
  std::string id() const;

 private:
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::unordered_map<std::string, Index> user_lookup_;
  std::unordered_map<std::string, Index> item_lookup_;
  std::vector<Record> records_;
  UserItems positives_;
};

// Indexes users and items in order of first appearance and drops repeated
// (user, item) pairs, keeping the first. Throws InvalidSpec on empty input.
Dataset build_dataset(const std::vector<Interaction>& interactions);

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

enum class SplitMethod { kRandom, kTemporal };
SplitMethod parse_split_method(std::string_view s);
std::string_view split_method_name(SplitMethod m);

struct SplitSpec {
  SplitMethod method = SplitMethod::kRandom;
  double test_ratio = 0.2;
  double valid_ratio = 0.1;
  std::uint64_t seed = 0;
};

using CandidateLists = std::vector<std::vector<Index>>;  // empty list = user skipped

class SplitDataset {
 public:
  SplitDataset() = default;

  Index n_users() const { return n_users_; }
  Index n_items() const { return n_items_; }
  const SplitSpec& spec() const { return spec_; }
  const std::string& dataset_id() const { return dataset_id_; }

  // Record indices into the source dataset, ascending.
  const std::vector<std::size_t>& train_records() const { return train_records_; }
  const std::vector<std::size_t>& valid_records() const { return valid_records_; }
  const std::vector<std::size_t>& test_records() const { return test_records_; }

  const UserItems& train() const { return train_; }
  const UserItems& valid() const { return valid_; }
  const UserItems& test() const { return test_; }
  const UserItems& train_valid() const { return train_valid_; }
  const UserItems& all() const { return all_; }

  const CandidateLists& test_candidates() const { return test_candidates_; }
  const CandidateLists& valid_candidates() const { return valid_candidates_; }
  void set_test_candidates(CandidateLists c) { test_candidates_ = std::move(c); }
  void set_valid_candidates(CandidateLists c) { valid_candidates_ = std::move(c); }

 private:
  friend SplitDataset split_global(const Dataset&, const SplitSpec&);

  Index n_users_ = 0;
  Index n_items_ = 0;
  SplitSpec spec_;
  std::string dataset_id_;
  std::vector<std::size_t> train_records_, valid_records_, test_records_;
  UserItems train_, valid_, test_, train_valid_, all_;
  CandidateLists test_candidates_, valid_candidates_;
};

SplitDataset split_global(const Dataset& dataset, const SplitSpec& spec);

struct Triple {
  Index user = 0;
  Index pos = 0;
  Index neg = 0;
};

// For each positive (u, i), emits num_ng triples whose negative is uniform over
// items outside exclude[u]. Users whose exclusion covers the catalog are
// skipped and counted in *saturated_users.
std::vector<Triple> sample_triples(const UserItems& positives, const UserItems& exclude, Index n_items, int num_ng,
                                   Rng& rng, std::size_t* saturated_users = nullptr);

// Training triples from the train partition, negatives outside train and valid.
std::vector<Triple> sample_train_triples(const SplitDataset& split, int num_ng, Rng& rng,
                                         std::size_t* saturated_users = nullptr);

// For each user with targets: targets plus a uniform sample without replacement
// of items the user has no known interaction with, up to pool_size.
CandidateLists build_candidates(const UserItems& targets, const UserItems& known, Index n_items,
                                std::size_t pool_size, Rng& rng);

CandidateLists build_eval_candidates(const SplitDataset& split, std::size_t pool_size, Rng& rng);
CandidateLists build_valid_candidates(const SplitDataset& split, std::size_t pool_size, Rng& rng);

Json split_manifest(const SplitDataset& split);
void write_split(const Dataset& dataset, const SplitDataset& split, const std::filesystem::path& dir);

}  // namespace recbench

#endif  // RECBENCH_DATAIO_HPP
