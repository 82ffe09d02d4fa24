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

#ifndef RECBENCH_CHECKPOINT_HPP
#define RECBENCH_CHECKPOINT_HPP

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

#include "recbench/models.hpp"

namespace recbench {

// Blob layout, all integers little-endian:
//   "RBCKPT01" | u64 header length | JSON header | parameter blocks as
//   IEEE-754 doubles in header order | u64 FNV-1a of everything before.
// The header records model, config, seed, epochs_done and block sizes.
inline constexpr int kCheckpointVersion = 1;

std::string checkpoint_key(ModelKind kind, const std::string& dataset_id, const Config& config, std::uint64_t seed);

void write_checkpoint(Recommender& model, std::ostream& out);

// Rebuilds a model with the given identity from a blob. Throws
// CorruptCheckpoint when the blob is damaged or belongs to another model.
std::unique_ptr<Recommender> read_checkpoint(std::istream& in, ModelKind kind, const Config& config,
                                             std::uint64_t seed, Index n_users, Index n_items);

// One file per key under a directory.
class CheckpointStore {
 public:
  explicit CheckpointStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& key) const { return dir_ / (key + ".ckpt"); }

  void save(const std::string& key, Recommender& model) const;
  // nullptr when absent; throws CorruptCheckpoint when unreadable.
  std::unique_ptr<Recommender> load(const std::string& key, ModelKind kind, const Config& config, std::uint64_t seed,
                                    Index n_users, Index n_items) const;
  void remove(const std::string& key) const;
  void purge() const;

 private:
  std::filesystem::path dir_;
};

}  // namespace recbench

#endif  // RECBENCH_CHECKPOINT_HPP
