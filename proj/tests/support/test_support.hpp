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

#ifndef RECBENCH_TEST_SUPPORT_HPP
#define RECBENCH_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <utility>

#include <unistd.h>
#include <vector>

#include "recbench/dataio.hpp"
#include "recbench/models.hpp"
#include "recbench/random.hpp"

namespace recbench::test_support {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("recbench_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Each (user, item) cell is set with probability `density`; every user gets
// at least one item and at least one item stays free for negatives.
inline UserItems random_user_items(Rng& rng, Index n_users, Index n_items, double density) {
  std::vector<std::pair<Index, Index>> pairs;
  for (Index u = 0; u < n_users; ++u) {
    std::size_t count = 0;
    for (Index i = 0; i + 1 < n_items; ++i) {
      if (rng.bernoulli(density)) {
        pairs.emplace_back(u, i);
        ++count;
      }
    }
    if (count == 0) pairs.emplace_back(u, static_cast<Index>(rng.index(static_cast<std::size_t>(n_items - 1))));
  }
  return UserItems(n_users, std::move(pairs));
}

inline bool same_parameters(Recommender& a, Recommender& b) {
  auto pa = a.parameter_blocks();
  auto pb = b.parameter_blocks();
  if (pa.size() != pb.size()) return false;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    const auto& x = *pa[k].values;
    const auto& y = *pb[k].values;
    if (pa[k].name != pb[k].name || x.size() != y.size()) return false;
    if (!x.empty() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) != 0) return false;
  }
  return true;
}

// ||a - b|| / max(||a||, ||b||), 0 when both vanish.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff += (a[k] - b[k]) * (a[k] - b[k]);
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  const double scale = std::sqrt(std::max(na, nb));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

inline Config bpr_config(std::int64_t factors, std::int64_t num_ng, double lr, double reg) {
  return Config({{"num_ng", num_ng}, {"factors", factors}, {"lr", lr}, {"reg_2", reg}});
}

inline Config neumf_config(std::int64_t factors, std::int64_t num_layers, double dropout, double lr, double reg,
                           const std::string& batch_size, std::int64_t num_ng = 2) {
  return Config({{"num_ng", num_ng},
                 {"factors", factors},
                 {"num_layers", num_layers},
                 {"dropout", dropout},
                 {"lr", lr},
                 {"reg_2", reg},
                 {"batch_size", batch_size}});
}

// Scores fixed by construction, one row per user; isolates ranking and
// evaluation from training.
class FixedScores final : public Recommender {
 public:
  explicit FixedScores(std::vector<std::vector<double>> rows)
      : Recommender(ModelKind::kItemKnn, Config(), 0, static_cast<Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Index>(rows.front().size())),
        rows_(std::move(rows)) {}
  void train_to(const TrainingData&, int) override {}
  double score(Index user, Index item) const override {
    return rows_[static_cast<std::size_t>(user)][static_cast<std::size_t>(item)];
  }
  std::vector<ParamBlock> parameter_blocks() override { return {}; }

 private:
  std::vector<std::vector<double>> rows_;
};

}  // namespace recbench::test_support

#endif  // RECBENCH_TEST_SUPPORT_HPP
