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

#include "recbench/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "recbench/error.hpp"
#include "recbench/hash.hpp"

namespace recbench {

namespace {

constexpr char kMagic[8] = {'R', 'B', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void put_le(std::string& buf, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

template <typename T>
T get_le(const std::string& buf, std::size_t& pos) {
  if (pos + 8 > buf.size()) throw Error(ErrorCode::kCorruptCheckpoint, "truncated checkpoint");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + b])) << (8 * b);
  pos += 8;
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

std::string checkpoint_key(ModelKind kind, const std::string& dataset_id, const Config& config, std::uint64_t seed) {
  Fnv1a h;
  h.update(model_name(kind));
  h.update("|");
  h.update(dataset_id);
  h.update("|");
  h.update(config.canonical());
  h.update("|");
  h.update(std::to_string(seed));
  return h.hex();
}

void write_checkpoint(Recommender& model, std::ostream& out) {
  Json header;
  header["format"] = "recbench-checkpoint";
  header["version"] = kCheckpointVersion;
  header["model"] = std::string(model_name(model.kind()));
  header["config"] = config_to_json(model.config());
  header["config_canonical"] = model.config().canonical();
  header["seed"] = model.seed();
  header["epochs_done"] = model.epochs_done();
  header["epoch_losses"] = model.epoch_losses();
  Json blocks = Json::array();
  const auto params = model.parameter_blocks();
  for (const auto& b : params) blocks.push_back({{"name", b.name}, {"size", b.values->size()}});
  header["blocks"] = blocks;

  std::string buf(kMagic, sizeof(kMagic));
  const std::string text = header.dump();
  put_le<std::uint64_t>(buf, text.size());
  buf += text;
  for (const auto& b : params)
    for (double x : *b.values) put_le<double>(buf, x);
  Fnv1a h;
  h.update(buf);
  put_le<std::uint64_t>(buf, h.value());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::kIoError, "failed writing checkpoint");
}

std::unique_ptr<Recommender> read_checkpoint(std::istream& in, ModelKind kind, const Config& config,
                                             std::uint64_t seed, Index n_users, Index n_items) {
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();
  if (buf.size() < sizeof(kMagic) + 16 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw Error(ErrorCode::kCorruptCheckpoint, "bad magic");
  {
    std::size_t tail = buf.size() - 8;
    const auto stored = get_le<std::uint64_t>(buf, tail);
    Fnv1a h;
    h.update(std::string_view(buf.data(), buf.size() - 8));
    if (stored != h.value()) throw Error(ErrorCode::kCorruptCheckpoint, "checksum mismatch");
  }
  std::size_t pos = sizeof(kMagic);
  const auto header_len = get_le<std::uint64_t>(buf, pos);
  if (pos + header_len > buf.size() - 8) throw Error(ErrorCode::kCorruptCheckpoint, "truncated header");
  Json header;
  try {
    header = Json::parse(buf.substr(pos, header_len));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kCorruptCheckpoint, std::string("bad header: ") + e.what());
  }
  pos += header_len;
  try {
    if (header.at("version").get<int>() != kCheckpointVersion)
      throw Error(ErrorCode::kCorruptCheckpoint, "unsupported checkpoint version");
    if (header.at("model").get<std::string>() != model_name(kind) ||
        header.at("config_canonical").get<std::string>() != config.canonical() ||
        header.at("seed").get<std::uint64_t>() != seed)
      throw Error(ErrorCode::kCorruptCheckpoint, "checkpoint belongs to a different trial");

    auto model = make_model(kind, config, seed, n_users, n_items);
    auto params = model->parameter_blocks();
    const auto& blocks = header.at("blocks");
    if (blocks.size() != params.size()) throw Error(ErrorCode::kCorruptCheckpoint, "block count mismatch");
    for (std::size_t b = 0; b < params.size(); ++b) {
      if (blocks[b].at("name").get<std::string>() != params[b].name)
        throw Error(ErrorCode::kCorruptCheckpoint, "block name mismatch");
      const auto size = blocks[b].at("size").get<std::size_t>();
      if (pos + size * 8 > buf.size() - 8) throw Error(ErrorCode::kCorruptCheckpoint, "truncated parameters");
      params[b].values->resize(size);
      for (std::size_t k = 0; k < size; ++k) (*params[b].values)[k] = get_le<double>(buf, pos);
    }
    if (pos != buf.size() - 8) throw Error(ErrorCode::kCorruptCheckpoint, "trailing bytes");
    model->restore_progress(header.at("epochs_done").get<int>(), header.at("epoch_losses").get<std::vector<double>>());
    model->on_parameters_loaded();
    return model;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kCorruptCheckpoint, std::string("bad header: ") + e.what());
  }
}

void CheckpointStore::save(const std::string& key, Recommender& model) const {
  std::filesystem::create_directories(dir_);
  const auto final_path = path_for(key);
  const auto tmp = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp);
    write_checkpoint(model, out);
  }
  std::filesystem::rename(tmp, final_path);
}

std::unique_ptr<Recommender> CheckpointStore::load(const std::string& key, ModelKind kind, const Config& config,
                                                   std::uint64_t seed, Index n_users, Index n_items) const {
  const auto path = path_for(key);
  if (!std::filesystem::exists(path)) return nullptr;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kCorruptCheckpoint, "cannot open " + path.string());
  return read_checkpoint(in, kind, config, seed, n_users, n_items);
}

void CheckpointStore::remove(const std::string& key) const {
  std::error_code ec;
  std::filesystem::remove(path_for(key), ec);
}

void CheckpointStore::purge() const {
  std::error_code ec;
  std::filesystem::remove_all(dir_, ec);
}

}  // namespace recbench
