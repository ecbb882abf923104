// Copyright 2026 The seqbench Authors.
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

#include "seqbench/models/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "seqbench/common/errors.hpp"

namespace seqbench::models {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'Q', 'B', 'C', 'K', 'P', 'T', '\0'};

template <class T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw DataError("truncated checkpoint " + path);
  return v;
}

}  // namespace

nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"family", family_name(c.family)}, {"d", c.d},           {"length", c.length},
          {"layers", c.layers},              {"heads", c.heads},   {"dropout", c.dropout},
          {"mask_prob", c.mask_prob}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.family = parse_family(j.at("family").get<std::string>());
  c.d = j.at("d").get<std::size_t>();
  c.length = j.at("length").get<std::size_t>();
  c.layers = j.at("layers").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.mask_prob = j.at("mask_prob").get<double>();
  return c;
}

void save_checkpoint(const Model& model, const std::filesystem::path& path, const nlohmann::json& metadata) {
  nlohmann::json header;
  header["version"] = kCheckpointVersion;
  header["config"] = config_to_json(model.config());
  header["num_items"] = model.num_items();
  header["count_params"] = model.count_params();
  header["metadata"] = metadata.is_null() ? nlohmann::json::object() : metadata;
  for (const Parameter& p : model.parameters())
    header["parameters"].push_back({{"name", p.name}, {"shape", p.value.shape()}});
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kCheckpointVersion);
    write_pod(out, static_cast<std::uint64_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const Parameter& p : model.parameters())
      out.write(reinterpret_cast<const char*>(p.value.values().data()),
                static_cast<std::streamsize>(p.value.numel() * sizeof(double)));
    if (!out.flush()) throw DataError("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
  std::ofstream sidecar(path.string() + ".json");
  sidecar << header.dump(2) << '\n';
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError(path.string() + " is not a seqbench checkpoint");
  const auto version = read_pod<std::uint32_t>(in, path.string());
  if (version != kCheckpointVersion)
    throw DataError("checkpoint version " + std::to_string(version) + " is not supported");
  const auto length = read_pod<std::uint64_t>(in, path.string());
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) throw DataError("truncated checkpoint " + path.string());
  const nlohmann::json header = nlohmann::json::parse(text);

  LoadedCheckpoint loaded;
  loaded.model = build_model(config_from_json(header.at("config")), header.at("num_items").get<std::size_t>(), 0);
  loaded.metadata = header.at("metadata");
  auto& params = loaded.model->parameters();
  const auto& listed = header.at("parameters");
  if (listed.size() != params.size()) throw DataError("checkpoint parameter list does not match the model");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (listed[i].at("name").get<std::string>() != params[i].name ||
        listed[i].at("shape").get<tensor::Shape>() != params[i].value.shape())
      throw DataError("checkpoint parameter " + listed[i].at("name").get<std::string>() + " does not match the model");
    auto values = params[i].value.mutable_values();
    if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double))))
      throw DataError("truncated checkpoint " + path.string());
  }
  return loaded;
}

}  // namespace seqbench::models
