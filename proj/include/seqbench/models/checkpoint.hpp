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
#ifndef SEQBENCH_MODELS_CHECKPOINT_HPP_
#define SEQBENCH_MODELS_CHECKPOINT_HPP_

#include <filesystem>
#include <memory>

#include "json.hpp"
#include "seqbench/models/model.hpp"

namespace seqbench::models {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary container: "SQBCKPT\0", u32 version, u64 header length, JSON header
// (config, item count, parameter names and shapes, caller metadata), then
// every parameter as little-endian float64 in header order. A JSON sidecar
// <path>.json repeats the header for humans and tools.
void save_checkpoint(const Model& model, const std::filesystem::path& path, const nlohmann::json& metadata = {});

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  nlohmann::json metadata;
};
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const nlohmann::json& j);

}  // namespace seqbench::models

#endif  // SEQBENCH_MODELS_CHECKPOINT_HPP_
