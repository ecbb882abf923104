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

#include "seqbench/emissions/tracker.hpp"

#include <chrono>
#include <cmath>

#include "seqbench/common/errors.hpp"

namespace seqbench::emissions {

void EmissionsConfig::validate() const {
  if (!(std::isfinite(device_power_watts) && device_power_watts > 0.0))
    throw ConfigError("emissions: device_power_watts must be positive");
  if (!(std::isfinite(carbon_intensity_kg_per_kwh) && carbon_intensity_kg_per_kwh > 0.0))
    throw ConfigError("emissions: carbon_intensity_kg_per_kwh must be positive");
}

EmissionsReport EmissionsReport::from_seconds(double seconds, const EmissionsConfig& config) {
  EmissionsReport r;
  r.elapsed_seconds = seconds;
  r.energy_kwh = seconds / 3600.0 * config.device_power_watts / 1000.0;
  r.co2eq_kg = r.energy_kwh * config.carbon_intensity_kg_per_kwh;
  return r;
}

Clock steady_clock() {
  return [] {
    return std::optional<double>(
        std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count());
  };
}

Tracker::Tracker(EmissionsConfig config, Clock clock) : config_(config), clock_(std::move(clock)) {
  config_.validate();
}

void Tracker::start() { started_ = clock_(); }

EmissionsReport Tracker::report() const {
  const std::optional<double> now = clock_();
  if (!started_ || !now || *now < *started_) {
    EmissionsReport invalid = EmissionsReport::from_seconds(0.0, config_);
    invalid.timing_valid = false;
    return invalid;
  }
  return EmissionsReport::from_seconds(*now - *started_, config_);
}

}  // namespace seqbench::emissions
