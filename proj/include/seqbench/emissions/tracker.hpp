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

#ifndef SEQBENCH_EMISSIONS_TRACKER_HPP_
#define SEQBENCH_EMISSIONS_TRACKER_HPP_

#include <functional>
#include <optional>
#include <utility>

namespace seqbench::emissions {

// Time x power estimator. Elapsed time is measured; power and grid
// intensity are configured, so the result is an estimate, not a reading.
struct EmissionsConfig {
  double device_power_watts = 65.0;
  double carbon_intensity_kg_per_kwh = 0.4;

  void validate() const;  // ConfigError unless both are positive and finite
};

struct EmissionsReport {
  double elapsed_seconds = 0.0;
  double energy_kwh = 0.0;
  double co2eq_kg = 0.0;
  bool timing_valid = true;

  static EmissionsReport from_seconds(double seconds, const EmissionsConfig& config);
};

// Seconds on a monotone clock, or nullopt when the clock fails.
using Clock = std::function<std::optional<double>()>;
Clock steady_clock();

// Measures one interval on a clock.
class Tracker {
 public:
  explicit Tracker(EmissionsConfig config, Clock clock = steady_clock());
  void start();
  // Report for the time since start(). A failed or backwards clock reading
  // yields a zero report flagged invalid.
  EmissionsReport report() const;

 private:
  EmissionsConfig config_;
  Clock clock_;
  std::optional<double> started_;
};

template <class F>
auto track(F&& run, const EmissionsConfig& config, Clock clock = steady_clock()) {
  Tracker tracker(config, std::move(clock));
  tracker.start();
  auto result = std::forward<F>(run)();
  return std::make_pair(std::move(result), tracker.report());
}

}  // namespace seqbench::emissions

#endif  // SEQBENCH_EMISSIONS_TRACKER_HPP_
