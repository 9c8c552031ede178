#pragma once

// Synthetic rollout batches for exercising the balancing engine: each channel
// is Gaussian around a linearly drifting mean, with an optional shared factor
// correlating the channels of one trajectory.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "molreward/pareto.hpp"

namespace molreward {

struct ChannelGenerator {
  double mean = 0.5;
  double drift = 0.0;   // added to the mean per step
  double stddev = 0.1;

  bool operator==(const ChannelGenerator&) const = default;
};

struct GeneratorSpec {
  std::array<ChannelGenerator, kChannelCount> channels{};
  double shared_factor = 0.0;  // correlation in [0, 1) between channels of a trajectory
  int steps = 1200;
  int batch_size = 64;
  std::uint64_t seed = 7;
  int log_every = 100;
  int adaptation_interval = 100;  // batch adaptation refreshed every this many steps

  bool operator==(const GeneratorSpec&) const = default;
};

// Defaults: rising means in every channel, moderately correlated.
GeneratorSpec default_generator_spec();

// Channels are keyed by name; binding utility is given as binding_energy with
// the sign flipped on load (mean -7.0 means utility 7.0). Throws ConfigError.
GeneratorSpec generator_from_json(const nlohmann::json& j);
nlohmann::json generator_to_json(const GeneratorSpec& spec);
GeneratorSpec load_generator_spec(const std::string& path);

struct DynamicsRow {
  int step = 0;
  ObjectiveVector channel_means{};
  WeightSummary weights;
  ObjectiveVector channel_boosts{};
  std::array<double, 2> group_scales{};
};

// Bounded channels are clamped to [0, 1].
std::vector<ObjectiveVector> sample_batch(const GeneratorSpec& spec, int step, std::uint64_t& state);

// Rows at step 0, every log_every steps, and the final step.
std::vector<DynamicsRow> simulate_rl_batches(const GeneratorSpec& spec, const BalanceConfig& config);

nlohmann::json dynamics_row_to_json(const DynamicsRow& row);
std::string dynamics_table(const std::vector<DynamicsRow>& rows);

}  // namespace molreward
