#pragma once

// Sample-level Pareto reweighting and batch-level balancing over six objective
// channels (three reasoning, three SMILES), all oriented higher-is-better.
//
//   w~_i = beta                                          if i is on the frontier
//        = prod_m (1 + (beta - 1) exp(-lambda d_i^(m)))  otherwise
//   w_i  = N w~_i / sum_j w~_j

#include <array>
#include <cstddef>
#include <deque>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace molreward {

inline constexpr std::size_t kChannelCount = 6;

enum Channel : std::size_t { kF1 = 0, kLms, kRichness, kOptScore, kSimilarity, kBindingUtility };

using ObjectiveVector = std::array<double, kChannelCount>;

std::string_view channel_name(std::size_t channel);
// 0 for reasoning channels (f1, lms, richness), 1 for SMILES channels.
constexpr std::size_t channel_group(std::size_t channel) { return channel < 3 ? 0 : 1; }

// Throws std::invalid_argument if a channel is not finite or a bounded channel
// (everything except binding utility) is outside [0, 1].
void validate_objective(const ObjectiveVector& v);

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Non-dominated indices in increasing order.
std::vector<std::size_t> pareto_set(const std::vector<ObjectiveVector>& vectors);
std::vector<bool> pareto_mask(const std::vector<ObjectiveVector>& vectors);

struct BalanceConfig {
  double pareto_boost = 1.3;        // beta
  double decay = 2.0;               // lambda
  double shortfall_exponent = 0.5;  // eta
  double boost_cap = 1.5;
  double group_scale_cap = 1.5;
  // Channel targets; binding utility is in kcal/mol (6.0 is the -6 kcal/mol gate).
  ObjectiveVector targets = {0.5, 0.6, 0.5, 0.2, 0.6, 6.0};

  bool operator==(const BalanceConfig&) const = default;
};

// Throws ConfigError.
void validate_balance_config(const BalanceConfig& config);
BalanceConfig balance_from_json(const nlohmann::json& config);
nlohmann::json balance_to_json(const BalanceConfig& config);
BalanceConfig load_balance_config(const std::string& path);

struct SampleWeights {
  std::vector<bool> frontier;
  std::vector<std::array<double, 2>> distances;  // per subspace, 0 on the frontier
  std::vector<double> raw;                       // w~
  std::vector<double> normalized;                // w, mean 1
};

// Coordinates used for the distance terms: binding utility min-max rescaled to
// [0, 1] over the batch (0 when the batch is constant in that channel).
std::vector<ObjectiveVector> distance_coordinates(const std::vector<ObjectiveVector>& vectors);

// Throws std::invalid_argument on an empty batch.
SampleWeights sample_weights(const std::vector<ObjectiveVector>& vectors, const BalanceConfig& config);

struct BatchAdaptation {
  ObjectiveVector channel_means{};
  std::array<double, 2> group_scales{1.0, 1.0};
  ObjectiveVector channel_boosts{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
};

// s_g = clamp(mean target_g / max(mean r_g, 1e-6), 1, group cap)
// b_m = min(cap, (tau_m / max(r_m, 1e-6))^eta) if r_m < tau_m, else 1
BatchAdaptation batch_adaptation(const std::vector<ObjectiveVector>& vectors, const BalanceConfig& config);
BatchAdaptation batch_adaptation(const std::vector<ObjectiveVector>& vectors, const BalanceConfig& config,
                                 const ObjectiveVector& targets);

// rewards[m][i] for channel m and trajectory i. Throws std::invalid_argument on
// a shape mismatch.
using ChannelRewards = std::array<std::vector<double>, kChannelCount>;
ChannelRewards reweight_rewards(const ChannelRewards& rewards, const std::vector<double>& weights,
                                const ObjectiveVector& boosts, const std::array<double, 2>& scales);

struct TrajectoryBatch {
  std::vector<ObjectiveVector> vectors;
  SampleWeights weights;
  BatchAdaptation adaptation;
};

TrajectoryBatch balance_batch(std::vector<ObjectiveVector> vectors, const BalanceConfig& config);

struct WeightSummary {
  double p50 = 1.0;
  double p90 = 1.0;
  double p99 = 1.0;
  double frontier_ratio = 1.0;
  double mean = 1.0;
};

WeightSummary summarize_weights(const SampleWeights& weights);

// Per-channel medians over a sliding window of observed objective values.
// Thread-safe; falls back to the supplied defaults before any observation.
class RunningTargets {
 public:
  explicit RunningTargets(ObjectiveVector defaults, std::size_t window = 10000);

  void observe(const std::vector<ObjectiveVector>& batch);
  ObjectiveVector current() const;
  std::size_t observed() const;

 private:
  ObjectiveVector defaults_;
  std::size_t window_;
  std::array<std::deque<double>, kChannelCount> values_;
  mutable std::mutex mutex_;
};

struct ObjectiveRecord {
  std::string id;
  ObjectiveVector objectives{};
};

// JSONL of {"id", "objectives": {f1, lms, richness, opt_score, similarity,
// binding_energy}}; binding utility is the negated energy. Throws ConfigError
// naming the line.
std::vector<ObjectiveRecord> load_objectives(const std::string& path);
ObjectiveRecord objective_from_json(const nlohmann::json& j);

}  // namespace molreward
