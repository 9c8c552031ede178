#pragma once

// Liability-aware ADMET improvement score for (original, optimized) pairs.
//
// Each endpoint is a range target, a threshold, or a monotonic objective. The
// score sums direction-aware improvements, clipped to [-M, M] and topped up with
// a bonus for crossing a threshold or entering a range, weights endpoints that
// were liabilities of the original molecule at 1 and the rest at 0.5, subtracts
// a fixed penalty per newly introduced liability, then normalizes to [0, 1]:
//
//   score = clamp(raw / D, 0, 1),  D = sum over original liabilities of (M + bonus_f)
//                                      (M / 2 when the original has no liability)

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace molreward {

enum class CriterionKind { kRange, kThreshold, kMonotonic };
enum class Direction { kLowerBetter, kHigherBetter, kInRange };

std::string_view to_string(CriterionKind kind);
std::string_view to_string(Direction direction);

struct EndpointCriterion {
  std::string endpoint;
  CriterionKind kind = CriterionKind::kMonotonic;
  Direction direction = Direction::kHigherBetter;
  double threshold = 0.0;  // threshold kind
  double lo = 0.0;         // range kind
  double hi = 0.0;
  double bonus = 0.0;      // threshold: beta, range: gamma, monotonic: 0
  bool probability = false;  // value must lie in [0, 1]

  bool operator==(const EndpointCriterion&) const = default;
};

struct RewardConstants {
  double clip_bound = 2.0;                // M
  double new_liability_penalty = 0.3;     // mu
  double non_liability_weight = 0.5;
  double threshold_bonus = 2.5;           // beta
  double range_bonus = 3.5;               // gamma

  bool operator==(const RewardConstants&) const = default;
};

inline constexpr std::size_t kEndpointCount = 23;

class CriteriaRegistry {
 public:
  // Validates every criterion and requires exactly 23 distinct endpoints.
  // Throws ConfigError.
  CriteriaRegistry(std::vector<EndpointCriterion> criteria, RewardConstants constants);

  const std::vector<EndpointCriterion>& criteria() const noexcept { return criteria_; }
  const RewardConstants& constants() const noexcept { return constants_; }
  const EndpointCriterion* find(std::string_view endpoint) const;
  const EndpointCriterion& at(std::string_view endpoint) const;  // throws std::out_of_range
  std::size_t count(CriterionKind kind) const;

  bool operator==(const CriteriaRegistry&) const = default;

 private:
  std::vector<EndpointCriterion> criteria_;
  RewardConstants constants_;
};

// Built-in criteria table (3 range, 15 threshold, 5 monotonic endpoints).
const CriteriaRegistry& default_registry();

// Config file: {"constants": {...}, "target_criteria": [...], "monotonic_criteria": [...]}.
CriteriaRegistry registry_from_json(const nlohmann::json& config);
nlohmann::json registry_to_json(const CriteriaRegistry& registry);
CriteriaRegistry load_registry(const std::string& path);

using AdmetProfile = std::map<std::string, double, std::less<>>;

// Throws std::invalid_argument for unknown endpoints, non-finite values, or
// probability endpoints outside [0, 1].
void validate_profile(const AdmetProfile& profile, const CriteriaRegistry& registry);

// Threshold lower-better: value >= t. Threshold higher-better: value <= t.
// Range: outside [lo, hi]. Monotonic: never.
bool is_liability(const EndpointCriterion& criterion, double value);

std::set<std::string, std::less<>> liabilities(const AdmetProfile& profile, const CriteriaRegistry& registry);

struct EndpointDelta {
  double continuous = 0.0;  // already clipped to [-M, M]
  double bonus = 0.0;
};

EndpointDelta endpoint_delta(const EndpointCriterion& criterion, double original, double optimized,
                             double clip_bound);

struct EndpointContribution {
  double continuous = 0.0;
  double bonus = 0.0;
  double weight = 0.0;  // 1 for original liabilities, non-liability weight otherwise
  double value = 0.0;   // weight * (continuous + bonus)
};

struct PairEvaluation {
  std::set<std::string, std::less<>> original_liabilities;
  std::set<std::string, std::less<>> optimized_liabilities;
  std::map<std::string, EndpointContribution, std::less<>> contributions;
  int new_liabilities = 0;
  int dropped_endpoints = 0;  // present in only one of the two profiles
  double raw = 0.0;
  double denominator = 0.0;
  double score = 0.0;
};

// Throws std::invalid_argument when the profiles share no endpoint.
PairEvaluation overall_score(const AdmetProfile& original, const AdmetProfile& optimized,
                             const CriteriaRegistry& registry);

}  // namespace molreward
