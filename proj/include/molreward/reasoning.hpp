#pragma once

// Metrics over the reasoning segment of a response: agreement between the
// liabilities a rationale names and the true ones, aggregation of judge
// sub-scores, and an embedding-distance richness score.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "molreward/admet.hpp"

namespace molreward {

using EndpointSet = std::set<std::string, std::less<>>;

// Surface forms that name an endpoint in free text. Aliases are stored
// lowercased with whitespace runs collapsed; an alias belongs to one endpoint.
class EndpointLexicon {
 public:
  // Throws ConfigError on empty lexicon, endpoint without alias, empty alias or
  // an alias shared by two endpoints.
  explicit EndpointLexicon(std::map<std::string, std::vector<std::string>, std::less<>> aliases);

  const std::map<std::string, std::vector<std::string>, std::less<>>& aliases() const noexcept { return aliases_; }
  std::size_t alias_count() const noexcept { return by_length_.size(); }

  // Throws ConfigError if an endpoint in the registry has no entry or the
  // lexicon names an endpoint the registry does not know.
  void check_covers(const CriteriaRegistry& registry) const;

  // Leftmost, longest-alias scan at word boundaries, case-insensitive.
  EndpointSet extract(std::string_view text) const;

  bool operator==(const EndpointLexicon& other) const { return aliases_ == other.aliases_; }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> aliases_;
  std::vector<std::pair<std::string, std::string>> by_length_;  // (alias, endpoint), longest first
};

std::string normalize_text(std::string_view text);

const EndpointLexicon& default_lexicon();
EndpointLexicon lexicon_from_json(const nlohmann::json& config);  // {"aliases": {endpoint: [alias...]}}
nlohmann::json lexicon_to_json(const EndpointLexicon& lexicon);
EndpointLexicon load_lexicon(const std::string& path);

inline EndpointSet extract_mentioned_liabilities(std::string_view reasoning, const EndpointLexicon& lexicon) {
  return lexicon.extract(reasoning);
}

// Both empty gives 1, exactly one empty gives 0.
double target_property_f1(const EndpointSet& mentioned, const EndpointSet& true_liabilities);

enum class CriticalFailure { kEditRationaleContradiction, kChemicalMisconception };

std::string_view to_string(CriticalFailure flag);
CriticalFailure critical_failure_from(std::string_view name);  // throws std::invalid_argument

struct JudgeSubScores {
  double problem_solution = 0.0;   // problem identification vs proposed solution
  double solution_edit = 0.0;      // proposed solution vs the actual SMILES edit
  double chain_completeness = 0.0;
  double causal_accuracy = 0.0;
  std::set<CriticalFailure> flags;

  bool operator==(const JudgeSubScores&) const = default;
};

inline constexpr double kCriticalFailurePenalty = 0.3;
inline constexpr int kMinReasoningTokens = 10;

// Throws std::invalid_argument if a sub-score is outside [0, 1] or not finite.
void validate_sub_scores(const JudgeSubScores& sub);

int whitespace_token_count(std::string_view text);

// Mean of the four sub-scores minus 0.3 per flag, clamped to [0, 1]. Reasoning
// with fewer than 10 whitespace-separated tokens scores 0.
double lms_aggregate(const JudgeSubScores& sub, std::string_view reasoning);

struct RichnessConfig {
  std::vector<std::vector<double>> prototypes;  // unit vectors of one dimension
  double peak_distance = 0.5;                   // d*
  double bandwidth = 0.1;                       // sigma

  std::size_t dimension() const { return prototypes.empty() ? 0 : prototypes.front().size(); }
  bool operator==(const RichnessConfig&) const = default;
};

inline constexpr double kMinRichnessBandwidth = 0.05;
inline constexpr double kMinPeakDistance = 0.05;
inline constexpr double kPeakScale = 1.25;
inline constexpr std::uint64_t kDefaultRichnessSeed = 20240917;

// Throws std::invalid_argument on empty prototype list, mixed dimensions,
// non-unit prototypes, sigma <= 0 or d* outside (0, 2).
void validate_richness_config(const RichnessConfig& config);

// Returns a unit-norm copy; throws std::invalid_argument for a zero or non-finite vector.
std::vector<double> unit_normalized(std::vector<double> v);
double cosine_distance(const std::vector<double>& a, const std::vector<double>& b);

// exp(-(d - d*)^2 / (2 sigma^2)) of d = min_p (1 - cos(e, p)).
double richness_from_distance(double d, const RichnessConfig& config);
double min_prototype_distance(const std::vector<double>& embedding, const RichnessConfig& config);
// Embedding is normalized here; throws std::invalid_argument on dimension mismatch.
double richness_score(const std::vector<double>& embedding, const RichnessConfig& config);

// Spherical k-means (k-means++ seeding from a fixed seed). d* is 1.25 times the
// median leave-one-out distance, sigma the interquartile range of those
// distances; both floored at 0.05. Throws std::invalid_argument when k < 1 or k
// exceeds the number of distinct vectors.
RichnessConfig fit_richness_config(const std::vector<std::vector<double>>& embeddings, int k,
                                   std::uint64_t seed = kDefaultRichnessSeed);

// Distances the fit uses: each embedding against the prototypes with its own
// cluster recomputed without it.
std::vector<double> leave_one_out_distances(const std::vector<std::vector<double>>& embeddings,
                                            const std::vector<int>& assignment, int k);

nlohmann::json richness_to_json(const RichnessConfig& config);
RichnessConfig richness_from_json(const nlohmann::json& config);  // throws ConfigError
RichnessConfig load_richness_config(const std::string& path);
void save_richness_config(const RichnessConfig& config, const std::string& path);

struct EmbeddingRecord {
  std::string id;
  std::vector<double> vector;
};

// JSONL, one {"id": ..., "vector": [...]} per line. Throws ConfigError with the
// offending line number.
std::vector<EmbeddingRecord> load_embeddings(const std::string& path);

}  // namespace molreward
