#pragma once

// Batch evaluation of (original, optimized, rationale) records and dataset
// statistics.
//
// Record JSONL, one object per line:
//   id                        string (or number)
//   original_smiles           string
//   optimized_smiles          string
//   original_admet            {endpoint: value}
//   optimized_admet           {endpoint: value}
//   reasoning                 string, optional
//   reasoning_embedding       [number...], optional
//   binding_energy_original   kcal/mol, optional
//   binding_energy_optimized  kcal/mol, optional
//   category                  anti-inflammatory | antihypertensive | antidiabetic | other, optional
//   split                     train | dev | test, optional

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "molreward/admet.hpp"
#include "molreward/judge.hpp"
#include "molreward/pareto.hpp"
#include "molreward/reasoning.hpp"

namespace molreward {

inline constexpr double kBindingGate = -6.0;  // kcal/mol, inclusive

inline bool binding_gate(double energy) { return energy <= kBindingGate; }

struct PairRecord {
  std::string id;
  std::string original_smiles;
  std::string optimized_smiles;
  AdmetProfile original_admet;
  AdmetProfile optimized_admet;
  std::optional<std::string> reasoning;
  std::optional<std::vector<double>> reasoning_embedding;
  std::optional<double> binding_energy_original;
  std::optional<double> binding_energy_optimized;
  std::optional<std::string> category;
  std::optional<std::string> split;
};

struct Reject {
  int line = 0;
  std::string reason;
};

struct IngestResult {
  std::vector<PairRecord> records;
  std::vector<Reject> rejects;
};

// Throws std::invalid_argument (with the reason) for a record that breaks the
// schema, has an unparsable SMILES or an endpoint outside the registry.
PairRecord record_from_json(const nlohmann::json& j, const CriteriaRegistry& registry);
nlohmann::json record_to_json(const PairRecord& record);

// Malformed lines are collected, never fatal. Throws ConfigError if the file
// cannot be read.
IngestResult ingest(const std::string& path, const CriteriaRegistry& registry);
IngestResult ingest_stream(std::istream& in, const CriteriaRegistry& registry);

// Sidecars keyed by id: {"id", "vector"} and {"id", "binding_energy_original",
// "binding_energy_optimized"}. Values already on a record are kept. Returns
// the number of records updated.
std::size_t attach_embeddings(std::vector<PairRecord>& records, const std::vector<EmbeddingRecord>& embeddings);
std::size_t attach_binding_energies(std::vector<PairRecord>& records, const std::string& path);

struct EvaluationContext {
  const CriteriaRegistry& registry;
  const EndpointLexicon& lexicon;
  const RichnessConfig* richness = nullptr;  // richness skipped when null
  JudgeClient& judge;
  BalanceConfig balance{};
  unsigned threads = 1;
};

struct PairReport {
  std::string id;
  std::optional<std::string> error;  // set when the pair could not be scored
  std::string original_canonical;
  std::string optimized_canonical;
  PairEvaluation evaluation;
  double similarity = 0.0;
  bool similarity_pass = false;
  EndpointSet mentioned;
  std::optional<double> f1;
  std::optional<JudgeSubScores> judge;
  std::optional<double> lms;
  std::optional<double> richness;
  std::optional<double> binding_energy;
  std::optional<bool> binding_pass;
  std::optional<std::string> category;
  std::optional<std::string> split;
};

struct Aggregates {
  int pairs = 0;
  int scored = 0;
  int failed = 0;
  double mean_score = 0.0;
  double mean_similarity = 0.0;
  double similarity_pass_ratio = 0.0;
  std::optional<double> mean_f1;
  std::optional<double> mean_lms;
  std::optional<double> mean_richness;
  std::optional<double> binding_pass_ratio;
  std::optional<double> mean_binding_energy;

  bool operator==(const Aggregates&) const = default;
};

struct EvaluationReport {
  std::string config_fingerprint;
  std::string judge;
  std::optional<double> richness_peak;
  std::optional<double> richness_bandwidth;
  std::vector<PairReport> pairs;
  Aggregates aggregates;
};

// Scores a single record; never throws for per-pair problems.
PairReport evaluate_pair(const PairRecord& record, const EvaluationContext& context);
EvaluationReport evaluate(const std::vector<PairRecord>& records, const EvaluationContext& context);

Aggregates aggregate(const std::vector<PairReport>& pairs);
// Recomputes every aggregate from the rows; returns the mismatching fields.
std::vector<std::string> audit(const EvaluationReport& report);

// Hex digest over the registry, lexicon, balance config, richness config and judge name.
std::string config_fingerprint(const EvaluationContext& context);

nlohmann::json pair_report_to_json(const PairReport& pair);
nlohmann::json aggregates_to_json(const Aggregates& aggregates);
// Header line, one line per pair, aggregate line. Throws std::logic_error if the
// self-audit fails.
std::string report_jsonl(const EvaluationReport& report);
std::string report_table(const EvaluationReport& report);

struct SummaryStat {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

struct DatasetStats {
  int records = 0;
  int molecules = 0;  // original molecules that parsed
  SummaryStat heavy_atoms;
  SummaryStat rings;
  SummaryStat rotatable_bonds;
  std::optional<SummaryStat> tpsa;  // from the original ADMET profiles
  std::optional<SummaryStat> logp;
  int unique_smiles = 0;
  double unique_ratio = 0.0;
  int tanimoto_sample = 0;
  double mean_tanimoto = 0.0;
  double diversity = 0.0;
  std::map<std::string, int, std::less<>> splits;
  std::map<std::string, int, std::less<>> categories;
};

inline constexpr int kTanimotoSampleSize = 1000;

// Statistics over the original molecules; mean pairwise Tanimoto over a seeded
// sample of at most 1000 of them.
DatasetStats dataset_stats(const std::vector<PairRecord>& records, std::uint64_t seed = 1);
nlohmann::json stats_to_json(const DatasetStats& stats);
std::string stats_table(const DatasetStats& stats);

}  // namespace molreward
