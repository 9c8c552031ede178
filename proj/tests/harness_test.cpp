#include "molreward/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "molreward/error.hpp"
#include "molreward/smiles.hpp"
#include "test_data.hpp"

namespace molreward {
namespace {

using molreward::testing::data_path;
using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json minimal_record(const std::string& id) {
  return {{"id", id},
          {"original_smiles", "CCO"},
          {"optimized_smiles", "CCO"},
          {"original_admet", {{"logP", 4.0}, {"QED", 0.4}}},
          {"optimized_admet", {{"logP", 2.0}, {"QED", 0.5}}}};
}

struct Fixture {
  StubJudge judge;
  RichnessConfig richness = load_richness_config(data_path("golden_richness.json"));
  EvaluationContext context{default_registry(), default_lexicon(), &richness, judge};
};

EvaluationReport golden_report(unsigned threads) {
  Fixture f;
  f.context.threads = threads;
  auto ingested = ingest(data_path("golden_pairs.jsonl"), f.context.registry);
  attach_embeddings(ingested.records, load_embeddings(data_path("golden_embeddings.jsonl")));
  attach_binding_energies(ingested.records, data_path("golden_energies.jsonl"));
  return evaluate(ingested.records, f.context);
}

TEST(Ingest, EmptyInput) {
  std::istringstream in("");
  auto r = ingest_stream(in, default_registry());
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.rejects.empty());
}

TEST(Ingest, MalformedLineIsRejectedWithLineNumber) {
  std::istringstream in(minimal_record("a").dump() + "\n{\"id\": \"b\", \n");
  auto r = ingest_stream(in, default_registry());
  ASSERT_EQ(r.records.size(), 1u);
  ASSERT_EQ(r.rejects.size(), 1u);
  EXPECT_EQ(r.rejects[0].line, 2);
  EXPECT_EQ(r.records[0].id, "a");
}

TEST(Ingest, SchemaViolations) {
  const auto& reg = default_registry();
  auto bad = [&](json j) { EXPECT_THROW(record_from_json(j, reg), std::invalid_argument) << j.dump(); };
  auto j = minimal_record("x");
  j.erase("original_smiles");
  bad(j);
  j = minimal_record("x");
  j["optimized_smiles"] = "C1CC";
  bad(j);
  j = minimal_record("x");
  j["original_admet"]["Half-life"] = 3.0;
  bad(j);
  j = minimal_record("x");
  j["category"] = "antiviral";
  bad(j);
  j = minimal_record("x");
  j["split"] = "holdout";
  bad(j);
  j = minimal_record("x");
  j["original_admet"]["logP"] = "high";
  bad(j);

  j = minimal_record("x");
  j["id"] = 17;
  j["category"] = "antidiabetic";
  j["split"] = "dev";
  auto r = record_from_json(j, reg);
  EXPECT_EQ(r.id, "17");
  EXPECT_EQ(record_from_json(record_to_json(r), reg).category, r.category);
}

TEST(Ingest, GoldenRejectLines) {
  auto r = ingest(data_path("golden_pairs.jsonl"), default_registry());
  ASSERT_EQ(r.rejects.size(), 3u);
  EXPECT_EQ(r.rejects[0].line, 11);
  EXPECT_EQ(r.rejects[1].line, 21);
  EXPECT_EQ(r.rejects[2].line, 31);
  EXPECT_EQ(r.records.size(), 37u);
  EXPECT_THROW(ingest("/nonexistent/pairs.jsonl", default_registry()), ConfigError);
}

TEST(Sidecars, AttachKeepsExistingValues) {
  std::vector<PairRecord> records(2);
  records[0].id = "a";
  records[1].id = "b";
  records[1].reasoning_embedding = std::vector<double>{1.0, 0.0};
  std::vector<EmbeddingRecord> emb = {{"a", {0.0, 1.0}}, {"b", {0.5, 0.5}}, {"zz", {1.0, 1.0}}};
  EXPECT_EQ(attach_embeddings(records, emb), 1u);
  EXPECT_EQ(*records[0].reasoning_embedding, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(*records[1].reasoning_embedding, (std::vector<double>{1.0, 0.0}));
}

TEST(Gates, BindingBoundaryIsInclusive) {
  EXPECT_TRUE(binding_gate(-6.0));
  EXPECT_TRUE(binding_gate(std::nextafter(-6.0, -7.0)));
  EXPECT_FALSE(binding_gate(std::nextafter(-6.0, 0.0)));
  EXPECT_FALSE(binding_gate(-5.0));
  EXPECT_TRUE(binding_gate(-9.3));
}

TEST(Evaluate, IdentityPair) {
  Fixture f;
  auto j = minimal_record("same");
  j["optimized_admet"] = j["original_admet"];
  j["binding_energy_optimized"] = -5.0;
  auto p = evaluate_pair(record_from_json(j, f.context.registry), f.context);
  ASSERT_FALSE(p.error);
  EXPECT_EQ(p.evaluation.score, 0.0);
  EXPECT_EQ(p.similarity, 1.0);
  EXPECT_TRUE(p.similarity_pass);
  EXPECT_FALSE(*p.binding_pass);
  EXPECT_FALSE(p.f1);  // no rationale
  EXPECT_FALSE(p.richness);
}

TEST(Evaluate, NoSharedEndpointsIsPerPairFailure) {
  Fixture f;
  auto j = minimal_record("x");
  j["original_admet"] = {{"MW", 400.0}};
  j["optimized_admet"] = {{"TPSA", 90.0}};
  auto p = evaluate_pair(record_from_json(j, f.context.registry), f.context);
  ASSERT_TRUE(p.error);
  auto agg = aggregate({p});
  EXPECT_EQ(agg.pairs, 1);
  EXPECT_EQ(agg.scored, 0);
  EXPECT_EQ(agg.failed, 1);
}

TEST(Golden, ReportMatchesFrozenFile) {
  auto report = golden_report(1);
  EXPECT_TRUE(audit(report).empty());
  EXPECT_EQ(report_jsonl(report), slurp(data_path("golden_report.jsonl")));
}

TEST(Golden, SpotChecks) {
  auto report = golden_report(1);
  const auto& a = report.aggregates;
  EXPECT_EQ(a.pairs, 37);
  EXPECT_EQ(a.scored, 36);
  EXPECT_EQ(a.failed, 1);
  auto by_id = [&](const std::string& id) -> const PairReport& {
    for (const auto& p : report.pairs) {
      if (p.id == id) return p;
    }
    throw std::out_of_range(id);
  };
  EXPECT_EQ(by_id("g000").evaluation.score, 0.0);
  EXPECT_EQ(by_id("g000").similarity, 1.0);
  EXPECT_FALSE(*by_id("g001").binding_pass);
  EXPECT_TRUE(*by_id("g002").binding_pass);
  EXPECT_FALSE(by_id("g007").f1);
  EXPECT_EQ(*by_id("g009").lms, 0.0);
  for (const auto& p : report.pairs) {
    if (p.error) continue;
    EXPECT_GE(p.evaluation.score, 0.0);
    EXPECT_LE(p.evaluation.score, 1.0);
    EXPECT_EQ(p.similarity_pass, p.similarity > 0.6);
  }
}

TEST(Golden, ThreadCountDoesNotChangeOutput) {
  auto one = report_jsonl(golden_report(1));
  EXPECT_EQ(report_jsonl(golden_report(4)), one);
  EXPECT_EQ(report_jsonl(golden_report(1)), one);
}

TEST(Audit, DetectsTamperedAggregates) {
  auto report = golden_report(1);
  report.aggregates.mean_score += 1e-6;
  auto bad = audit(report);
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_EQ(bad[0], "mean_score");
  EXPECT_THROW(report_jsonl(report), std::logic_error);
}

TEST(Fingerprint, TracksConfiguration) {
  Fixture f;
  const auto base = config_fingerprint(f.context);
  EXPECT_EQ(base.size(), 16u);
  EXPECT_EQ(config_fingerprint(f.context), base);

  auto balance = f.context.balance;
  balance.pareto_boost = 1.4;
  EvaluationContext c2{f.context.registry, f.context.lexicon, f.context.richness, f.judge, balance};
  EXPECT_NE(config_fingerprint(c2), base);

  EvaluationContext c3{f.context.registry, f.context.lexicon, nullptr, f.judge};
  EXPECT_NE(config_fingerprint(c3), base);

  auto registry_json = registry_to_json(default_registry());
  registry_json["constants"]["new_liability_penalty"] = 0.4;
  auto registry = registry_from_json(registry_json);
  EvaluationContext c4{registry, f.context.lexicon, f.context.richness, f.judge};
  EXPECT_NE(config_fingerprint(c4), base);
}

TEST(Stats, DrugTableMatchesReferenceCounts) {
  auto table = molreward::testing::read_tsv("drugs.tsv");
  std::vector<PairRecord> records;
  double heavy = 0.0, rings = 0.0, rot = 0.0;
  for (const auto& row : table.rows) {
    PairRecord r;
    r.id = row[table.column("name")];
    r.original_smiles = r.optimized_smiles = row[table.column("smiles")];
    r.split = "train";
    records.push_back(r);
    heavy += std::stod(row[table.column("heavy")]);
    rings += std::stod(row[table.column("rings")]);
    rot += std::stod(row[table.column("rot")]);
  }
  const double n = static_cast<double>(records.size());
  auto s = dataset_stats(records);
  EXPECT_EQ(s.records, static_cast<int>(records.size()));
  EXPECT_EQ(s.molecules, s.records);
  EXPECT_NEAR(s.heavy_atoms.mean, heavy / n, 1e-12);
  EXPECT_NEAR(s.rings.mean, rings / n, 1e-12);
  EXPECT_NEAR(s.rotatable_bonds.mean, rot / n, 1e-12);
  EXPECT_FALSE(s.tpsa);
  EXPECT_EQ(s.unique_smiles, s.records);
  EXPECT_EQ(s.tanimoto_sample, s.records);
  EXPECT_GT(s.mean_tanimoto, 0.0);
  EXPECT_LT(s.mean_tanimoto, 0.6);
  EXPECT_NEAR(s.diversity, 1.0 - s.mean_tanimoto, 1e-12);
  EXPECT_EQ(s.splits.at("train"), s.records);
}

TEST(Stats, DuplicatesCollapseUnderCanonicalization) {
  auto table = molreward::testing::read_tsv("corpus.tsv");
  std::vector<PairRecord> records;
  for (std::size_t i = 0; i < 20; ++i) {
    for (const char* col : {"smiles", "alt_smiles"}) {
      PairRecord r;
      r.id = std::to_string(records.size());
      r.original_smiles = r.optimized_smiles = table.rows[i][table.column(col)];
      records.push_back(r);
    }
  }
  auto s = dataset_stats(records);
  EXPECT_EQ(s.records, 40);
  EXPECT_EQ(s.unique_smiles, 20);
  EXPECT_DOUBLE_EQ(s.unique_ratio, 0.5);
  EXPECT_EQ(s.tanimoto_sample, 20);
  EXPECT_FALSE(stats_table(s).empty());
  EXPECT_EQ(stats_to_json(s)["unique_smiles"], 20);
}

}  // namespace
}  // namespace molreward
