#include "molreward/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "molreward/error.hpp"
#include "molreward/fingerprint.hpp"
#include "molreward/hash.hpp"
#include "molreward/smiles.hpp"

namespace molreward {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kCategories = {"anti-inflammatory", "antihypertensive", "antidiabetic",
                                                        "other"};
const std::set<std::string, std::less<>> kSplits = {"train", "dev", "test"};

std::string id_of(const json& j) {
  const auto& id = j.at("id");
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return id.dump();
  throw std::invalid_argument("id must be a string or integer");
}

AdmetProfile profile_from(const json& j, const char* key) {
  const auto& p = j.at(key);
  if (!p.is_object()) throw std::invalid_argument(std::string(key) + " must be an object");
  AdmetProfile out;
  for (const auto& [endpoint, value] : p.items()) {
    if (!value.is_number()) throw std::invalid_argument(std::string(key) + "." + endpoint + " is not a number");
    out[endpoint] = value.get<double>();
  }
  return out;
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

PairRecord record_from_json(const json& j, const CriteriaRegistry& registry) {
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  PairRecord r;
  try {
    r.id = id_of(j);
    r.original_smiles = j.at("original_smiles").get<std::string>();
    r.optimized_smiles = j.at("optimized_smiles").get<std::string>();
    r.original_admet = profile_from(j, "original_admet");
    r.optimized_admet = profile_from(j, "optimized_admet");
    r.reasoning = optional_field<std::string>(j, "reasoning");
    r.reasoning_embedding = optional_field<std::vector<double>>(j, "reasoning_embedding");
    r.binding_energy_original = optional_field<double>(j, "binding_energy_original");
    r.binding_energy_optimized = optional_field<double>(j, "binding_energy_optimized");
    r.category = optional_field<std::string>(j, "category");
    r.split = optional_field<std::string>(j, "split");
  } catch (const json::exception& e) {
    throw std::invalid_argument(e.what());
  }
  if (r.category && !kCategories.count(*r.category)) throw std::invalid_argument("unknown category '" + *r.category + "'");
  if (r.split && !kSplits.count(*r.split)) throw std::invalid_argument("unknown split '" + *r.split + "'");
  for (const auto* e : {&r.binding_energy_original, &r.binding_energy_optimized}) {
    if (*e && !std::isfinite(**e)) throw std::invalid_argument("binding energy is not finite");
  }
  for (const auto& [label, smiles] : {std::pair{"original_smiles", &r.original_smiles},
                                      std::pair{"optimized_smiles", &r.optimized_smiles}}) {
    const auto parsed = parse_smiles(*smiles);
    if (!parsed) {
      throw std::invalid_argument(std::string(label) + ": " + std::string(to_string(parsed.error->kind)) +
                                  " at offset " + std::to_string(parsed.error->offset));
    }
  }
  validate_profile(r.original_admet, registry);
  validate_profile(r.optimized_admet, registry);
  return r;
}

json record_to_json(const PairRecord& r) {
  json j{{"id", r.id},
         {"original_smiles", r.original_smiles},
         {"optimized_smiles", r.optimized_smiles},
         {"original_admet", r.original_admet},
         {"optimized_admet", r.optimized_admet}};
  if (r.reasoning) j["reasoning"] = *r.reasoning;
  if (r.reasoning_embedding) j["reasoning_embedding"] = *r.reasoning_embedding;
  if (r.binding_energy_original) j["binding_energy_original"] = *r.binding_energy_original;
  if (r.binding_energy_optimized) j["binding_energy_optimized"] = *r.binding_energy_optimized;
  if (r.category) j["category"] = *r.category;
  if (r.split) j["split"] = *r.split;
  return j;
}

IngestResult ingest_stream(std::istream& in, const CriteriaRegistry& registry) {
  IngestResult out;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.records.push_back(record_from_json(json::parse(line), registry));
    } catch (const json::exception& e) {
      out.rejects.push_back({line_no, std::string("malformed JSON: ") + e.what()});
    } catch (const std::exception& e) {
      out.rejects.push_back({line_no, e.what()});
    }
  }
  return out;
}

IngestResult ingest(const std::string& path, const CriteriaRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open records '" + path + "'");
  return ingest_stream(in, registry);
}

std::size_t attach_embeddings(std::vector<PairRecord>& records, const std::vector<EmbeddingRecord>& embeddings) {
  std::map<std::string, const std::vector<double>*, std::less<>> by_id;
  for (const auto& e : embeddings) by_id.emplace(e.id, &e.vector);
  std::size_t n = 0;
  for (auto& r : records) {
    if (r.reasoning_embedding) continue;
    if (const auto it = by_id.find(r.id); it != by_id.end()) {
      r.reasoning_embedding = *it->second;
      ++n;
    }
  }
  return n;
}

std::size_t attach_binding_energies(std::vector<PairRecord>& records, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open binding energies '" + path + "'");
  std::map<std::string, std::pair<std::optional<double>, std::optional<double>>, std::less<>> by_id;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      by_id[id_of(j)] = {optional_field<double>(j, "binding_energy_original"),
                         optional_field<double>(j, "binding_energy_optimized")};
    } catch (const std::exception& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::size_t n = 0;
  for (auto& r : records) {
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) continue;
    bool touched = false;
    if (!r.binding_energy_original && it->second.first) {
      r.binding_energy_original = it->second.first;
      touched = true;
    }
    if (!r.binding_energy_optimized && it->second.second) {
      r.binding_energy_optimized = it->second.second;
      touched = true;
    }
    n += touched;
  }
  return n;
}

PairReport evaluate_pair(const PairRecord& record, const EvaluationContext& ctx) {
  PairReport p;
  p.id = record.id;
  p.category = record.category;
  p.split = record.split;
  try {
    const auto original = parse_smiles_or_throw(record.original_smiles);
    const auto optimized = parse_smiles_or_throw(record.optimized_smiles);
    p.original_canonical = canonical_smiles(original);
    p.optimized_canonical = canonical_smiles(optimized);
    p.similarity = tanimoto(ecfp(original), ecfp(optimized));
    p.similarity_pass = similarity_gate(p.similarity);
    p.evaluation = overall_score(record.original_admet, record.optimized_admet, ctx.registry);
    if (record.reasoning) {
      p.mentioned = ctx.lexicon.extract(*record.reasoning);
      p.f1 = target_property_f1(p.mentioned, p.evaluation.original_liabilities);
      JudgeRequest request{record.original_smiles, record.optimized_smiles, *record.reasoning, {}};
      for (const auto& [endpoint, contribution] : p.evaluation.contributions) {
        request.changes.push_back(
            {endpoint, record.original_admet.find(endpoint)->second, record.optimized_admet.find(endpoint)->second});
      }
      p.judge = ctx.judge.evaluate(request);
      p.lms = lms_aggregate(*p.judge, *record.reasoning);
    }
    if (record.reasoning_embedding && ctx.richness) p.richness = richness_score(*record.reasoning_embedding, *ctx.richness);
    if (record.binding_energy_optimized) {
      p.binding_energy = record.binding_energy_optimized;
      p.binding_pass = binding_gate(*record.binding_energy_optimized);
    }
  } catch (const std::exception& e) {
    p.error = e.what();
  }
  return p;
}

EvaluationReport evaluate(const std::vector<PairRecord>& records, const EvaluationContext& ctx) {
  EvaluationReport report;
  report.config_fingerprint = config_fingerprint(ctx);
  report.judge = ctx.judge.name();
  if (ctx.richness) {
    report.richness_peak = ctx.richness->peak_distance;
    report.richness_bandwidth = ctx.richness->bandwidth;
  }
  report.pairs.resize(records.size());
  const unsigned threads = std::max(1u, std::min<unsigned>(ctx.threads, static_cast<unsigned>(records.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) report.pairs[i] = evaluate_pair(records[i], ctx);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < records.size(); i += threads) report.pairs[i] = evaluate_pair(records[i], ctx);
      });
    }
    for (auto& th : pool) th.join();
  }
  report.aggregates = aggregate(report.pairs);
  return report;
}

Aggregates aggregate(const std::vector<PairReport>& pairs) {
  Aggregates a;
  a.pairs = static_cast<int>(pairs.size());
  double score = 0.0, sim = 0.0, f1 = 0.0, lms = 0.0, rich = 0.0, energy = 0.0;
  int sim_pass = 0, n_f1 = 0, n_lms = 0, n_rich = 0, n_bind = 0, bind_pass = 0;
  for (const auto& p : pairs) {
    if (p.error) {
      ++a.failed;
      continue;
    }
    ++a.scored;
    score += p.evaluation.score;
    sim += p.similarity;
    sim_pass += p.similarity_pass;
    if (p.f1) f1 += *p.f1, ++n_f1;
    if (p.lms) lms += *p.lms, ++n_lms;
    if (p.richness) rich += *p.richness, ++n_rich;
    if (p.binding_pass) {
      ++n_bind;
      bind_pass += *p.binding_pass;
      energy += *p.binding_energy;
    }
  }
  if (a.scored > 0) {
    a.mean_score = score / a.scored;
    a.mean_similarity = sim / a.scored;
    a.similarity_pass_ratio = static_cast<double>(sim_pass) / a.scored;
  }
  if (n_f1) a.mean_f1 = f1 / n_f1;
  if (n_lms) a.mean_lms = lms / n_lms;
  if (n_rich) a.mean_richness = rich / n_rich;
  if (n_bind) {
    a.binding_pass_ratio = static_cast<double>(bind_pass) / n_bind;
    a.mean_binding_energy = energy / n_bind;
  }
  return a;
}

std::vector<std::string> audit(const EvaluationReport& report) {
  // Independent pass: column vectors, then means.
  std::vector<std::string> bad;
  std::vector<double> score, sim, f1, lms, rich, energy, sim_pass, bind_pass;
  int failed = 0;
  for (const auto& p : report.pairs) {
    if (p.error) {
      ++failed;
      continue;
    }
    score.push_back(p.evaluation.score);
    sim.push_back(p.similarity);
    sim_pass.push_back(p.similarity_pass ? 1.0 : 0.0);
    if (p.f1) f1.push_back(*p.f1);
    if (p.lms) lms.push_back(*p.lms);
    if (p.richness) rich.push_back(*p.richness);
    if (p.binding_pass) {
      bind_pass.push_back(*p.binding_pass ? 1.0 : 0.0);
      energy.push_back(*p.binding_energy);
    }
  }
  const auto& a = report.aggregates;
  auto col_mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  auto check = [&](const char* name, const std::vector<double>& col, std::optional<double> value) {
    if (col.empty() != !value.has_value()) {
      bad.emplace_back(name);
    } else if (value && std::abs(col_mean(col) - *value) > 1e-12) {
      bad.emplace_back(name);
    }
  };
  if (a.pairs != static_cast<int>(report.pairs.size())) bad.emplace_back("pairs");
  if (a.failed != failed || a.scored != static_cast<int>(score.size())) bad.emplace_back("scored");
  check("mean_score", score, score.empty() ? std::nullopt : std::optional(a.mean_score));
  check("mean_similarity", sim, sim.empty() ? std::nullopt : std::optional(a.mean_similarity));
  check("similarity_pass_ratio", sim_pass, sim_pass.empty() ? std::nullopt : std::optional(a.similarity_pass_ratio));
  check("mean_f1", f1, a.mean_f1);
  check("mean_lms", lms, a.mean_lms);
  check("mean_richness", rich, a.mean_richness);
  check("binding_pass_ratio", bind_pass, a.binding_pass_ratio);
  check("mean_binding_energy", energy, a.mean_binding_energy);
  return bad;
}

std::string config_fingerprint(const EvaluationContext& ctx) {
  std::string blob = registry_to_json(ctx.registry).dump();
  blob += '\n' + lexicon_to_json(ctx.lexicon).dump();
  blob += '\n' + balance_to_json(ctx.balance).dump();
  blob += '\n' + (ctx.richness ? richness_to_json(*ctx.richness).dump() : std::string("null"));
  blob += '\n' + ctx.judge.name();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_string(blob)));
  return buf;
}

json pair_report_to_json(const PairReport& p) {
  json j{{"type", "pair"}, {"id", p.id}};
  if (p.error) {
    j["error"] = *p.error;
    return j;
  }
  json contributions = json::object();
  for (const auto& [endpoint, c] : p.evaluation.contributions) contributions[endpoint] = c.value;
  json judge = nullptr;
  if (p.judge) {
    json flags = json::array();
    for (auto f : p.judge->flags) flags.push_back(std::string(to_string(f)));
    judge = {{"problem_solution", p.judge->problem_solution},
             {"solution_edit", p.judge->solution_edit},
             {"chain_completeness", p.judge->chain_completeness},
             {"causal_accuracy", p.judge->causal_accuracy},
             {"critical_failures", flags}};
  }
  j["original_canonical"] = p.original_canonical;
  j["optimized_canonical"] = p.optimized_canonical;
  j["score"] = p.evaluation.score;
  j["raw"] = p.evaluation.raw;
  j["denominator"] = p.evaluation.denominator;
  j["original_liabilities"] = p.evaluation.original_liabilities;
  j["optimized_liabilities"] = p.evaluation.optimized_liabilities;
  j["new_liabilities"] = p.evaluation.new_liabilities;
  j["dropped_endpoints"] = p.evaluation.dropped_endpoints;
  j["contributions"] = contributions;
  j["similarity"] = p.similarity;
  j["similarity_pass"] = p.similarity_pass;
  j["mentioned"] = p.mentioned;
  j["f1"] = optional_json(p.f1);
  j["judge"] = judge;
  j["lms"] = optional_json(p.lms);
  j["richness"] = optional_json(p.richness);
  j["binding_energy"] = optional_json(p.binding_energy);
  j["binding_pass"] = p.binding_pass ? json(*p.binding_pass) : json(nullptr);
  j["category"] = p.category ? json(*p.category) : json(nullptr);
  j["split"] = p.split ? json(*p.split) : json(nullptr);
  return j;
}

json aggregates_to_json(const Aggregates& a) {
  return json{{"type", "aggregate"},
              {"pairs", a.pairs},
              {"scored", a.scored},
              {"failed", a.failed},
              {"mean_score", a.mean_score},
              {"mean_f1", optional_json(a.mean_f1)},
              {"mean_similarity", a.mean_similarity},
              {"similarity_pass_ratio", a.similarity_pass_ratio},
              {"mean_lms", optional_json(a.mean_lms)},
              {"mean_richness", optional_json(a.mean_richness)},
              {"binding_pass_ratio", optional_json(a.binding_pass_ratio)},
              {"mean_binding_energy", optional_json(a.mean_binding_energy)}};
}

namespace {

json header_json(const EvaluationReport& r) {
  json richness = nullptr;
  if (r.richness_peak) richness = {{"peak_distance", *r.richness_peak}, {"bandwidth", *r.richness_bandwidth}};
  return json{
      {"type", "header"},
      {"version", MOLREWARD_VERSION},
      {"config_fingerprint", r.config_fingerprint},
      {"judge", r.judge},
      {"richness", richness},
      {"formulas",
       {{"score", "clamp(sum_f a_f * (clip(delta_f, -M, M) + bonus_f) - mu * new_liabilities, 0, D) / D"},
        {"denominator", "sum over original liabilities of (M + bonus_f); M / 2 without liabilities"},
        {"f1", "2PR / (P + R); 1 when both sets are empty, 0 when exactly one is"},
        {"lms", "clamp(mean(4 judge sub-scores) - 0.3 * flags, 0, 1); 0 below 10 tokens"},
        {"richness", "exp(-(d - d*)^2 / (2 sigma^2)), d = min cosine distance to prototypes"}}},
      {"gates", {{"similarity", "> 0.6"}, {"binding_energy", "<= -6.0 kcal/mol"}}}};
}

}  // namespace

std::string report_jsonl(const EvaluationReport& report) {
  if (const auto bad = audit(report); !bad.empty()) {
    std::string msg = "report self-audit failed:";
    for (const auto& b : bad) msg += " " + b;
    throw std::logic_error(msg);
  }
  std::string out = header_json(report).dump() + '\n';
  for (const auto& p : report.pairs) out += pair_report_to_json(p).dump() + '\n';
  out += aggregates_to_json(report.aggregates).dump() + '\n';
  return out;
}

namespace {

std::string cell(const std::optional<double>& v, const char* fmt = "%8.4f") {
  char buf[32];
  if (!v) return "       -";
  std::snprintf(buf, sizeof buf, fmt, *v);
  return buf;
}

}  // namespace

std::string report_table(const EvaluationReport& report) {
  std::ostringstream out;
  char buf[512];
  out << "config " << report.config_fingerprint << "  judge " << report.judge << '\n';
  std::snprintf(buf, sizeof buf, "%-16s %8s %8s %8s %4s %8s %8s %8s %4s\n", "id", "score", "f1", "sim", "gate", "lms",
                "richness", "dG", "bind");
  out << buf;
  for (const auto& p : report.pairs) {
    if (p.error) {
      std::snprintf(buf, sizeof buf, "%-16.16s error: %s\n", p.id.c_str(), p.error->c_str());
      out << buf;
      continue;
    }
    std::snprintf(buf, sizeof buf, "%-16.16s %8.4f %s %8.4f %4s %s %s %s %4s\n", p.id.c_str(), p.evaluation.score,
                  cell(p.f1).c_str(), p.similarity, p.similarity_pass ? "pass" : "fail", cell(p.lms).c_str(),
                  cell(p.richness).c_str(), cell(p.binding_energy, "%8.2f").c_str(),
                  p.binding_pass ? (*p.binding_pass ? "pass" : "fail") : "-");
    out << buf;
  }
  const auto& a = report.aggregates;
  std::snprintf(buf, sizeof buf, "%-16s %8.4f %s %8.4f %4.0f%% %s %s %s %s\n", "mean", a.mean_score,
                cell(a.mean_f1).c_str(), a.mean_similarity, 100.0 * a.similarity_pass_ratio, cell(a.mean_lms).c_str(),
                cell(a.mean_richness).c_str(), cell(a.mean_binding_energy, "%8.2f").c_str(),
                a.binding_pass_ratio ? (std::to_string(static_cast<int>(std::lround(100.0 * *a.binding_pass_ratio))) + "%").c_str()
                                     : "-");
  out << buf;
  std::snprintf(buf, sizeof buf, "%d pairs, %d scored, %d failed\n", a.pairs, a.scored, a.failed);
  out << buf;
  return out.str();
}

namespace {

void add_sample(SummaryStat& s, double v) {
  if (s.count == 0) {
    s.min = s.max = v;
  } else {
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean += (v - s.mean) / (s.count + 1);
  ++s.count;
}

json summary_json(const SummaryStat& s) { return json{{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"count", s.count}}; }

}  // namespace

DatasetStats dataset_stats(const std::vector<PairRecord>& records, std::uint64_t seed) {
  DatasetStats st;
  st.records = static_cast<int>(records.size());
  std::map<std::string, MolecularGraph> unique;
  SummaryStat tpsa, logp;
  for (const auto& r : records) {
    if (r.split) ++st.splits[*r.split];
    if (r.category) ++st.categories[*r.category];
    auto parsed = parse_smiles(r.original_smiles);
    if (!parsed) continue;
    ++st.molecules;
    const auto& g = *parsed.graph;
    add_sample(st.heavy_atoms, heavy_atom_count(g));
    add_sample(st.rings, ring_count(g));
    add_sample(st.rotatable_bonds, rotatable_bond_count(g));
    if (const auto it = r.original_admet.find("TPSA"); it != r.original_admet.end()) add_sample(tpsa, it->second);
    if (const auto it = r.original_admet.find("logP"); it != r.original_admet.end()) add_sample(logp, it->second);
    unique.emplace(canonical_smiles(g), std::move(*parsed.graph));
  }
  if (tpsa.count) st.tpsa = tpsa;
  if (logp.count) st.logp = logp;
  st.unique_smiles = static_cast<int>(unique.size());
  st.unique_ratio = st.molecules ? static_cast<double>(st.unique_smiles) / st.molecules : 0.0;

  std::vector<Fingerprint> fps;
  for (const auto& [smiles, g] : unique) fps.push_back(ecfp(g));
  std::mt19937_64 rng(seed);
  std::shuffle(fps.begin(), fps.end(), rng);
  if (fps.size() > static_cast<std::size_t>(kTanimotoSampleSize)) fps.erase(fps.begin() + kTanimotoSampleSize, fps.end());
  st.tanimoto_sample = static_cast<int>(fps.size());
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < fps.size(); ++i) {
    for (std::size_t j = i + 1; j < fps.size(); ++j) {
      sum += tanimoto(fps[i], fps[j]);
      ++pairs;
    }
  }
  st.mean_tanimoto = pairs ? sum / static_cast<double>(pairs) : 0.0;
  st.diversity = pairs ? 1.0 - st.mean_tanimoto : 0.0;
  return st;
}

json stats_to_json(const DatasetStats& s) {
  return json{{"records", s.records},
              {"molecules", s.molecules},
              {"heavy_atoms", summary_json(s.heavy_atoms)},
              {"rings", summary_json(s.rings)},
              {"rotatable_bonds", summary_json(s.rotatable_bonds)},
              {"tpsa", s.tpsa ? summary_json(*s.tpsa) : json(nullptr)},
              {"logp", s.logp ? summary_json(*s.logp) : json(nullptr)},
              {"unique_smiles", s.unique_smiles},
              {"unique_ratio", s.unique_ratio},
              {"tanimoto_sample", s.tanimoto_sample},
              {"mean_tanimoto", s.mean_tanimoto},
              {"diversity", s.diversity},
              {"splits", s.splits},
              {"categories", s.categories}};
}

std::string stats_table(const DatasetStats& s) {
  std::ostringstream out;
  char buf[256];
  auto row = [&](const char* name, const SummaryStat& st, const char* fmt) {
    char range[96];
    std::snprintf(range, sizeof range, fmt, st.min, st.max);
    std::snprintf(buf, sizeof buf, "%-16s %10.2f   %s\n", name, st.mean, range);
    out << buf;
  };
  std::snprintf(buf, sizeof buf, "%-16s %10s   %s\n", "metric", "mean/value", "range/definition");
  out << buf;
  row("Heavy atoms", s.heavy_atoms, "%.0f-%.0f");
  row("Rings", s.rings, "%.0f-%.0f");
  row("Rot. bonds", s.rotatable_bonds, "%.0f-%.0f");
  if (s.tpsa) row("TPSA", *s.tpsa, "%.2f-%.2f");
  if (s.logp) row("cLogP", *s.logp, "%.2f-%.2f");
  std::snprintf(buf, sizeof buf, "%-16s %4d / %-5d   %.2f%%\n", "Unique SMILES", s.unique_smiles, s.molecules,
                100.0 * s.unique_ratio);
  out << buf;
  std::snprintf(buf, sizeof buf, "%-16s %10.4f   %d sampled molecules\n", "Mean Tanimoto", s.mean_tanimoto,
                s.tanimoto_sample);
  out << buf;
  std::snprintf(buf, sizeof buf, "%-16s %10.4f   1 - mean similarity\n", "Diversity index", s.diversity);
  out << buf;
  for (const auto& [split, n] : s.splits) out << "split " << split << ": " << n << '\n';
  for (const auto& [cat, n] : s.categories) out << "category " << cat << ": " << n << '\n';
  out << "records: " << s.records << '\n';
  return out.str();
}

}  // namespace molreward
