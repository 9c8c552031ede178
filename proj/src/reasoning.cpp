#include "molreward/reasoning.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "molreward/error.hpp"
#include "molreward/stats.hpp"

namespace molreward {

using nlohmann::json;

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

EndpointLexicon::EndpointLexicon(std::map<std::string, std::vector<std::string>, std::less<>> aliases) {
  if (aliases.empty()) throw ConfigError("lexicon is empty");
  std::map<std::string, std::string, std::less<>> owner;
  for (auto& [endpoint, list] : aliases) {
    if (list.empty()) throw ConfigError("lexicon: endpoint '" + endpoint + "' has no alias");
    std::vector<std::string> normalized;
    for (const auto& a : list) {
      std::string n = normalize_text(a);
      if (n.empty()) throw ConfigError("lexicon: empty alias for '" + endpoint + "'");
      auto [it, inserted] = owner.emplace(n, endpoint);
      if (!inserted && it->second != endpoint) {
        throw ConfigError("lexicon: alias '" + n + "' maps to both '" + it->second + "' and '" + endpoint + "'");
      }
      if (inserted) normalized.push_back(std::move(n));
    }
    aliases_.emplace(endpoint, std::move(normalized));
  }
  for (const auto& [alias, endpoint] : owner) by_length_.emplace_back(alias, endpoint);
  std::stable_sort(by_length_.begin(), by_length_.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
}

void EndpointLexicon::check_covers(const CriteriaRegistry& registry) const {
  for (const auto& c : registry.criteria()) {
    if (!aliases_.count(c.endpoint)) throw ConfigError("lexicon: no alias for endpoint '" + c.endpoint + "'");
  }
  for (const auto& [endpoint, list] : aliases_) {
    if (!registry.find(endpoint)) throw ConfigError("lexicon: unknown endpoint '" + endpoint + "'");
  }
}

EndpointSet EndpointLexicon::extract(std::string_view text) const {
  const std::string t = normalize_text(text);
  EndpointSet found;
  std::size_t i = 0;
  while (i < t.size()) {
    if (i > 0 && is_word_char(t[i - 1]) && is_word_char(t[i])) {
      ++i;
      continue;
    }
    std::size_t matched = 0;
    for (const auto& [alias, endpoint] : by_length_) {
      if (t.compare(i, alias.size(), alias) != 0) continue;
      const std::size_t end = i + alias.size();
      if (end < t.size() && is_word_char(t[end]) && is_word_char(alias.back())) continue;
      found.insert(endpoint);
      matched = alias.size();
      break;
    }
    i += matched ? matched : 1;
  }
  return found;
}

const EndpointLexicon& default_lexicon() {
  static const EndpointLexicon lexicon({
      {"logP", {"logP", "cLogP", "lipophilicity", "partition coefficient"}},
      {"TPSA", {"TPSA", "polar surface area", "topological polar surface area", "PSA"}},
      {"MW", {"MW", "molecular weight", "molecular mass"}},
      {"Caco-2 permeability", {"Caco-2 permeability", "Caco-2", "Caco2", "intestinal permeability"}},
      {"F50%", {"F50%", "F50", "oral bioavailability", "bioavailability"}},
      {"CYP3A4 inhibitor", {"CYP3A4", "CYP3A4 inhibitor", "CYP3A4 inhibition"}},
      {"CYP2D6 inhibitor", {"CYP2D6", "CYP2D6 inhibitor", "CYP2D6 inhibition"}},
      {"P-gp substrate", {"P-gp", "Pgp", "P-glycoprotein", "P-gp substrate", "P-gp efflux", "efflux"}},
      {"hERG blockers",
       {"hERG", "hERG blocker", "hERG blockade", "hERG inhibition", "cardiotoxicity", "QT prolongation"}},
      {"DILI", {"DILI", "drug-induced liver injury", "drug induced liver injury", "hepatotoxicity risk", "liver injury"}},
      {"Human hepatotoxicity", {"hepatotoxicity", "human hepatotoxicity", "hepatotoxic", "liver toxicity"}},
      {"AMES toxicity", {"AMES", "AMES toxicity", "Ames mutagenicity", "mutagenicity", "mutagenic"}},
      {"Genotoxicity", {"genotoxicity", "genotoxic"}},
      {"Drug-induced neurotoxicity", {"neurotoxicity", "drug-induced neurotoxicity", "neurotoxic"}},
      {"QED", {"QED", "drug-likeness", "druglikeness"}},
      {"SA score", {"SA score", "SAscore", "synthetic accessibility", "synthesizability"}},
      {"GASA", {"GASA", "graph-based synthetic accessibility"}},
      {"Lipinski rule", {"Lipinski", "Lipinski rule", "rule of five", "rule-of-five", "Ro5"}},
      {"HLM stability", {"HLM stability", "HLM", "microsomal stability", "metabolic stability"}},
      {"logS", {"logS", "solubility", "aqueous solubility"}},
      {"logD7.4", {"logD7.4", "logD", "logD 7.4", "distribution coefficient"}},
      {"Flexibility", {"flexibility", "rotatable bonds", "conformational flexibility"}},
      {"Fsp3", {"Fsp3", "fraction sp3", "sp3 fraction", "fraction of sp3 carbons"}},
  });
  return lexicon;
}

EndpointLexicon lexicon_from_json(const json& config) {
  try {
    std::map<std::string, std::vector<std::string>, std::less<>> aliases;
    for (const auto& [endpoint, list] : config.at("aliases").items()) {
      aliases[endpoint] = list.get<std::vector<std::string>>();
    }
    return EndpointLexicon(std::move(aliases));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("lexicon: ") + e.what());
  }
}

json lexicon_to_json(const EndpointLexicon& lexicon) {
  json aliases = json::object();
  for (const auto& [endpoint, list] : lexicon.aliases()) aliases[endpoint] = list;
  return json{{"aliases", aliases}};
}

namespace {

json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + " '" + path + "': " + e.what());
  }
}

}  // namespace

EndpointLexicon load_lexicon(const std::string& path) { return lexicon_from_json(read_json_file(path, "lexicon")); }

double target_property_f1(const EndpointSet& mentioned, const EndpointSet& true_liabilities) {
  if (mentioned.empty() && true_liabilities.empty()) return 1.0;
  if (mentioned.empty() || true_liabilities.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& m : mentioned) common += true_liabilities.count(m);
  if (common == 0) return 0.0;
  const double p = static_cast<double>(common) / static_cast<double>(mentioned.size());
  const double r = static_cast<double>(common) / static_cast<double>(true_liabilities.size());
  return 2.0 * p * r / (p + r);
}

std::string_view to_string(CriticalFailure flag) {
  switch (flag) {
    case CriticalFailure::kEditRationaleContradiction: return "edit-rationale-contradiction";
    case CriticalFailure::kChemicalMisconception: return "chemical-misconception";
  }
  return "?";
}

CriticalFailure critical_failure_from(std::string_view name) {
  if (name == "edit-rationale-contradiction") return CriticalFailure::kEditRationaleContradiction;
  if (name == "chemical-misconception") return CriticalFailure::kChemicalMisconception;
  throw std::invalid_argument("unknown critical failure '" + std::string(name) + "'");
}

void validate_sub_scores(const JudgeSubScores& sub) {
  for (double v : {sub.problem_solution, sub.solution_edit, sub.chain_completeness, sub.causal_accuracy}) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw std::invalid_argument("judge sub-score outside [0, 1]");
  }
}

int whitespace_token_count(std::string_view text) {
  int n = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

double lms_aggregate(const JudgeSubScores& sub, std::string_view reasoning) {
  validate_sub_scores(sub);
  if (whitespace_token_count(reasoning) < kMinReasoningTokens) return 0.0;
  const double base = (sub.problem_solution + sub.solution_edit + sub.chain_completeness + sub.causal_accuracy) / 4.0;
  const double score = base - kCriticalFailurePenalty * static_cast<double>(sub.flags.size());
  return std::clamp(score, 0.0, 1.0);
}

// ---- richness ---------------------------------------------------------------

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

}  // namespace

std::vector<double> unit_normalized(std::vector<double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("embedding has a non-finite component");
  }
  const double n = norm(v);
  if (!(n > 0.0)) throw std::invalid_argument("embedding has zero norm");
  for (double& x : v) x /= n;
  return v;
}

double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("embedding dimension mismatch");
  return std::clamp(1.0 - dot(a, b), 0.0, 2.0);
}

void validate_richness_config(const RichnessConfig& config) {
  if (config.prototypes.empty()) throw std::invalid_argument("richness config has no prototypes");
  const std::size_t d = config.dimension();
  if (d == 0) throw std::invalid_argument("richness prototypes have zero dimension");
  for (const auto& p : config.prototypes) {
    if (p.size() != d) throw std::invalid_argument("richness prototypes differ in dimension");
    if (std::abs(norm(p) - 1.0) > 1e-6) throw std::invalid_argument("richness prototype is not unit norm");
  }
  if (!(config.bandwidth > 0.0) || !std::isfinite(config.bandwidth)) {
    throw std::invalid_argument("richness bandwidth must be > 0");
  }
  if (!(config.peak_distance > 0.0 && config.peak_distance < 2.0)) {
    throw std::invalid_argument("richness peak distance must lie in (0, 2)");
  }
}

double richness_from_distance(double d, const RichnessConfig& config) {
  const double z = (d - config.peak_distance) / config.bandwidth;
  return std::exp(-0.5 * z * z);
}

double min_prototype_distance(const std::vector<double>& embedding, const RichnessConfig& config) {
  if (config.prototypes.empty()) throw std::invalid_argument("richness config has no prototypes");
  double best = 2.0;
  for (const auto& p : config.prototypes) best = std::min(best, cosine_distance(embedding, p));
  return best;
}

double richness_score(const std::vector<double>& embedding, const RichnessConfig& config) {
  if (config.prototypes.empty()) throw std::invalid_argument("richness config has no prototypes");
  if (embedding.size() != config.dimension()) throw std::invalid_argument("embedding dimension mismatch");
  return richness_from_distance(min_prototype_distance(unit_normalized(embedding), config), config);
}

namespace {

int nearest(const std::vector<double>& e, const std::vector<std::vector<double>>& centers) {
  int best = 0;
  double best_d = 3.0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = cosine_distance(e, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<std::vector<double>> kmeans_pp_seed(const std::vector<std::vector<double>>& x, int k,
                                                std::mt19937_64& rng) {
  std::vector<std::vector<double>> centers;
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  centers.push_back(x[pick(rng)]);
  std::vector<double> weight(x.size());
  while (static_cast<int>(centers.size()) < k) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      double d = 2.0;
      for (const auto& c : centers) d = std::min(d, cosine_distance(x[i], c));
      weight[i] = d * d;
    }
    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    std::size_t chosen = 0;
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (chosen = 0; chosen + 1 < x.size(); ++chosen) {
        if (weight[chosen] > 0.0 && r < weight[chosen]) break;
        r -= weight[chosen];
      }
      // guard against landing on an already chosen point through rounding
      while (weight[chosen] == 0.0) chosen = (chosen + 1) % x.size();
    }
    centers.push_back(x[chosen]);
  }
  return centers;
}

}  // namespace

std::vector<double> leave_one_out_distances(const std::vector<std::vector<double>>& x,
                                            const std::vector<int>& assignment, int k) {
  if (x.empty()) return {};
  const std::size_t dim = x.front().size();
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignment[i]);
    for (std::size_t j = 0; j < dim; ++j) sums[c][j] += x[i][j];
    ++sizes[c];
  }
  std::vector<std::vector<double>> centers(static_cast<std::size_t>(k));
  std::vector<bool> has_center(static_cast<std::size_t>(k), false);
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (sizes[c] == 0 || norm(sums[c]) == 0.0) continue;
    centers[c] = unit_normalized(sums[c]);
    has_center[c] = true;
  }
  std::vector<double> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto own = static_cast<std::size_t>(assignment[i]);
    double best = 2.0;
    bool any = false;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (c == own) {
        if (sizes[c] < 2) continue;
        std::vector<double> rest(dim);
        for (std::size_t j = 0; j < dim; ++j) rest[j] = sums[c][j] - x[i][j];
        if (!(norm(rest) > 1e-12)) continue;
        best = std::min(best, cosine_distance(x[i], unit_normalized(std::move(rest))));
        any = true;
      } else if (has_center[c]) {
        best = std::min(best, cosine_distance(x[i], centers[c]));
        any = true;
      }
    }
    out.push_back(any ? best : 0.0);
  }
  return out;
}

RichnessConfig fit_richness_config(const std::vector<std::vector<double>>& embeddings, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (embeddings.size() < static_cast<std::size_t>(k)) throw std::invalid_argument("fewer embeddings than k");
  std::vector<std::vector<double>> x;
  x.reserve(embeddings.size());
  for (const auto& e : embeddings) {
    if (!x.empty() && e.size() != x.front().size()) throw std::invalid_argument("embedding dimension mismatch");
    x.push_back(unit_normalized(e));
  }
  std::vector<std::vector<double>> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (static_cast<std::size_t>(k) > distinct.size()) {
    throw std::invalid_argument("k exceeds the number of distinct embeddings");
  }

  std::mt19937_64 rng(seed);
  auto centers = kmeans_pp_seed(x, k, rng);
  const std::size_t dim = x.front().size();
  std::vector<int> assignment(x.size(), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int c = nearest(x[i], centers);
      changed = changed || c != assignment[i];
      assignment[i] = c;
    }
    if (!changed) break;
    std::vector<std::vector<double>> sums(centers.size(), std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < dim; ++j) sums[static_cast<std::size_t>(assignment[i])][j] += x[i][j];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (norm(sums[c]) > 1e-12) centers[c] = unit_normalized(std::move(sums[c]));
    }
  }

  auto loo = leave_one_out_distances(x, assignment, k);
  std::sort(loo.begin(), loo.end());
  RichnessConfig config;
  config.prototypes = std::move(centers);
  config.peak_distance = std::clamp(kPeakScale * quantile_sorted(loo, 0.5), kMinPeakDistance, 1.99);
  config.bandwidth = std::max(quantile_sorted(loo, 0.75) - quantile_sorted(loo, 0.25), kMinRichnessBandwidth);
  return config;
}

json richness_to_json(const RichnessConfig& config) {
  return json{{"peak_distance", config.peak_distance},
              {"bandwidth", config.bandwidth},
              {"prototypes", config.prototypes}};
}

RichnessConfig richness_from_json(const json& config) {
  RichnessConfig out;
  try {
    out.peak_distance = config.at("peak_distance").get<double>();
    out.bandwidth = config.at("bandwidth").get<double>();
    out.prototypes = config.at("prototypes").get<std::vector<std::vector<double>>>();
    validate_richness_config(out);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("richness config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("richness config: ") + e.what());
  }
  return out;
}

RichnessConfig load_richness_config(const std::string& path) {
  return richness_from_json(read_json_file(path, "richness config"));
}

void save_richness_config(const RichnessConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << richness_to_json(config).dump(2) << '\n';
}

std::vector<EmbeddingRecord> load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embeddings '" + path + "'");
  std::vector<EmbeddingRecord> out;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      EmbeddingRecord r{j.at("id").get<std::string>(), j.at("vector").get<std::vector<double>>()};
      if (r.vector.empty()) throw ConfigError("empty vector");
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace molreward
