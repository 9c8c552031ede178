// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
// Dataset checks run only when MOLREWARD_DATASET names a record JSONL file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "molreward/admet.hpp"
#include "molreward/fingerprint.hpp"
#include "molreward/harness.hpp"
#include "molreward/pareto.hpp"
#include "molreward/reasoning.hpp"
#include "molreward/simulator.hpp"
#include "molreward/smiles.hpp"
#include "profile_gen.hpp"
#include "test_data.hpp"

namespace {

using namespace molreward;
using molreward::testing::read_tsv;

struct Check {
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  bool skipped = false;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 8) failures.push_back(what);
    if (!ok) ++failed;
  }
  void note(const std::string& text) { notes.push_back(text); }
  int failed = 0;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<void(Check&)> run;
};

// ---------------------------------------------------------------------------
// registry

struct TableRow {
  const char* endpoint;
  CriterionKind kind;
  double a, b;  // range [a, b] or threshold a
};

// Transcribed independently of the built-in table.
const TableRow kTargets[] = {
    {"logP", CriterionKind::kRange, 1.0, 3.0},
    {"TPSA", CriterionKind::kRange, 20.0, 130.0},
    {"MW", CriterionKind::kRange, 150.0, 500.0},
    {"Caco-2 permeability", CriterionKind::kThreshold, -5.15, 0},
    {"F50%", CriterionKind::kThreshold, 0.50, 0},
    {"CYP3A4 inhibitor", CriterionKind::kThreshold, 0.50, 0},
    {"CYP2D6 inhibitor", CriterionKind::kThreshold, 0.50, 0},
    {"P-gp substrate", CriterionKind::kThreshold, 0.50, 0},
    {"hERG blockers", CriterionKind::kThreshold, 0.80, 0},
    {"DILI", CriterionKind::kThreshold, 0.80, 0},
    {"Human hepatotoxicity", CriterionKind::kThreshold, 0.80, 0},
    {"AMES toxicity", CriterionKind::kThreshold, 0.80, 0},
    {"Genotoxicity", CriterionKind::kThreshold, 0.80, 0},
    {"Drug-induced neurotoxicity", CriterionKind::kThreshold, 0.80, 0},
    {"QED", CriterionKind::kThreshold, 0.34, 0},
    {"SA score", CriterionKind::kThreshold, 0.50, 0},
    {"GASA", CriterionKind::kThreshold, 0.50, 0},
    {"Lipinski rule", CriterionKind::kThreshold, 0.50, 0},
    {"HLM stability", CriterionKind::kMonotonic, 0, 0},
    {"logS", CriterionKind::kMonotonic, 0, 0},
    {"logD7.4", CriterionKind::kMonotonic, 0, 0},
    {"Flexibility", CriterionKind::kMonotonic, 0, 0},
    {"Fsp3", CriterionKind::kMonotonic, 0, 0},
};

void registry_fidelity(Check& c) {
  const CriteriaRegistry shipped = load_registry(std::string(MOLREWARD_CONFIG_DIR) + "/registry.json");
  c.expect(default_registry() == shipped, "shipped config equals built-in");
  for (const CriteriaRegistry* reg : {&default_registry(), &shipped}) {
    const CriteriaRegistry& r = *reg;
    const std::string who = reg == &shipped ? "config/registry.json" : "built-in";
    c.expect(r.criteria().size() == 23, who + ": 23 endpoints");
    c.expect(r.count(CriterionKind::kRange) == 3, who + ": 3 range");
    c.expect(r.count(CriterionKind::kThreshold) == 15, who + ": 15 threshold");
    c.expect(r.count(CriterionKind::kMonotonic) == 5, who + ": 5 monotonic");
    const auto& k = r.constants();
    c.expect(k.threshold_bonus == 2.5 && k.range_bonus == 3.5, who + ": bonuses");
    c.expect(k.clip_bound == 2.0 && k.new_liability_penalty == 0.3, who + ": M and mu");
    c.expect(k.non_liability_weight == 0.5, who + ": non-liability weight");
    for (const auto& row : kTargets) {
      const auto* e = r.find(row.endpoint);
      c.expect(e != nullptr, who + ": has " + row.endpoint);
      if (!e) continue;
      c.expect(e->kind == row.kind, who + ": kind of " + row.endpoint);
      switch (row.kind) {
        case CriterionKind::kRange:
          c.expect(e->lo == row.a && e->hi == row.b && e->bonus == 3.5 && e->direction == Direction::kInRange,
                   who + ": range " + row.endpoint);
          break;
        case CriterionKind::kThreshold:
          c.expect(e->threshold == row.a && e->bonus == 2.5 && e->direction == Direction::kLowerBetter,
                   who + ": threshold " + row.endpoint);
          break;
        case CriterionKind::kMonotonic:
          c.expect(e->bonus == 0.0 && e->direction == Direction::kHigherBetter, who + ": monotonic " + row.endpoint);
          break;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// score anchors

AdmetProfile neutral_profile(const CriteriaRegistry& reg) {
  AdmetProfile p;
  for (const auto& e : reg.criteria()) {
    switch (e.kind) {
      case CriterionKind::kRange: p[e.endpoint] = 0.5 * (e.lo + e.hi); break;
      case CriterionKind::kThreshold:
        p[e.endpoint] = e.probability ? 0.5 * e.threshold : e.threshold - std::max(std::abs(e.threshold), 1.0);
        break;
      case CriterionKind::kMonotonic: p[e.endpoint] = 0.5; break;
    }
  }
  return p;
}

// (liability value, resolved value) whose continuous term reaches the clip
// bound, or nothing when the value domain does not allow it.
std::optional<std::pair<double, double>> maximal_resolution(const EndpointCriterion& e, double clip) {
  if (e.kind == CriterionKind::kRange) {
    const double w = e.hi - e.lo;
    return std::pair{e.hi + (clip + 1.0) * w, 0.5 * (e.lo + e.hi)};
  }
  if (e.kind != CriterionKind::kThreshold) return std::nullopt;
  const double scale = std::max(std::abs(e.threshold), 1e-6);
  double o, p;
  if (e.probability) {
    o = e.direction == Direction::kLowerBetter ? 1.0 : 0.0;
    p = 1.0 - o;
  } else {
    const double s = std::max(std::abs(e.threshold), 1.0);
    o = e.direction == Direction::kLowerBetter ? e.threshold + 2.0 * s : e.threshold - 2.0 * s;
    p = e.direction == Direction::kLowerBetter ? e.threshold - 2.0 * s : e.threshold + 2.0 * s;
  }
  if (std::abs(o - p) / scale < clip) return std::nullopt;
  return std::pair{o, p};
}

// Moves the optimized value of one endpoint toward its desirable side.
double improved(const EndpointCriterion& e, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double q = p;
  switch (e.kind) {
    case CriterionKind::kRange: q = p + u(rng) * (std::clamp(p, e.lo, e.hi) - p); break;
    case CriterionKind::kThreshold: {
      const double step = u(rng) * (std::abs(e.threshold) + 1.0);
      q = e.direction == Direction::kLowerBetter ? p - step : p + step;
      break;
    }
    case CriterionKind::kMonotonic: q = p + u(rng) * 3.0; break;
  }
  return e.probability ? std::clamp(q, 0.0, 1.0) : q;
}

void score_anchors(Check& c) {
  const auto& reg = default_registry();
  std::mt19937_64 rng(20251014);

  for (int i = 0; i < 1000; ++i) {
    const auto x = testing::random_profile(reg, rng, 0.8);
    const auto e = overall_score(x, x, reg);
    c.expect(e.score == 0.0 && e.new_liabilities == 0, "identity profile " + std::to_string(i) + " scores 0");
  }

  const double clip = reg.constants().clip_bound;
  const auto neutral = neutral_profile(reg);
  c.expect(liabilities(neutral, reg).empty(), "neutral profile is liability free");
  AdmetProfile all_o = neutral, all_p = neutral;
  int constructions = 0;
  for (const auto& e : reg.criteria()) {
    const auto pair = maximal_resolution(e, clip);
    if (!pair) continue;
    ++constructions;
    AdmetProfile o = neutral, p = neutral;
    o[e.endpoint] = all_o[e.endpoint] = pair->first;
    p[e.endpoint] = all_p[e.endpoint] = pair->second;
    const auto ev = overall_score(o, p, reg);
    c.expect(std::abs(ev.score - 1.0) <= 1e-9, "single liability " + e.endpoint + fmt(" scores %.12f", ev.score));
  }
  const auto all = overall_score(all_o, all_p, reg);
  c.expect(std::abs(all.score - 1.0) <= 1e-9, fmt("all constructible liabilities resolved scores %.12f", all.score));
  c.note(std::to_string(constructions) + " single-liability constructions");

  int monotone_trials = 0, penalty_trials = 0;
  std::vector<const EndpointCriterion*> crit;
  for (const auto& e : reg.criteria()) crit.push_back(&e);
  std::uniform_int_distribution<std::size_t> pick(0, crit.size() - 1);
  while (monotone_trials < 10000) {
    const auto o = testing::random_profile(reg, rng, 0.9);
    auto p = testing::random_profile(reg, rng, 0.9);
    const auto orig_liab = liabilities(o, reg);
    std::vector<const EndpointCriterion*> options;
    for (const auto* e : crit) {
      if (orig_liab.count(e->endpoint) && p.count(e->endpoint)) options.push_back(e);
    }
    if (options.empty()) continue;
    const auto* e = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    const double before = overall_score(o, p, reg).score;
    auto q = p;
    q[e->endpoint] = improved(*e, p[e->endpoint], rng);
    const double after = overall_score(o, q, reg).score;
    c.expect(after >= before, "improving " + e->endpoint + fmt(" moved score %.6f -> %.6f", before, after));
    ++monotone_trials;
  }
  while (penalty_trials < 10000) {
    const auto o = testing::random_profile(reg, rng, 0.9);
    const auto p = testing::random_profile(reg, rng, 0.9);
    const auto* e = crit[pick(rng)];
    if (e->kind == CriterionKind::kMonotonic || !o.count(e->endpoint) || !p.count(e->endpoint)) continue;
    if (is_liability(*e, o.at(e->endpoint)) || is_liability(*e, p.at(e->endpoint))) continue;
    double bad = testing::random_value(*e, rng);
    if (!is_liability(*e, bad)) continue;
    auto q = p;
    q[e->endpoint] = bad;
    const auto before = overall_score(o, p, reg);
    const auto after = overall_score(o, q, reg);
    c.expect(after.new_liabilities == before.new_liabilities + 1, "new liability counted for " + e->endpoint);
    c.expect(after.score <= before.score, "new liability on " + e->endpoint + " raised the score");
    ++penalty_trials;
  }
  c.note("10000 monotonicity + 10000 penalty trials");
}

// ---------------------------------------------------------------------------
// gates

void gates(Check& c) {
  c.expect(!similarity_gate(0.6), "similarity 0.6 fails");
  c.expect(similarity_gate(std::nextafter(0.6, 1.0)), "similarity just above 0.6 passes");
  c.expect(!similarity_gate(std::nextafter(0.6, 0.0)), "similarity just below 0.6 fails");
  c.expect(binding_gate(-6.0), "-6.0 kcal/mol passes");
  c.expect(binding_gate(std::nextafter(-6.0, -7.0)), "just below -6.0 passes");
  c.expect(!binding_gate(std::nextafter(-6.0, 0.0)), "just above -6.0 fails");
  c.expect(similarity_gate(0.6409), "0.6409 passes");
  c.expect(!similarity_gate(0.1297), "0.1297 fails");
  c.expect(kSimilarityGate == 0.6 && kBindingGate == -6.0, "gate constants");
}

// ---------------------------------------------------------------------------
// pareto

std::vector<std::size_t> brute_force_front(const std::vector<ObjectiveVector>& v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < v.size() && !dominated; ++j) {
      if (i == j) continue;
      bool ge = true, gt = false;
      for (std::size_t m = 0; m < kChannelCount; ++m) {
        ge = ge && v[j][m] >= v[i][m];
        gt = gt || v[j][m] > v[i][m];
      }
      dominated = ge && gt;
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

std::vector<ObjectiveVector> random_batch(std::mt19937_64& rng, std::size_t n, bool coarse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> binding(6.5, 1.0);
  std::vector<ObjectiveVector> v(n);
  for (auto& x : v) {
    for (std::size_t m = 0; m < kChannelCount; ++m) {
      x[m] = m == kBindingUtility ? binding(rng) : u(rng);
      if (coarse) x[m] = std::round(x[m] * 4.0) / 4.0;  // ties on purpose
    }
  }
  return v;
}

void pareto_engine(Check& c) {
  std::mt19937_64 rng(99);
  const BalanceConfig config;
  std::uniform_int_distribution<std::size_t> size(1, 200);
  double worst_mean = 0.0;
  for (int b = 0; b < 500; ++b) {
    const auto v = random_batch(rng, size(rng), b % 3 == 0);
    const auto front = pareto_set(v);
    c.expect(front == brute_force_front(v), "batch " + std::to_string(b) + " frontier matches brute force");
    const auto w = sample_weights(v, config);
    const double mean = std::accumulate(w.normalized.begin(), w.normalized.end(), 0.0) / v.size();
    worst_mean = std::max(worst_mean, std::abs(mean - 1.0));
    c.expect(std::abs(mean - 1.0) <= 1e-9, "batch " + std::to_string(b) + fmt(" mean weight %.15f", mean));
    for (std::size_t i : front) c.expect(w.raw[i] == config.pareto_boost, "frontier raw weight equals beta");
    for (std::size_t i = 0; i < v.size(); ++i) c.expect(w.raw[i] > 0.0, "raw weight positive");
  }
  c.note(fmt("max |mean(w) - 1| = %.2e", worst_mean));

  const std::vector<ObjectiveVector> same(17, ObjectiveVector{0.4, 0.5, 0.6, 0.1, 0.7, 6.2});
  const auto w = sample_weights(same, config);
  for (double x : w.normalized) c.expect(x == 1.0, "identical batch gives unit weights");

  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const auto v = random_batch(rng, 1 + t * 2, t % 2 == 0);
    std::array<std::function<double(double)>, kChannelCount> f;
    for (std::size_t m = 0; m < kChannelCount; ++m) {
      const double a = 0.1 + 3.0 * u(rng), s = u(rng) * 5.0 - 2.0;
      switch ((t + m) % 3) {
        case 0: f[m] = [a, s](double x) { return a * x + s; }; break;
        case 1: f[m] = [a](double x) { return std::exp(a * x); }; break;
        default: f[m] = [a](double x) { return std::atan(a * x) + x * x * x; }; break;
      }
    }
    auto g = v;
    for (auto& x : g) {
      for (std::size_t m = 0; m < kChannelCount; ++m) x[m] = f[m](x[m]);
    }
    c.expect(pareto_set(g) == pareto_set(v), "monotone transform trial " + std::to_string(t));
  }
}

// ---------------------------------------------------------------------------
// simulator

void simulator_sanity(Check& c) {
  auto spec = default_generator_spec();
  spec.steps = 1200;
  const auto rows = simulate_rl_batches(spec, BalanceConfig{});
  c.expect(!rows.empty() && rows.back().step == spec.steps - 1, "final step logged");
  double p50 = 0, p99 = 0, fr = 0;
  for (const auto& r : rows) {
    const auto& w = r.weights;
    c.expect(w.p50 <= w.p90 && w.p90 <= w.p99, "quantiles ordered at step " + std::to_string(r.step));
    c.expect(w.frontier_ratio > 0.0 && w.frontier_ratio <= 1.0, "frontier ratio in (0, 1] at step " + std::to_string(r.step));
    c.expect(std::abs(w.mean - 1.0) <= 1e-9, "mean weight 1 at step " + std::to_string(r.step));
    p50 += w.p50;
    p99 += w.p99;
    fr += w.frontier_ratio;
  }
  const double n = static_cast<double>(rows.size());
  p50 /= n, p99 /= n, fr /= n;
  const bool in_band = p50 >= 0.96 && p50 <= 0.99 && p99 >= 1.23 && p99 <= 1.30 && fr >= 0.16 && fr <= 0.30;
  c.note(fmt("mean p50 %.3f p99 %.3f", p50, p99) + fmt(" frontier %.3f", fr) +
         (in_band ? " (inside reference band)" : " (outside reference band p50 0.96-0.99, p99 1.23-1.30, frontier 0.16-0.30)"));
}

// ---------------------------------------------------------------------------
// smiles and fingerprints

void smiles_fingerprint(Check& c) {
  const auto corpus = read_tsv("corpus.tsv");
  c.expect(corpus.rows.size() == 1000, "corpus has 1000 molecules");
  int failures = 0;
  std::vector<Fingerprint> fps;
  for (const auto& row : corpus.rows) {
    const auto r = parse_smiles(row[corpus.column("smiles")]);
    if (!r) {
      ++failures;
      continue;
    }
    const std::string canon = canonical_smiles(*r.graph);
    const auto back = parse_smiles(canon);
    const auto alt = parse_smiles(row[corpus.column("alt_smiles")]);
    if (!back || canonical_smiles(*back.graph) != canon || !alt || canonical_smiles(*alt.graph) != canon) ++failures;
    fps.push_back(ecfp(*r.graph));
  }
  c.expect(failures == 0, std::to_string(failures) + " round-trip failures");

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, fps.size() - 1);
  for (const auto& f : fps) c.expect(f.popcount() == 0 || tanimoto(f, f) == 1.0, "self similarity 1");
  for (int i = 0; i < 20000; ++i) {
    const auto& a = fps[pick(rng)];
    const auto& b = fps[pick(rng)];
    const double ab = tanimoto(a, b);
    c.expect(ab == tanimoto(b, a) && ab >= 0.0 && ab <= 1.0, "tanimoto symmetric and bounded");
  }

  // random strings over the SMILES alphabet, plus corpus strings with random edits
  const std::string alphabet = "CcNnOoSsPpFIBrCl()[]=#-:.123456789%0+-@/\\H*Xx ";
  std::uniform_int_distribution<std::size_t> len(0, 4096);
  std::uniform_int_distribution<std::size_t> sym(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> byte(0, 255);
  int parsed = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    if (i % 2 == 0) {
      s.resize(len(rng) / (i % 4 == 0 ? 1 : 32));
      for (char& ch : s) ch = i % 8 == 0 ? static_cast<char>(byte(rng)) : alphabet[sym(rng)];
    } else {
      s = corpus.rows[pick(rng)][0];
      const int edits = 1 + static_cast<int>(rng() % 4);
      for (int k = 0; k < edits && !s.empty(); ++k) s[rng() % s.size()] = alphabet[sym(rng)];
    }
    const auto r = parse_smiles(s);
    c.expect(r.graph.has_value() != r.error.has_value(), "exactly one of graph or diagnostic");
    if (r.error && !s.empty()) c.expect(r.error->offset < s.size(), "diagnostic offset inside input");
    if (r.graph) {
      ++parsed;
      const auto again = parse_smiles(canonical_smiles(*r.graph));
      c.expect(again.graph.has_value(), "canonical output of a fuzzed input parses");
    }
  }
  c.note("10000 fuzzed inputs, " + std::to_string(parsed) + " parsed");

  const auto drugs = read_tsv("drugs.tsv");
  c.expect(drugs.rows.size() == 50, "50 named drugs");
  for (const auto& row : drugs.rows) {
    const auto r = parse_smiles(row[drugs.column("smiles")]);
    c.expect(r.graph.has_value(), row[0] + " parses");
    if (!r) continue;
    const auto& g = *r.graph;
    c.expect(heavy_atom_count(g) == std::stoi(row[drugs.column("heavy")]), row[0] + " heavy atoms");
    c.expect(static_cast<int>(g.bond_count()) == std::stoi(row[drugs.column("bonds")]), row[0] + " bonds");
    c.expect(ring_count(g) == std::stoi(row[drugs.column("rings")]), row[0] + " rings");
    c.expect(rotatable_bond_count(g) == std::stoi(row[drugs.column("rot")]), row[0] + " rotatable bonds");
  }
}

// ---------------------------------------------------------------------------
// reasoning metrics

void reasoning_metrics(Check& c) {
  using S = EndpointSet;
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  c.expect(target_property_f1({}, {}) == 1.0, "both empty gives 1");
  c.expect(target_property_f1({"DILI"}, {}) == 0.0, "only mentioned gives 0");
  c.expect(target_property_f1({}, {"DILI"}) == 0.0, "only true gives 0");
  c.expect(target_property_f1({"DILI", "logP"}, {"DILI", "logP"}) == 1.0, "exact match gives 1");
  c.expect(target_property_f1({"DILI"}, {"logP"}) == 0.0, "disjoint gives 0");
  // P = 1/2, R = 1/3
  c.expect(near(target_property_f1(S{"DILI", "QED"}, S{"DILI", "logP", "MW"}), 0.4), "P 1/2 R 1/3 gives 0.4");
  std::mt19937_64 rng(8);
  std::vector<std::string> ids;
  for (const auto& e : default_registry().criteria()) ids.push_back(e.endpoint);
  for (int t = 0; t < 2000; ++t) {
    S m, truth;
    for (const auto& id : ids) {
      if (rng() % 3 == 0) m.insert(id);
      if (rng() % 3 == 0) truth.insert(id);
    }
    std::size_t both = 0;
    for (const auto& id : m) both += truth.count(id);
    double expected;
    if (m.empty() && truth.empty()) expected = 1.0;
    else if (m.empty() || truth.empty() || both == 0) expected = 0.0;
    else expected = 2.0 * both / static_cast<double>(m.size() + truth.size());
    c.expect(near(target_property_f1(m, truth), expected), "F1 equals 2|A&B| / (|A| + |B|)");
  }

  for (const RichnessConfig& config :
       {RichnessConfig{{{1.0, 0.0}}, 0.5, 0.1}, load_richness_config(testing::data_path("golden_richness.json"))}) {
    int argmax = 0;
    std::vector<double> grid;
    for (int i = 0; i <= 2000; ++i) grid.push_back(richness_from_distance(i * 1e-3, config));
    for (int i = 1; i <= 2000; ++i) {
      if (grid[i] > grid[argmax]) argmax = i;
    }
    c.expect(std::abs(argmax * 1e-3 - config.peak_distance) <= 5e-4 + 1e-12, "grid maximum sits at d*");
    c.expect(richness_from_distance(config.peak_distance, config) == 1.0, "peak value 1");
    for (int i = 1; i <= 2000; ++i) {
      const bool rising = i <= argmax;
      const bool ok = rising ? grid[i] >= grid[i - 1] : grid[i] <= grid[i - 1];
      const bool strict = rising ? grid[i] > grid[i - 1] : grid[i] < grid[i - 1];
      c.expect(ok && (strict || grid[i - 1] < 1e-300 || grid[i] < 1e-300), fmt("unimodal at d=%.3f", i * 1e-3));
    }
  }

  const JudgeSubScores perfect{1.0, 1.0, 1.0, 1.0, {}};
  c.expect(lms_aggregate(perfect, "") == 0.0, "empty rationale scores 0");
  c.expect(lms_aggregate(perfect, "   \n\t ") == 0.0, "blank rationale scores 0");
  c.expect(lms_aggregate(perfect, "one two three four five six seven eight nine") == 0.0, "nine tokens score 0");
  c.expect(lms_aggregate(perfect, "one two three four five six seven eight nine ten") == 1.0, "ten tokens score 1");

  const auto& lex = default_lexicon();
  try {
    lex.check_covers(default_registry());
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  c.expect(lex.aliases().size() == 23, "lexicon has 23 endpoints");
  for (const auto& [endpoint, aliases] : lex.aliases()) {
    c.expect(default_registry().find(endpoint) != nullptr, endpoint + " is a registry endpoint");
    for (const auto& alias : aliases) {
      c.expect(lex.extract("the " + alias + " improved") == S{endpoint}, "alias '" + alias + "' resolves to " + endpoint);
    }
  }
}

// ---------------------------------------------------------------------------
// dataset

void dataset_checks(Check& c) {
  const char* path = std::getenv("MOLREWARD_DATASET");
  if (!path || !*path) {
    c.skipped = true;
    c.note("set MOLREWARD_DATASET to a record JSONL file to run");
    return;
  }
  const auto& reg = default_registry();
  const auto in = ingest(path, reg);
  c.expect(in.rejects.empty(), std::to_string(in.rejects.size()) + " rejects");
  c.expect(in.records.size() + in.rejects.size() == 4855, std::to_string(in.records.size()) + " records loaded");
  const auto stats = dataset_stats(in.records);
  auto split = [&](const char* s) { return stats.splits.count(s) ? stats.splits.at(s) : 0; };
  c.expect(split("train") == 4126 && split("dev") == 485 && split("test") == 244,
           "split counts " + std::to_string(split("train")) + "/" + std::to_string(split("dev")) + "/" +
               std::to_string(split("test")));
  auto within = [&](const char* what, double got, double ref, double tol) {
    c.expect(std::abs(got - ref) <= tol, std::string(what) + fmt(" %.4f vs %.4f", got, ref));
  };
  within("heavy atoms", stats.heavy_atoms.mean, 24.12, 0.02 * 24.12);
  within("rings", stats.rings.mean, 3.70, 0.02 * 3.70);
  within("rotatable bonds", stats.rotatable_bonds.mean, 3.13, 0.02 * 3.13);
  within("unique smiles", stats.unique_smiles, 3863, 0.02 * 3863);
  within("mean tanimoto", stats.mean_tanimoto, 0.1291, 0.05);
  within("diversity", stats.diversity, 0.8709, 0.05);

  StubJudge judge;
  EvaluationContext context{reg, default_lexicon(), nullptr, judge};
  const auto report = evaluate(in.records, context);
  c.note(fmt("mean overall score %.4f (reference 0.1653, deviation %+.4f)", report.aggregates.mean_score,
             report.aggregates.mean_score - 0.1653));
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"registry fidelity", 1.0, registry_fidelity},
      {"score anchors", 30.0, score_anchors},
      {"gates", 1.0, gates},
      {"pareto engine", 60.0, pareto_engine},
      {"simulator sanity", 300.0, simulator_sanity},
      {"smiles and fingerprints", 300.0, smiles_fingerprint},
      {"reasoning metrics", 60.0, reasoning_metrics},
      {"dataset checks", 600.0, dataset_checks},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("threw: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(seconds <= cr.budget_seconds, fmt("took %.1f s, budget %.0f s", seconds, cr.budget_seconds));
    const char* tag = c.skipped ? "SKIP" : c.failed ? "FAIL" : "PASS";
    std::printf("%s  %-24s %8.3f s", tag, cr.name, seconds);
    for (const auto& n : c.notes) std::printf("  [%s]", n.c_str());
    std::printf("\n");
    for (const auto& f : c.failures) std::printf("      %s\n", f.c_str());
    if (c.failed > static_cast<int>(c.failures.size())) {
      std::printf("      ... %d failures in total\n", c.failed);
    }
    failed += c.failed > 0;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
