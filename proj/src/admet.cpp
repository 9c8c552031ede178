#include "molreward/admet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "molreward/error.hpp"

namespace molreward {

using nlohmann::json;

std::string_view to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::kRange: return "range";
    case CriterionKind::kThreshold: return "threshold";
    case CriterionKind::kMonotonic: return "monotonic";
  }
  return "?";
}

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::kLowerBetter: return "lower-better";
    case Direction::kHigherBetter: return "higher-better";
    case Direction::kInRange: return "in-range";
  }
  return "?";
}

namespace {

CriterionKind kind_from(const std::string& s) {
  if (s == "range") return CriterionKind::kRange;
  if (s == "threshold") return CriterionKind::kThreshold;
  if (s == "monotonic") return CriterionKind::kMonotonic;
  throw ConfigError("unknown criterion kind '" + s + "'");
}

Direction direction_from(const std::string& s) {
  if (s == "lower-better") return Direction::kLowerBetter;
  if (s == "higher-better") return Direction::kHigherBetter;
  if (s == "in-range") return Direction::kInRange;
  throw ConfigError("unknown direction '" + s + "'");
}

void validate(const EndpointCriterion& c, const RewardConstants& k) {
  const std::string where = "endpoint '" + c.endpoint + "': ";
  if (c.endpoint.empty()) throw ConfigError("criterion with empty endpoint id");
  switch (c.kind) {
    case CriterionKind::kRange:
      if (c.direction != Direction::kInRange) throw ConfigError(where + "range criteria must be in-range");
      if (!(c.lo < c.hi) || !std::isfinite(c.lo) || !std::isfinite(c.hi)) {
        throw ConfigError(where + "range requires finite lo < hi");
      }
      if (c.bonus != k.range_bonus) throw ConfigError(where + "range bonus must equal the range_bonus constant");
      break;
    case CriterionKind::kThreshold:
      if (c.direction == Direction::kInRange) throw ConfigError(where + "threshold criteria need a direction");
      if (!std::isfinite(c.threshold)) throw ConfigError(where + "threshold must be finite");
      if (c.bonus != k.threshold_bonus) {
        throw ConfigError(where + "threshold bonus must equal the threshold_bonus constant");
      }
      break;
    case CriterionKind::kMonotonic:
      if (c.direction == Direction::kInRange) throw ConfigError(where + "monotonic criteria need a direction");
      if (c.bonus != 0.0) throw ConfigError(where + "monotonic criteria carry no bonus");
      break;
  }
}

EndpointCriterion range(std::string id, double lo, double hi, const RewardConstants& k) {
  return {std::move(id), CriterionKind::kRange, Direction::kInRange, 0.0, lo, hi, k.range_bonus, false};
}

EndpointCriterion threshold(std::string id, double t, const RewardConstants& k, bool probability) {
  return {std::move(id), CriterionKind::kThreshold, Direction::kLowerBetter, t, 0.0, 0.0, k.threshold_bonus,
          probability};
}

EndpointCriterion monotonic(std::string id, bool probability) {
  return {std::move(id), CriterionKind::kMonotonic, Direction::kHigherBetter, 0.0, 0.0, 0.0, 0.0, probability};
}

double distance_to_range(double x, double lo, double hi) {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

constexpr double kGuard = 1e-6;

}  // namespace

CriteriaRegistry::CriteriaRegistry(std::vector<EndpointCriterion> criteria, RewardConstants constants)
    : criteria_(std::move(criteria)), constants_(constants) {
  if (!(constants_.clip_bound > 0.0)) throw ConfigError("clip_bound must be > 0");
  if (!(constants_.new_liability_penalty >= 0.0)) throw ConfigError("new_liability_penalty must be >= 0");
  if (!(constants_.non_liability_weight > 0.0 && constants_.non_liability_weight <= 1.0)) {
    throw ConfigError("non_liability_weight must be in (0, 1]");
  }
  if (!(constants_.threshold_bonus >= 0.0) || !(constants_.range_bonus >= 0.0)) {
    throw ConfigError("bonuses must be >= 0");
  }
  if (criteria_.size() != kEndpointCount) {
    throw ConfigError("expected 23 endpoints, got " + std::to_string(criteria_.size()));
  }
  for (std::size_t i = 0; i < criteria_.size(); ++i) {
    validate(criteria_[i], constants_);
    for (std::size_t j = 0; j < i; ++j) {
      if (criteria_[j].endpoint == criteria_[i].endpoint) {
        throw ConfigError("duplicate endpoint '" + criteria_[i].endpoint + "'");
      }
    }
  }
}

const EndpointCriterion* CriteriaRegistry::find(std::string_view endpoint) const {
  for (const auto& c : criteria_) {
    if (c.endpoint == endpoint) return &c;
  }
  return nullptr;
}

const EndpointCriterion& CriteriaRegistry::at(std::string_view endpoint) const {
  const auto* c = find(endpoint);
  if (!c) throw std::out_of_range("unknown endpoint '" + std::string(endpoint) + "'");
  return *c;
}

std::size_t CriteriaRegistry::count(CriterionKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(criteria_.begin(), criteria_.end(), [&](const auto& c) { return c.kind == kind; }));
}

const CriteriaRegistry& default_registry() {
  static const CriteriaRegistry registry = [] {
    const RewardConstants k{};
    std::vector<EndpointCriterion> c = {
        range("logP", 1.0, 3.0, k),
        range("TPSA", 20.0, 130.0, k),
        range("MW", 150.0, 500.0, k),
        threshold("Caco-2 permeability", -5.15, k, false),
        threshold("F50%", 0.50, k, true),
        threshold("CYP3A4 inhibitor", 0.50, k, true),
        threshold("CYP2D6 inhibitor", 0.50, k, true),
        threshold("P-gp substrate", 0.50, k, true),
        threshold("hERG blockers", 0.80, k, true),
        threshold("DILI", 0.80, k, true),
        threshold("Human hepatotoxicity", 0.80, k, true),
        threshold("AMES toxicity", 0.80, k, true),
        threshold("Genotoxicity", 0.80, k, true),
        threshold("Drug-induced neurotoxicity", 0.80, k, true),
        threshold("QED", 0.34, k, true),
        threshold("SA score", 0.50, k, false),
        threshold("GASA", 0.50, k, true),
        threshold("Lipinski rule", 0.50, k, false),
        monotonic("HLM stability", true),
        monotonic("logS", false),
        monotonic("logD7.4", false),
        monotonic("Flexibility", false),
        monotonic("Fsp3", true),
    };
    return CriteriaRegistry(std::move(c), k);
  }();
  return registry;
}

CriteriaRegistry registry_from_json(const json& config) {
  try {
    RewardConstants k;
    if (config.contains("constants")) {
      const json& c = config.at("constants");
      k.clip_bound = c.value("clip_bound", k.clip_bound);
      k.new_liability_penalty = c.value("new_liability_penalty", k.new_liability_penalty);
      k.non_liability_weight = c.value("non_liability_weight", k.non_liability_weight);
      k.threshold_bonus = c.value("threshold_bonus", k.threshold_bonus);
      k.range_bonus = c.value("range_bonus", k.range_bonus);
    }
    std::vector<EndpointCriterion> criteria;
    for (const json& entry : config.at("target_criteria")) {
      EndpointCriterion c;
      c.endpoint = entry.at("endpoint").get<std::string>();
      c.kind = kind_from(entry.at("kind").get<std::string>());
      c.probability = entry.value("probability", false);
      if (c.kind == CriterionKind::kRange) {
        const auto r = entry.at("range").get<std::vector<double>>();
        if (r.size() != 2) throw ConfigError("endpoint '" + c.endpoint + "': range needs [lo, hi]");
        c.lo = r[0];
        c.hi = r[1];
        c.direction = direction_from(entry.value("direction", std::string("in-range")));
        c.bonus = k.range_bonus;
      } else if (c.kind == CriterionKind::kThreshold) {
        c.threshold = entry.at("threshold").get<double>();
        c.direction = direction_from(entry.at("direction").get<std::string>());
        c.bonus = k.threshold_bonus;
      } else {
        throw ConfigError("endpoint '" + c.endpoint + "': monotonic criteria belong in monotonic_criteria");
      }
      criteria.push_back(std::move(c));
    }
    for (const json& entry : config.at("monotonic_criteria")) {
      EndpointCriterion c;
      c.endpoint = entry.at("endpoint").get<std::string>();
      c.kind = CriterionKind::kMonotonic;
      c.direction = direction_from(entry.at("direction").get<std::string>());
      c.probability = entry.value("probability", false);
      criteria.push_back(std::move(c));
    }
    return CriteriaRegistry(std::move(criteria), k);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("registry config: ") + e.what());
  }
}

json registry_to_json(const CriteriaRegistry& registry) {
  const auto& k = registry.constants();
  json out;
  out["constants"] = {{"clip_bound", k.clip_bound},
                      {"new_liability_penalty", k.new_liability_penalty},
                      {"non_liability_weight", k.non_liability_weight},
                      {"threshold_bonus", k.threshold_bonus},
                      {"range_bonus", k.range_bonus}};
  out["target_criteria"] = json::array();
  out["monotonic_criteria"] = json::array();
  for (const auto& c : registry.criteria()) {
    json e = {{"endpoint", c.endpoint}, {"direction", std::string(to_string(c.direction))}};
    if (c.kind == CriterionKind::kMonotonic) {
      e["probability"] = c.probability;
      out["monotonic_criteria"].push_back(e);
      continue;
    }
    e["kind"] = std::string(to_string(c.kind));
    if (c.kind == CriterionKind::kRange) {
      e["range"] = {c.lo, c.hi};
    } else {
      e["threshold"] = c.threshold;
    }
    e["probability"] = c.probability;
    out["target_criteria"].push_back(e);
  }
  return out;
}

CriteriaRegistry load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open registry config '" + path + "'");
  json config;
  try {
    config = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("registry config '" + path + "': " + e.what());
  }
  return registry_from_json(config);
}

void validate_profile(const AdmetProfile& profile, const CriteriaRegistry& registry) {
  for (const auto& [endpoint, value] : profile) {
    const auto* c = registry.find(endpoint);
    if (!c) throw std::invalid_argument("unknown endpoint '" + endpoint + "'");
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite value for '" + endpoint + "'");
    if (c->probability && (value < 0.0 || value > 1.0)) {
      throw std::invalid_argument("probability endpoint '" + endpoint + "' outside [0, 1]");
    }
  }
}

bool is_liability(const EndpointCriterion& c, double value) {
  switch (c.kind) {
    case CriterionKind::kRange: return value < c.lo || value > c.hi;
    case CriterionKind::kThreshold:
      return c.direction == Direction::kLowerBetter ? value >= c.threshold : value <= c.threshold;
    case CriterionKind::kMonotonic: return false;
  }
  return false;
}

std::set<std::string, std::less<>> liabilities(const AdmetProfile& profile, const CriteriaRegistry& registry) {
  std::set<std::string, std::less<>> out;
  for (const auto& [endpoint, value] : profile) {
    if (is_liability(registry.at(endpoint), value)) out.insert(endpoint);
  }
  return out;
}

EndpointDelta endpoint_delta(const EndpointCriterion& c, double o, double p, double clip_bound) {
  EndpointDelta d;
  double continuous = 0.0;
  switch (c.kind) {
    case CriterionKind::kThreshold: {
      const double scale = std::max(std::abs(c.threshold), kGuard);
      if (c.direction == Direction::kLowerBetter) {
        continuous = (o - p) / scale;
        if (o >= c.threshold && p < c.threshold) d.bonus = c.bonus;
      } else {
        continuous = (p - o) / scale;
        if (o <= c.threshold && p > c.threshold) d.bonus = c.bonus;
      }
      break;
    }
    case CriterionKind::kRange: {
      const double before = distance_to_range(o, c.lo, c.hi);
      const double after = distance_to_range(p, c.lo, c.hi);
      continuous = (before - after) / (c.hi - c.lo);
      if (before > 0.0 && after == 0.0) d.bonus = c.bonus;
      break;
    }
    case CriterionKind::kMonotonic: {
      const double scale = std::max(std::abs(o), kGuard);
      continuous = c.direction == Direction::kHigherBetter ? (p - o) / scale : (o - p) / scale;
      break;
    }
  }
  d.continuous = std::clamp(continuous, -clip_bound, clip_bound);
  return d;
}

PairEvaluation overall_score(const AdmetProfile& original, const AdmetProfile& optimized,
                             const CriteriaRegistry& registry) {
  validate_profile(original, registry);
  validate_profile(optimized, registry);
  const RewardConstants& k = registry.constants();

  PairEvaluation e;
  int shared = 0;
  for (const auto& [endpoint, o] : original) {
    const auto it = optimized.find(endpoint);
    if (it == optimized.end()) continue;
    ++shared;
    const EndpointCriterion& c = registry.at(endpoint);
    if (is_liability(c, o)) e.original_liabilities.insert(endpoint);
    if (is_liability(c, it->second)) e.optimized_liabilities.insert(endpoint);
  }
  if (shared == 0) throw std::invalid_argument("original and optimized profiles share no endpoint");
  e.dropped_endpoints = static_cast<int>(original.size() + optimized.size()) - 2 * shared;

  double sum = 0.0;
  for (const auto& [endpoint, o] : original) {
    const auto it = optimized.find(endpoint);
    if (it == optimized.end()) continue;
    const EndpointCriterion& c = registry.at(endpoint);
    const EndpointDelta d = endpoint_delta(c, o, it->second, k.clip_bound);
    EndpointContribution contribution;
    contribution.continuous = d.continuous;
    contribution.bonus = d.bonus;
    contribution.weight = e.original_liabilities.contains(endpoint) ? 1.0 : k.non_liability_weight;
    contribution.value = contribution.weight * (d.continuous + d.bonus);
    sum += contribution.value;
    e.contributions.emplace(endpoint, contribution);
  }
  for (const auto& f : e.optimized_liabilities) {
    if (!e.original_liabilities.contains(f)) ++e.new_liabilities;
  }
  e.raw = sum - k.new_liability_penalty * e.new_liabilities;

  for (const auto& f : e.original_liabilities) e.denominator += k.clip_bound + registry.at(f).bonus;
  if (e.original_liabilities.empty()) e.denominator = k.clip_bound / 2.0;
  e.score = std::clamp(e.raw / e.denominator, 0.0, 1.0);
  return e;
}

}  // namespace molreward
