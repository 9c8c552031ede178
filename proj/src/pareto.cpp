#include "molreward/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "molreward/error.hpp"
#include "molreward/stats.hpp"

namespace molreward {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kChannelCount> kNames = {"f1",      "lms",        "richness",
                                                                "opt_score", "similarity", "binding_utility"};

}  // namespace

std::string_view channel_name(std::size_t channel) {
  if (channel >= kChannelCount) throw std::out_of_range("channel index");
  return kNames[channel];
}

void validate_objective(const ObjectiveVector& v) {
  for (std::size_t m = 0; m < kChannelCount; ++m) {
    if (!std::isfinite(v[m])) throw std::invalid_argument(std::string(kNames[m]) + " is not finite");
    if (m != kBindingUtility && (v[m] < 0.0 || v[m] > 1.0)) {
      throw std::invalid_argument(std::string(kNames[m]) + " outside [0, 1]");
    }
  }
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  bool strict = false;
  for (std::size_t m = 0; m < kChannelCount; ++m) {
    if (a[m] < b[m]) return false;
    strict = strict || a[m] > b[m];
  }
  return strict;
}

std::vector<bool> pareto_mask(const std::vector<ObjectiveVector>& vectors) {
  // Any dominator has a larger (rounded sums are monotone) or equal sum and is
  // lexicographically greater, so it is visited first; checking the frontier
  // found so far suffices by transitivity.
  std::vector<double> sums(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    sums[i] = std::accumulate(vectors[i].begin(), vectors[i].end(), 0.0);
  }
  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sums[a] != sums[b]) return sums[a] > sums[b];
    if (vectors[a] != vectors[b]) return vectors[a] > vectors[b];
    return a < b;
  });
  std::vector<bool> mask(vectors.size(), false);
  std::vector<std::size_t> frontier;
  for (std::size_t i : order) {
    const bool dominated = std::any_of(frontier.begin(), frontier.end(),
                                       [&](std::size_t f) { return dominates(vectors[f], vectors[i]); });
    if (!dominated) {
      frontier.push_back(i);
      mask[i] = true;
    }
  }
  return mask;
}

std::vector<std::size_t> pareto_set(const std::vector<ObjectiveVector>& vectors) {
  const auto mask = pareto_mask(vectors);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(i);
  }
  return out;
}

void validate_balance_config(const BalanceConfig& c) {
  if (!(c.pareto_boost > 1.0) || !std::isfinite(c.pareto_boost)) throw ConfigError("pareto_boost must be > 1");
  if (!(c.decay > 0.0) || !std::isfinite(c.decay)) throw ConfigError("decay must be > 0");
  if (!(c.shortfall_exponent > 0.0 && c.shortfall_exponent <= 1.0)) {
    throw ConfigError("shortfall_exponent must lie in (0, 1]");
  }
  if (!(c.boost_cap >= 1.0) || !std::isfinite(c.boost_cap)) throw ConfigError("boost_cap must be >= 1");
  if (!(c.group_scale_cap >= 1.0) || !std::isfinite(c.group_scale_cap)) {
    throw ConfigError("group_scale_cap must be >= 1");
  }
  for (std::size_t m = 0; m < kChannelCount; ++m) {
    if (!(c.targets[m] > 0.0) || !std::isfinite(c.targets[m])) {
      throw ConfigError("target for " + std::string(kNames[m]) + " must be finite and > 0");
    }
  }
}

BalanceConfig balance_from_json(const json& j) {
  BalanceConfig c;
  try {
    c.pareto_boost = j.value("pareto_boost", c.pareto_boost);
    c.decay = j.value("decay", c.decay);
    c.shortfall_exponent = j.value("shortfall_exponent", c.shortfall_exponent);
    c.boost_cap = j.value("boost_cap", c.boost_cap);
    c.group_scale_cap = j.value("group_scale_cap", c.group_scale_cap);
    if (j.contains("targets")) {
      const auto& t = j.at("targets");
      for (const auto& [key, value] : t.items()) {
        const auto it = std::find(kNames.begin(), kNames.end(), key);
        if (it == kNames.end()) throw ConfigError("unknown target channel '" + key + "'");
        c.targets[static_cast<std::size_t>(it - kNames.begin())] = value.get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("balance config: ") + e.what());
  }
  validate_balance_config(c);
  return c;
}

json balance_to_json(const BalanceConfig& c) {
  json targets = json::object();
  for (std::size_t m = 0; m < kChannelCount; ++m) targets[std::string(kNames[m])] = c.targets[m];
  return json{{"pareto_boost", c.pareto_boost},
              {"decay", c.decay},
              {"shortfall_exponent", c.shortfall_exponent},
              {"boost_cap", c.boost_cap},
              {"group_scale_cap", c.group_scale_cap},
              {"targets", targets}};
}

BalanceConfig load_balance_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open balance config '" + path + "'");
  try {
    return balance_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("balance config '" + path + "': " + e.what());
  }
}

std::vector<ObjectiveVector> distance_coordinates(const std::vector<ObjectiveVector>& vectors) {
  std::vector<ObjectiveVector> out = vectors;
  if (vectors.empty()) return out;
  double lo = vectors.front()[kBindingUtility];
  double hi = lo;
  for (const auto& v : vectors) {
    lo = std::min(lo, v[kBindingUtility]);
    hi = std::max(hi, v[kBindingUtility]);
  }
  for (auto& v : out) v[kBindingUtility] = hi > lo ? (v[kBindingUtility] - lo) / (hi - lo) : 0.0;
  return out;
}

namespace {

double subspace_distance(const ObjectiveVector& a, const ObjectiveVector& b, std::size_t group) {
  double s = 0.0;
  for (std::size_t m = 3 * group; m < 3 * group + 3; ++m) s += (a[m] - b[m]) * (a[m] - b[m]);
  return std::sqrt(s);
}

}  // namespace

SampleWeights sample_weights(const std::vector<ObjectiveVector>& vectors, const BalanceConfig& config) {
  if (vectors.empty()) throw std::invalid_argument("empty trajectory batch");
  const std::size_t n = vectors.size();
  SampleWeights w;
  w.frontier = pareto_mask(vectors);
  const auto coords = distance_coordinates(vectors);
  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < n; ++i) {
    if (w.frontier[i]) anchors.push_back(i);
  }
  w.distances.assign(n, {0.0, 0.0});
  w.raw.assign(n, config.pareto_boost);
  for (std::size_t i = 0; i < n; ++i) {
    if (w.frontier[i]) continue;
    double raw = 1.0;
    for (std::size_t g = 0; g < 2; ++g) {
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t a : anchors) d = std::min(d, subspace_distance(coords[i], coords[a], g));
      w.distances[i][g] = d;
      raw *= 1.0 + (config.pareto_boost - 1.0) * std::exp(-config.decay * d);
    }
    w.raw[i] = raw;
  }
  w.normalized.assign(n, 1.0);
  if (std::all_of(w.raw.begin(), w.raw.end(), [&](double r) { return r == w.raw.front(); })) return w;
  const double total = std::accumulate(w.raw.begin(), w.raw.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) w.normalized[i] = static_cast<double>(n) * w.raw[i] / total;
  return w;
}

BatchAdaptation batch_adaptation(const std::vector<ObjectiveVector>& vectors, const BalanceConfig& config) {
  return batch_adaptation(vectors, config, config.targets);
}

BatchAdaptation batch_adaptation(const std::vector<ObjectiveVector>& vectors, const BalanceConfig& config,
                                 const ObjectiveVector& targets) {
  if (vectors.empty()) throw std::invalid_argument("empty trajectory batch");
  constexpr double kFloor = 1e-6;
  BatchAdaptation out;
  for (const auto& v : vectors) {
    for (std::size_t m = 0; m < kChannelCount; ++m) out.channel_means[m] += v[m];
  }
  for (double& m : out.channel_means) m /= static_cast<double>(vectors.size());
  for (std::size_t g = 0; g < 2; ++g) {
    double r = 0.0;
    double t = 0.0;
    for (std::size_t m = 3 * g; m < 3 * g + 3; ++m) {
      r += out.channel_means[m] / 3.0;
      t += targets[m] / 3.0;
    }
    out.group_scales[g] = std::clamp(t / std::max(r, kFloor), 1.0, config.group_scale_cap);
  }
  for (std::size_t m = 0; m < kChannelCount; ++m) {
    const double r = out.channel_means[m];
    out.channel_boosts[m] =
        r < targets[m] ? std::min(config.boost_cap, std::pow(targets[m] / std::max(r, kFloor), config.shortfall_exponent))
                       : 1.0;
  }
  return out;
}

ChannelRewards reweight_rewards(const ChannelRewards& rewards, const std::vector<double>& weights,
                                const ObjectiveVector& boosts, const std::array<double, 2>& scales) {
  ChannelRewards out;
  for (std::size_t m = 0; m < kChannelCount; ++m) {
    if (rewards[m].size() != weights.size()) throw std::invalid_argument("reward and weight counts differ");
    const double factor = boosts[m] * scales[channel_group(m)];
    out[m].resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) out[m][i] = rewards[m][i] * weights[i] * factor;
  }
  return out;
}

TrajectoryBatch balance_batch(std::vector<ObjectiveVector> vectors, const BalanceConfig& config) {
  TrajectoryBatch b;
  b.weights = sample_weights(vectors, config);
  b.adaptation = batch_adaptation(vectors, config);
  b.vectors = std::move(vectors);
  return b;
}

WeightSummary summarize_weights(const SampleWeights& weights) {
  WeightSummary s;
  if (weights.normalized.empty()) return s;
  std::vector<double> sorted = weights.normalized;
  std::sort(sorted.begin(), sorted.end());
  s.p50 = quantile_sorted(sorted, 0.50);
  s.p90 = quantile_sorted(sorted, 0.90);
  s.p99 = quantile_sorted(sorted, 0.99);
  s.frontier_ratio = static_cast<double>(std::count(weights.frontier.begin(), weights.frontier.end(), true)) /
                     static_cast<double>(weights.frontier.size());
  s.mean = mean(weights.normalized);
  return s;
}

RunningTargets::RunningTargets(ObjectiveVector defaults, std::size_t window) : defaults_(defaults), window_(window) {
  if (window_ == 0) throw std::invalid_argument("running-target window must be > 0");
}

void RunningTargets::observe(const std::vector<ObjectiveVector>& batch) {
  std::lock_guard lock(mutex_);
  for (const auto& v : batch) {
    for (std::size_t m = 0; m < kChannelCount; ++m) {
      values_[m].push_back(v[m]);
      if (values_[m].size() > window_) values_[m].pop_front();
    }
  }
}

ObjectiveVector RunningTargets::current() const {
  std::lock_guard lock(mutex_);
  ObjectiveVector out = defaults_;
  for (std::size_t m = 0; m < kChannelCount; ++m) {
    if (!values_[m].empty()) out[m] = median(std::vector<double>(values_[m].begin(), values_[m].end()));
  }
  return out;
}

std::size_t RunningTargets::observed() const {
  std::lock_guard lock(mutex_);
  return values_[0].size();
}

ObjectiveRecord objective_from_json(const json& j) {
  ObjectiveRecord r;
  r.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
  const auto& o = j.at("objectives");
  r.objectives[kF1] = o.at("f1").get<double>();
  r.objectives[kLms] = o.at("lms").get<double>();
  r.objectives[kRichness] = o.at("richness").get<double>();
  r.objectives[kOptScore] = o.at("opt_score").get<double>();
  r.objectives[kSimilarity] = o.at("similarity").get<double>();
  r.objectives[kBindingUtility] = -o.at("binding_energy").get<double>();
  validate_objective(r.objectives);
  return r;
}

std::vector<ObjectiveRecord> load_objectives(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open objectives '" + path + "'");
  std::vector<ObjectiveRecord> out;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(objective_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace molreward
