#include "molreward/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "molreward/error.hpp"
#include "molreward/hash.hpp"

namespace molreward {

using nlohmann::json;

GeneratorSpec default_generator_spec() {
  GeneratorSpec s;
  s.channels[kF1] = {0.30, 3.0e-4, 0.15};
  s.channels[kLms] = {0.50, 2.0e-4, 0.12};
  s.channels[kRichness] = {0.40, 1.5e-4, 0.15};
  s.channels[kOptScore] = {0.10, 1.0e-4, 0.08};
  s.channels[kSimilarity] = {0.55, 1.0e-4, 0.10};
  s.channels[kBindingUtility] = {6.5, 5.0e-4, 1.0};
  s.shared_factor = 0.3;
  return s;
}

GeneratorSpec generator_from_json(const json& j) {
  GeneratorSpec s = default_generator_spec();
  try {
    s.shared_factor = j.value("shared_factor", s.shared_factor);
    s.steps = j.value("steps", s.steps);
    s.batch_size = j.value("batch_size", s.batch_size);
    s.seed = j.value("seed", s.seed);
    s.log_every = j.value("log_every", s.log_every);
    s.adaptation_interval = j.value("adaptation_interval", s.adaptation_interval);
    if (j.contains("channels")) {
      for (const auto& [key, c] : j.at("channels").items()) {
        std::size_t m = kChannelCount;
        for (std::size_t i = 0; i < kChannelCount; ++i) {
          if (key == channel_name(i)) m = i;
        }
        const bool energy = key == "binding_energy";
        if (energy) m = kBindingUtility;
        if (m == kChannelCount) throw ConfigError("generator: unknown channel '" + key + "'");
        auto& g = s.channels[m];
        const double sign = energy ? -1.0 : 1.0;
        g.mean = sign * c.value("mean", sign * g.mean);
        g.drift = sign * c.value("drift", sign * g.drift);
        g.stddev = c.value("stddev", g.stddev);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("generator spec: ") + e.what());
  }
  if (s.steps < 1 || s.batch_size < 1 || s.log_every < 1 || s.adaptation_interval < 1) {
    throw ConfigError("generator spec: steps, batch_size, log_every and adaptation_interval must be >= 1");
  }
  if (!(s.shared_factor >= 0.0 && s.shared_factor < 1.0)) {
    throw ConfigError("generator spec: shared_factor must lie in [0, 1)");
  }
  for (const auto& g : s.channels) {
    if (!(g.stddev >= 0.0) || !std::isfinite(g.mean) || !std::isfinite(g.drift)) {
      throw ConfigError("generator spec: channel needs finite mean/drift and stddev >= 0");
    }
  }
  return s;
}

json generator_to_json(const GeneratorSpec& s) {
  json channels = json::object();
  for (std::size_t m = 0; m < kChannelCount; ++m) {
    const auto& g = s.channels[m];
    channels[std::string(channel_name(m))] = {{"mean", g.mean}, {"drift", g.drift}, {"stddev", g.stddev}};
  }
  return json{{"channels", channels},         {"shared_factor", s.shared_factor},
              {"steps", s.steps},             {"batch_size", s.batch_size},
              {"seed", s.seed},               {"log_every", s.log_every},
              {"adaptation_interval", s.adaptation_interval}};
}

GeneratorSpec load_generator_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open generator spec '" + path + "'");
  try {
    return generator_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("generator spec '" + path + "': " + e.what());
  }
}

std::vector<ObjectiveVector> sample_batch(const GeneratorSpec& spec, int step, std::uint64_t& state) {
  std::mt19937_64 rng(hash_combine(spec.seed, state++));
  std::normal_distribution<double> n01(0.0, 1.0);
  const double shared = std::sqrt(spec.shared_factor);
  const double own = std::sqrt(1.0 - spec.shared_factor);
  std::vector<ObjectiveVector> batch(static_cast<std::size_t>(spec.batch_size));
  for (auto& v : batch) {
    const double z = n01(rng);
    for (std::size_t m = 0; m < kChannelCount; ++m) {
      const auto& g = spec.channels[m];
      const double mu = g.mean + g.drift * step;
      double x = mu + g.stddev * (shared * z + own * n01(rng));
      if (m != kBindingUtility) x = std::clamp(x, 0.0, 1.0);
      v[m] = x;
    }
  }
  return batch;
}

std::vector<DynamicsRow> simulate_rl_batches(const GeneratorSpec& spec, const BalanceConfig& config) {
  std::vector<DynamicsRow> rows;
  std::uint64_t state = 0;
  BatchAdaptation adaptation;
  for (int step = 0; step < spec.steps; ++step) {
    const auto batch = sample_batch(spec, step, state);
    if (step % spec.adaptation_interval == 0) adaptation = batch_adaptation(batch, config);
    if (step % spec.log_every != 0 && step != spec.steps - 1) continue;
    const auto weights = sample_weights(batch, config);
    DynamicsRow row;
    row.step = step;
    row.channel_means = batch_adaptation(batch, config).channel_means;
    row.weights = summarize_weights(weights);
    row.channel_boosts = adaptation.channel_boosts;
    row.group_scales = adaptation.group_scales;
    rows.push_back(row);
  }
  return rows;
}

json dynamics_row_to_json(const DynamicsRow& r) {
  json means = json::object();
  json boosts = json::object();
  for (std::size_t m = 0; m < kChannelCount; ++m) {
    means[std::string(channel_name(m))] = r.channel_means[m];
    boosts[std::string(channel_name(m))] = r.channel_boosts[m];
  }
  return json{{"step", r.step},
              {"p50", r.weights.p50},
              {"p90", r.weights.p90},
              {"p99", r.weights.p99},
              {"frontier_ratio", r.weights.frontier_ratio},
              {"mean_w", r.weights.mean},
              {"channel_means", means},
              {"channel_boosts", boosts},
              {"group_scales", {r.group_scales[0], r.group_scales[1]}}};
}

std::string dynamics_table(const std::vector<DynamicsRow>& rows) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%6s %7s %7s %7s %9s", "step", "p50(w)", "p90(w)", "p99(w)", "frontier");
  out << buf;
  for (std::size_t m = 0; m < kChannelCount; ++m) {
    std::snprintf(buf, sizeof buf, " %10.10s", std::string(channel_name(m)).c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%6d %7.3f %7.3f %7.3f %9.3f", r.step, r.weights.p50, r.weights.p90,
                  r.weights.p99, r.weights.frontier_ratio);
    out << buf;
    for (double m : r.channel_means) {
      std::snprintf(buf, sizeof buf, " %10.4f", m);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace molreward
