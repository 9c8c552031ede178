// molreward: command line front end for scoring, evaluation, reweighting,
// simulation and dataset statistics.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "molreward/admet.hpp"
#include "molreward/error.hpp"
#include "molreward/harness.hpp"
#include "molreward/judge.hpp"
#include "molreward/pareto.hpp"
#include "molreward/reasoning.hpp"
#include "molreward/simulator.hpp"

namespace {

using namespace molreward;
using nlohmann::json;

struct Options {
  std::string registry;
  std::string lexicon;
  std::string richness;
  std::string balance;
  std::string judge = "stub";
  std::string judge_config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

struct Loaded {
  CriteriaRegistry registry;
  EndpointLexicon lexicon;
  std::optional<RichnessConfig> richness;
  BalanceConfig balance;
  std::unique_ptr<JudgeClient> judge;
};

Loaded load(const Options& o) {
  Loaded l{o.registry.empty() ? default_registry() : load_registry(o.registry),
           o.lexicon.empty() ? default_lexicon() : load_lexicon(o.lexicon), std::nullopt,
           o.balance.empty() ? BalanceConfig{} : load_balance_config(o.balance), nullptr};
  l.lexicon.check_covers(l.registry);
  if (!o.richness.empty()) l.richness = load_richness_config(o.richness);
  if (o.judge == "remote") {
    l.judge = std::make_unique<RemoteJudge>(o.judge_config.empty() ? RemoteJudgeConfig{}
                                                                   : load_remote_judge_config(o.judge_config));
  } else {
    l.judge = std::make_unique<StubJudge>();
  }
  return l;
}

EvaluationContext context(Loaded& l, unsigned threads = 1) {
  return EvaluationContext{l.registry, l.lexicon, l.richness ? &*l.richness : nullptr, *l.judge, l.balance, threads};
}

json read_json_arg(const std::string& text) {
  // Inline JSON or a path to a JSON file.
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    std::ifstream in(text);
    if (!in) throw ConfigError("'" + text + "' is neither JSON nor a readable file");
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("'" + text + "': " + e.what());
    }
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Reward and evaluation engine for molecular optimization"};
  app.set_version_flag("--version", std::string(MOLREWARD_VERSION));
  app.require_subcommand(1);
  Options o;
  app.add_option("--registry", o.registry, "Criteria registry JSON (default: built-in table)");
  app.add_option("--lexicon", o.lexicon, "Endpoint alias lexicon JSON (default: built-in)");
  app.add_option("--richness-config", o.richness, "Richness prototypes JSON; richness is skipped without it");
  app.add_option("--balance-config", o.balance, "Balancing parameters JSON (default: built-in)");
  app.add_option("--judge", o.judge, "Rationale judge")->check(CLI::IsMember({"stub", "remote"}));
  app.add_option("--judge-config", o.judge_config, "Remote judge endpoint JSON");
  app.add_option("--seed", o.seed, "Seed for sampling and simulation");
  app.add_option("--out", o.out, "Output file (default: stdout)");

  // score
  auto* score = app.add_subcommand("score", "Score one pair (JSON record from --pair, flags, or stdin)");
  std::string pair_file, original, optimized, original_admet, optimized_admet, reasoning;
  std::vector<double> embedding;
  std::optional<double> energy;
  score->add_option("--pair", pair_file, "Record JSON file ('-' for stdin)");
  score->add_option("--original", original, "Original SMILES");
  score->add_option("--optimized", optimized, "Optimized SMILES");
  score->add_option("--original-admet", original_admet, "Original ADMET profile (JSON or file)");
  score->add_option("--optimized-admet", optimized_admet, "Optimized ADMET profile (JSON or file)");
  score->add_option("--reasoning", reasoning, "Rationale text");
  score->add_option("--embedding", embedding, "Rationale embedding components")->delimiter(',');
  score->add_option("--binding-energy", energy, "Optimized binding energy, kcal/mol");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a JSONL file of pair records");
  std::string input, embeddings_file, energies_file, rejects_file, format = "jsonl";
  unsigned threads = 1;
  evaluate_cmd->add_option("input", input, "Pair records JSONL")->required();
  evaluate_cmd->add_option("--embeddings", embeddings_file, "Sidecar JSONL of {id, vector}");
  evaluate_cmd->add_option("--energies", energies_file, "Sidecar JSONL of binding energies");
  evaluate_cmd->add_option("--rejects", rejects_file, "Write rejected lines as JSONL");
  evaluate_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"jsonl", "table"}));
  evaluate_cmd->add_option("--threads", threads, "Worker threads");

  // reweight
  auto* reweight = app.add_subcommand("reweight", "Pareto sample weights for an objective JSONL batch");
  std::string objectives, summary_file;
  reweight->add_option("input", objectives, "Objective records JSONL")->required();
  reweight->add_option("--summary", summary_file, "Write the batch summary JSON here");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Synthetic rollout batches and weight dynamics");
  std::string spec_file, sim_format = "jsonl";
  simulate->add_option("spec", spec_file, "Generator spec JSON (default: built-in)");
  simulate->add_option("--format", sim_format, "Output format")->check(CLI::IsMember({"jsonl", "table"}));

  // stats
  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  std::string stats_input, stats_format = "table";
  stats->add_option("input", stats_input, "Pair records JSONL")->required();
  stats->add_option("--format", stats_format, "Output format")->check(CLI::IsMember({"json", "table"}));

  // fit-richness
  auto* fit = app.add_subcommand("fit-richness", "Fit richness prototypes from validation embeddings");
  std::string fit_input;
  int k = 8;
  fit->add_option("input", fit_input, "Embeddings JSONL of {id, vector}")->required();
  fit->add_option("-k", k, "Number of prototypes");

  // print-config
  auto* print = app.add_subcommand("print-config", "Print a built-in configuration");
  std::string which;
  print->add_option("which", which, "Configuration")
      ->required()
      ->check(CLI::IsMember({"registry", "lexicon", "balance", "simulator"}));

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  Output out(o.out);
  auto& os = out.stream();

  if (*score) {
    Loaded l = load(o);
    json record;
    if (!pair_file.empty()) {
      if (pair_file == "-") {
        record = json::parse(std::cin);
      } else {
        record = read_json_arg(pair_file);
      }
    } else if (!original.empty() || !optimized.empty()) {
      record = {{"id", "pair"},
                {"original_smiles", original},
                {"optimized_smiles", optimized},
                {"original_admet", original_admet.empty() ? json::object() : read_json_arg(original_admet)},
                {"optimized_admet", optimized_admet.empty() ? json::object() : read_json_arg(optimized_admet)}};
      if (!reasoning.empty()) record["reasoning"] = reasoning;
      if (!embedding.empty()) record["reasoning_embedding"] = embedding;
      if (energy) record["binding_energy_optimized"] = *energy;
    } else {
      record = json::parse(std::cin);
    }
    PairRecord r;
    try {
      r = record_from_json(record, l.registry);
    } catch (const std::invalid_argument& e) {
      std::cerr << "molreward: invalid record: " << e.what() << '\n';
      return 1;
    }
    const auto ctx = context(l);
    const auto report = evaluate_pair(r, ctx);
    os << pair_report_to_json(report).dump(2) << '\n';
    return report.error ? 1 : 0;
  }

  if (*evaluate_cmd) {
    Loaded l = load(o);
    auto ingested = ingest(input, l.registry);
    if (!embeddings_file.empty()) attach_embeddings(ingested.records, load_embeddings(embeddings_file));
    if (!energies_file.empty()) attach_binding_energies(ingested.records, energies_file);
    if (!rejects_file.empty()) {
      Output rejects(rejects_file);
      for (const auto& rj : ingested.rejects) {
        rejects.stream() << json{{"line", rj.line}, {"reason", rj.reason}}.dump() << '\n';
      }
    }
    for (const auto& rj : ingested.rejects) std::cerr << input << ":" << rj.line << ": rejected: " << rj.reason << '\n';
    const auto report = evaluate(ingested.records, context(l, threads));
    os << (format == "table" ? report_table(report) : report_jsonl(report));
    return 0;
  }

  if (*reweight) {
    const BalanceConfig balance = o.balance.empty() ? BalanceConfig{} : load_balance_config(o.balance);
    const auto records = load_objectives(objectives);
    if (records.empty()) throw ConfigError("'" + objectives + "' holds no trajectories");
    std::vector<ObjectiveVector> vectors;
    for (const auto& r : records) vectors.push_back(r.objectives);
    const auto batch = balance_batch(vectors, balance);
    for (std::size_t i = 0; i < records.size(); ++i) {
      os << json{{"id", records[i].id},
                 {"pareto", static_cast<bool>(batch.weights.frontier[i])},
                 {"raw_weight", batch.weights.raw[i]},
                 {"weight", batch.weights.normalized[i]},
                 {"distances", batch.weights.distances[i]}}
                .dump()
         << '\n';
    }
    const auto s = summarize_weights(batch.weights);
    json boosts = json::object();
    for (std::size_t m = 0; m < kChannelCount; ++m) boosts[std::string(channel_name(m))] = batch.adaptation.channel_boosts[m];
    const json summary{{"step", 0},
                       {"p50", s.p50},
                       {"p90", s.p90},
                       {"p99", s.p99},
                       {"frontier_ratio", s.frontier_ratio},
                       {"channel_boosts", boosts},
                       {"group_scales", batch.adaptation.group_scales}};
    if (summary_file.empty()) {
      std::cerr << summary.dump() << '\n';
    } else {
      Output so(summary_file);
      so.stream() << summary.dump() << '\n';
    }
    return 0;
  }

  if (*simulate) {
    GeneratorSpec spec = spec_file.empty() ? default_generator_spec() : load_generator_spec(spec_file);
    if (o.seed) spec.seed = *o.seed;
    const BalanceConfig balance = o.balance.empty() ? BalanceConfig{} : load_balance_config(o.balance);
    const auto rows = simulate_rl_batches(spec, balance);
    if (sim_format == "table") {
      os << dynamics_table(rows);
    } else {
      for (const auto& r : rows) os << dynamics_row_to_json(r).dump() << '\n';
    }
    return 0;
  }

  if (*stats) {
    const CriteriaRegistry registry = o.registry.empty() ? default_registry() : load_registry(o.registry);
    const auto ingested = ingest(stats_input, registry);
    for (const auto& rj : ingested.rejects) {
      std::cerr << stats_input << ":" << rj.line << ": rejected: " << rj.reason << '\n';
    }
    const auto st = dataset_stats(ingested.records, o.seed.value_or(1));
    if (stats_format == "json") {
      auto j = stats_to_json(st);
      j["rejects"] = ingested.rejects.size();
      os << j.dump(2) << '\n';
    } else {
      os << stats_table(st) << "rejects: " << ingested.rejects.size() << '\n';
    }
    return 0;
  }

  if (*fit) {
    std::vector<std::vector<double>> vectors;
    for (auto& e : load_embeddings(fit_input)) vectors.push_back(std::move(e.vector));
    const auto config = fit_richness_config(vectors, k, o.seed.value_or(kDefaultRichnessSeed));
    os << richness_to_json(config).dump(2) << '\n';
    return 0;
  }

  if (*print) {
    if (which == "registry") os << registry_to_json(default_registry()).dump(2) << '\n';
    if (which == "lexicon") os << lexicon_to_json(default_lexicon()).dump(2) << '\n';
    if (which == "balance") os << balance_to_json(BalanceConfig{}).dump(2) << '\n';
    if (which == "simulator") os << generator_to_json(default_generator_spec()).dump(2) << '\n';
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const molreward::ConfigError& e) {
    std::cerr << "molreward: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "molreward: " << e.what() << '\n';
    return 1;
  }
}
