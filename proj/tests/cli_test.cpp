// Drives the molreward executable end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "molreward/admet.hpp"
#include "molreward/pareto.hpp"
#include "molreward/reasoning.hpp"
#include "molreward/simulator.hpp"
#include "test_data.hpp"

namespace {

using molreward::testing::data_path;
using nlohmann::json;

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& input = "") {
  std::string cmd = std::string(MOLREWARD_CLI) + " " + args + " 2>/dev/null";
  if (!input.empty()) cmd = "printf '%s' '" + input + "' | " + cmd;
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kPair =
    R"({"id":"p","original_smiles":"CCO","optimized_smiles":"CCN","original_admet":{"logP":9},"optimized_admet":{"logP":2}})";

TEST(Cli, Version) {
  auto r = run("--version");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, std::string(MOLREWARD_VERSION) + "\n");
}

TEST(Cli, ScoreFromStdin) {
  auto r = run("score", kPair);
  ASSERT_EQ(r.status, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["score"], 1.0);
  EXPECT_EQ(j["original_liabilities"], json::array({"logP"}));
}

TEST(Cli, ScoreFromFlags) {
  auto r = run(R"(score --original CCO --optimized CCN --original-admet '{"logP": 9}' --optimized-admet '{"logP": 2}')");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(json::parse(r.out)["score"], 1.0);
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run("--registry /nonexistent/registry.json score", kPair).status, 2);
  EXPECT_EQ(run("--lexicon /nonexistent/lexicon.json score", kPair).status, 2);
  EXPECT_EQ(run("--judge remote --judge-config /nonexistent/judge.json score", kPair).status, 2);
  EXPECT_EQ(run("reweight /dev/null").status, 2);
}

TEST(Cli, PerPairFailureExitsOne) {
  auto r = run("score",
               R"({"id":"p","original_smiles":"CCO","optimized_smiles":"CCN","original_admet":{"MW":300},"optimized_admet":{"TPSA":40}})");
  EXPECT_EQ(r.status, 1);
}

TEST(Cli, EvaluateReproducesGoldenReport) {
  auto r = run("--richness-config " + data_path("golden_richness.json") + " evaluate " +
               data_path("golden_pairs.jsonl") + " --embeddings " + data_path("golden_embeddings.jsonl") +
               " --energies " + data_path("golden_energies.jsonl") + " --threads 2");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out, slurp(data_path("golden_report.jsonl")));
}

TEST(Cli, PrintConfigMatchesShippedFiles) {
  auto printed = [](const char* name) {
    auto r = run(std::string("print-config ") + name);
    EXPECT_EQ(r.status, 0) << name;
    return json::parse(r.out);
  };
  auto shipped = [](const char* name) { return std::string(MOLREWARD_CONFIG_DIR) + "/" + name + ".json"; };
  EXPECT_EQ(molreward::registry_from_json(printed("registry")), molreward::load_registry(shipped("registry")));
  EXPECT_EQ(molreward::lexicon_from_json(printed("lexicon")), molreward::load_lexicon(shipped("lexicon")));
  EXPECT_EQ(molreward::balance_from_json(printed("balance")), molreward::load_balance_config(shipped("balance")));
  EXPECT_EQ(molreward::generator_to_json(molreward::generator_from_json(printed("simulator"))),
            molreward::generator_to_json(molreward::load_generator_spec(shipped("simulator"))));
}

TEST(Cli, SimulateTableHasAllLoggedSteps) {
  auto r = run("simulate");
  ASSERT_EQ(r.status, 0);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 13);
}

}  // namespace
