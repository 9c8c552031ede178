#include "molreward/judge.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "httplib.h"
#include "molreward/error.hpp"

namespace molreward {

using nlohmann::json;

const std::string_view kJudgeInstructions =
    R"(You are an expert in logical analysis. Please evaluate the logical coherence of the following molecular optimization rationale.
Please assess the following key aspects:
1) Alignment between problem identification and proposed solution (score 0-1, where 1 = perfect alignment)
- Are the identified problems clearly stated?
- Does the proposed solution directly address these problems?
- Is there any mismatch such as "Problem A is raised, but the solution targets Problem B"?
2) Alignment between the proposed solution and the SMILES edits (score 0-1, where 1 = perfect alignment)
- Is the modification strategy reflected in the SMILES?
- Do the actual edits match the described strategy?
- Is there any mismatch such as "Claims to add a substituent, but actually removes one"?
3) Completeness of the overall logical chain (score 0-1, where 1 = complete)
Is the chain "problem -> strategy -> modification -> expected effect" coherent and continuous?
4) Accuracy of causal reasoning (score 0-1, where 1 = accurate)
Is the "because X, therefore Y" reasoning sound? Is there any reversal of cause and effect?)";

namespace {

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Number of distinct stems that prefix some word.
int stem_hits(const std::vector<std::string>& ws, std::initializer_list<std::string_view> stems) {
  int hits = 0;
  for (auto stem : stems) {
    for (const auto& w : ws) {
      if (w.compare(0, stem.size(), stem) == 0) {
        ++hits;
        break;
      }
    }
  }
  return hits;
}

std::string trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

JudgeSubScores StubJudge::evaluate(const JudgeRequest& request) {
  const auto ws = words(request.reasoning);
  const bool problem = stem_hits(ws, {"liabilit", "risk", "poor", "toxic", "issue", "concern", "problem", "limit",
                                      "excessive", "high", "low"}) > 0;
  const bool strategy = stem_hits(ws, {"replac", "introduc", "add", "remov", "substitut", "cycliz", "block", "install",
                                       "swap", "convert", "mask", "fluorin", "methylat", "truncat", "rigidif"}) > 0;
  const bool effect =
      stem_hits(ws, {"improv", "enhanc", "decreas", "reduc", "lower", "increas", "better", "mitigat"}) > 0;
  const int causal = stem_hits(ws, {"because", "therefore", "thus", "hence", "due", "leads", "so", "since",
                                    "consequently", "result", "which"});
  const bool edited = trimmed(request.original_smiles) != trimmed(request.optimized_smiles);

  JudgeSubScores s;
  s.problem_solution = 0.25 + (problem ? 0.375 : 0.0) + (strategy ? 0.375 : 0.0);
  s.solution_edit = !strategy ? 0.5 : (edited ? 0.9 : 0.2);
  s.chain_completeness = (problem + strategy + edited + effect) / 4.0;
  s.causal_accuracy = std::min(1.0, 0.4 + 0.2 * causal);
  if (strategy && !edited) s.flags.insert(CriticalFailure::kEditRationaleContradiction);
  return s;
}

RemoteJudgeConfig remote_judge_config_from_json(const json& config) {
  RemoteJudgeConfig c;
  try {
    c.url = config.value("url", c.url);
    c.path = config.value("path", c.path);
    c.model = config.value("model", c.model);
    c.api_key_env = config.value("api_key_env", c.api_key_env);
    c.timeout_seconds = config.value("timeout_seconds", c.timeout_seconds);
    c.attempts = config.value("attempts", c.attempts);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("judge config: ") + e.what());
  }
  if (c.url.empty()) throw ConfigError("judge config: url is empty");
  if (!(c.timeout_seconds > 0.0)) throw ConfigError("judge config: timeout_seconds must be > 0");
  if (c.attempts < 1) throw ConfigError("judge config: attempts must be >= 1");
  return c;
}

RemoteJudgeConfig load_remote_judge_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open judge config '" + path + "'");
  try {
    return remote_judge_config_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("judge config '" + path + "': " + e.what());
  }
}

std::string build_judge_prompt(const JudgeRequest& request) {
  std::ostringstream out;
  out << kJudgeInstructions << "\n\n";
  out << "Original SMILES: " << request.original_smiles << '\n';
  out << "Optimized SMILES: " << request.optimized_smiles << '\n';
  out << "Predicted property changes (original -> optimized):\n";
  if (request.changes.empty()) out << "- none reported\n";
  for (const auto& c : request.changes) {
    out << "- " << c.endpoint << ": " << json(c.original).dump() << " -> " << json(c.optimized).dump() << '\n';
  }
  out << "Rationale:\n" << request.reasoning << "\n\n";
  out << "List critical failures, if any, using only these names: edit-rationale-contradiction, "
         "chemical-misconception.\n";
  out << "Answer with one JSON object and nothing else:\n"
         R"({"problem_solution": <0-1>, "solution_edit": <0-1>, "chain_completeness": <0-1>, )"
         R"("causal_accuracy": <0-1>, "critical_failures": [<names>]})";
  return out.str();
}

json build_judge_body(const RemoteJudgeConfig& config, const JudgeRequest& request) {
  return json{{"model", config.model},
              {"temperature", 0},
              {"messages", json::array({json{{"role", "user"}, {"content", build_judge_prompt(request)}}})}};
}

namespace {

JudgeSubScores scores_from(const json& j) {
  JudgeSubScores s;
  auto read = [&](const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw JudgeError(std::string("judge field '") + key + "' is not a number");
    return v.get<double>();
  };
  s.problem_solution = read("problem_solution");
  s.solution_edit = read("solution_edit");
  s.chain_completeness = read("chain_completeness");
  s.causal_accuracy = read("causal_accuracy");
  if (j.contains("critical_failures")) {
    for (const auto& f : j.at("critical_failures")) s.flags.insert(critical_failure_from(f.get<std::string>()));
  }
  validate_sub_scores(s);
  return s;
}

}  // namespace

JudgeSubScores parse_judge_response(std::string_view body) {
  try {
    json j = json::parse(body);
    if (j.is_object() && j.contains("choices")) {
      const std::string content = j.at("choices").at(0).at("message").at("content").get<std::string>();
      const auto b = content.find('{');
      const auto e = content.rfind('}');
      if (b == std::string::npos || e == std::string::npos || e < b) {
        throw JudgeError("judge reply contains no JSON object");
      }
      j = json::parse(content.substr(b, e - b + 1));
    }
    if (!j.is_object()) throw JudgeError("judge reply is not a JSON object");
    return scores_from(j);
  } catch (const JudgeError&) {
    throw;
  } catch (const std::exception& e) {
    throw JudgeError(std::string("malformed judge reply: ") + e.what());
  }
}

struct RemoteJudge::Connection {
  explicit Connection(const RemoteJudgeConfig& c) : client(c.url) {
    const auto to = std::chrono::duration<double>(c.timeout_seconds);
    const auto us = std::chrono::duration_cast<std::chrono::microseconds>(to);
    client.set_connection_timeout(us);
    client.set_read_timeout(us);
    client.set_write_timeout(us);
    client.set_keep_alive(true);
  }
  httplib::Client client;
};

RemoteJudge::RemoteJudge(RemoteJudgeConfig config)
    : config_(std::move(config)), connection_(std::make_unique<Connection>(config_)) {}

RemoteJudge::~RemoteJudge() = default;

JudgeSubScores RemoteJudge::evaluate(const JudgeRequest& request) {
  const std::string body = build_judge_body(config_, request).dump();
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  std::lock_guard lock(mutex_);
  std::string last_error;
  for (int attempt = 0; attempt < config_.attempts; ++attempt) {
    auto res = connection_->client.Post(config_.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "judge returned HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      return parse_judge_response(res->body);
    } catch (const JudgeError& e) {
      last_error = e.what();
    }
  }
  throw JudgeError(last_error + " (after " + std::to_string(config_.attempts) + " attempts)");
}

}  // namespace molreward
