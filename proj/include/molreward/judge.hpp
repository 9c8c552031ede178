#pragma once

// Rationale judges. The stub is a deterministic keyword heuristic for offline
// runs; the remote client posts an OpenAI-style chat completion request.

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "molreward/reasoning.hpp"

namespace molreward {

struct PropertyChange {
  std::string endpoint;
  double original = 0.0;
  double optimized = 0.0;
};

struct JudgeRequest {
  std::string original_smiles;
  std::string optimized_smiles;
  std::string reasoning;
  std::vector<PropertyChange> changes;
};

class JudgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  // Thread-safe. Throws JudgeError when the judge cannot produce scores.
  virtual JudgeSubScores evaluate(const JudgeRequest& request) = 0;
  virtual std::string name() const = 0;
};

class StubJudge final : public JudgeClient {
 public:
  JudgeSubScores evaluate(const JudgeRequest& request) override;
  std::string name() const override { return "stub"; }
};

struct RemoteJudgeConfig {
  std::string url = "http://127.0.0.1:8000";  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "OPENAI_API_KEY";  // header omitted when unset
  double timeout_seconds = 60.0;
  int attempts = 2;  // first try plus one retry
};

RemoteJudgeConfig remote_judge_config_from_json(const nlohmann::json& config);  // throws ConfigError
RemoteJudgeConfig load_remote_judge_config(const std::string& path);

// Fixed instruction text of the logical-coherence judge.
extern const std::string_view kJudgeInstructions;

// Instructions followed by the filled slots and the expected answer format.
std::string build_judge_prompt(const JudgeRequest& request);
nlohmann::json build_judge_body(const RemoteJudgeConfig& config, const JudgeRequest& request);

// Accepts a chat-completion envelope or a bare score object; the score object
// may be embedded in surrounding text. Throws JudgeError if malformed.
JudgeSubScores parse_judge_response(std::string_view body);

class RemoteJudge final : public JudgeClient {
 public:
  explicit RemoteJudge(RemoteJudgeConfig config);
  ~RemoteJudge() override;

  // Requests are serialized; each response belongs to its own call.
  JudgeSubScores evaluate(const JudgeRequest& request) override;
  std::string name() const override { return "remote"; }

 private:
  struct Connection;
  RemoteJudgeConfig config_;
  std::unique_ptr<Connection> connection_;
  std::mutex mutex_;
};

}  // namespace molreward
