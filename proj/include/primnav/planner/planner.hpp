#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "primnav/gridworld/scene.hpp"
#include "primnav/interpreter/program.hpp"
#include "primnav/interpreter/registry.hpp"

namespace primnav::planner {

struct PlanningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NetworkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AuthError : NetworkError {
  using NetworkError::NetworkError;
};

struct InContextExample {
  std::string instruction;
  std::string program;
  // Goal the example runs against on the fixture scene.
  gridworld::GoalSpec goal;
  std::string scene;
};

// The bundled examples, loaded from data/planner/examples.json.
std::vector<InContextExample> load_examples(const std::filesystem::path& path);
const std::vector<InContextExample>& bundled_examples();
std::filesystem::path data_dir();

// Natural-language task line for a goal.
std::string task_text(const gridworld::GoalSpec& goal);

// Preamble (module inventory and instructions), the examples as instruction/program
// pairs, then the task. Byte-stable for fixed inputs. Throws ValidationError on an
// empty example list or an example whose program does not parse.
std::string build_prompt(std::string_view task, const std::vector<InContextExample>& examples,
                         const interp::Registry& registry = interp::default_registry());

// First ``` fenced block; failing that, the first run of consecutive lines that parse
// as statements or comments and contain at least one statement. Empty when none.
std::string extract_program(std::string_view raw);

struct StubOptions {
  // Probability of planning for a wrong target.
  double fault_rate = 0.0;
  // Wrong targets are drawn from here (token-disjoint from the goal); empty uses the
  // built-in object families.
  std::vector<std::string> fault_targets;
};

// Rule-based planner. Deterministic in (goal, seed). Throws PlanningError when the goal
// text matches no rule.
std::string stub_plan(const gridworld::GoalSpec& goal, std::uint64_t seed, const StubOptions& options = {});

struct PlannerRequest {
  std::string prompt;
  double temperature = 0.0;
  std::string model;
};

struct PlannerResponse {
  std::string raw;
  std::string program_text;
  nlohmann::json metadata;
};

struct EndpointConfig {
  std::string url;  // full chat-completions URL
  std::string api_key;
  std::string model = "gpt-4o";
  int timeout_seconds = 60;
  bool verbose = false;

  // PRIMNAV_LLM_URL, PRIMNAV_LLM_KEY, PRIMNAV_LLM_MODEL. Throws ValidationError when the
  // URL is unset.
  static EndpointConfig from_env();
};

// One chat-completions round trip. Throws AuthError on 401/403, NetworkError otherwise.
PlannerResponse call_endpoint(const EndpointConfig& config, const PlannerRequest& request);

// Content-addressed response store: one file per (model, prompt) under `dir`, written
// atomically. Unreadable or mismatching entries count as misses.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);
  std::optional<std::string> get(std::string_view prompt, std::string_view model) const;
  void put(std::string_view prompt, std::string_view model, std::string_view response);
  std::filesystem::path path_for(std::string_view prompt, std::string_view model) const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex write_mu_;
};

std::string sha256_hex(std::string_view data);

enum class Backend { kStub, kEndpoint };
std::string to_string(Backend b);
Backend backend_from_string(std::string_view s);

struct PlannerOptions {
  Backend backend = Backend::kStub;
  StubOptions stub;
  std::optional<EndpointConfig> endpoint;
  std::optional<std::filesystem::path> cache_dir;
  double temperature = 0.0;
};

struct PlanResult {
  interp::Program program;
  std::string program_text;
  std::string prompt;
  bool cache_hit = false;
  int attempts = 0;
};

// Builds the prompt and produces a parsed program. The endpoint backend retries once
// with an "output only the program" reminder when the reply does not parse, then
// throws PlanningError.
PlanResult generate_program(const gridworld::GoalSpec& goal, std::uint64_t seed, const PlannerOptions& options);

}  // namespace primnav::planner
