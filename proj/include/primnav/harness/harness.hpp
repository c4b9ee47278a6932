#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "primnav/interpreter/agent.hpp"
#include "primnav/interpreter/trace.hpp"
#include "primnav/perception/vocabulary.hpp"
#include "primnav/planner/planner.hpp"

namespace primnav::harness {

enum class FailureCategory {
  kPlannerWrongTarget,
  kPlannerBadProgram,
  kStoppedAtWrongObject,
  kIgnoredGoalObject,
  kDidntSeeTarget,
  kTimeout,
};
inline constexpr int kFailureCategoryCount = 6;

std::string to_string(FailureCategory c);
FailureCategory failure_category_from_string(std::string_view s);

struct GoalResult {
  bool reached = false;
  int steps = 0;
  double dtg = 0.0;
};

struct EpisodeResult {
  std::size_t index = 0;
  std::string episode_id;
  gridworld::TaskKind task = gridworld::TaskKind::kOvon;
  std::uint64_t seed = 0;
  bool success = false;
  double agent_path_length = 0.0;
  double optimal_length = 0.0;          // through every goal, in order
  double optimal_length_reached = 0.0;  // through the goals reached, in order
  std::vector<GoalResult> per_goal;
  double progress_fraction = 0.0;
  double dtg = 0.0;  // +inf when the active goal's targets are unreachable
  int steps = 0;
  std::optional<std::string> answer;
  std::optional<int> sigma;
  std::optional<FailureCategory> failure;
  std::string failure_rule;  // which classification rule fired
  bool harness_error = false;
  std::string error_message;
  std::string trace_path;
};

enum class AnswerMode { kExact, kConstrained, kJudge };
std::string to_string(AnswerMode m);
AnswerMode answer_mode_from_string(std::string_view s);

struct HarnessConfig {
  planner::PlannerOptions planner;
  interp::AgentOptions agent;
  AnswerMode answer_mode = AnswerMode::kConstrained;
  perception::SynonymTable synonyms;
  // Traces (and map dumps) go here when set.
  std::optional<std::filesystem::path> out_dir;
  bool dump_maps = false;
  bool record_wall_time = false;

  nlohmann::json echo() const;
};

// Synonyms bundled in data/vocabulary.json.
perception::SynonymTable bundled_synonyms();

struct GoalTrace {
  std::size_t goal_index = 0;
  gridworld::GoalSpec goal;
  std::string program_text;
  std::optional<std::string> planning_error;
  std::optional<interp::Trace> trace;
};

struct EpisodeTrace {
  std::vector<GoalTrace> goals;
  interp::Evidence evidence;
};

struct EpisodeRun {
  EpisodeResult result;
  EpisodeTrace trace;
};

// Plans and executes each goal of the episode under its task protocol and scores it.
// Never throws for agent or program faults; those become result fields.
EpisodeRun run_episode(const gridworld::Episode& episode, std::shared_ptr<const gridworld::Scene> scene,
                       const HarnessConfig& config, std::uint64_t seed);

// Shortest 8-connected path from `start` through one target of each goal, in order.
double optimal_length_through(const gridworld::Scene& scene, Point start, const std::vector<gridworld::GoalSpec>& goals);

// Mean over results of S * l / max(p, l), in percent. Throws ValidationError when any
// optimal length is missing (non-positive or non-finite).
double compute_spl(const std::vector<EpisodeResult>& results);

struct ProgressPpl {
  double progress = 0.0;
  double ppl = 0.0;
};
ProgressPpl compute_progress_ppl(const std::vector<EpisodeResult>& results);

struct DtgSummary {
  double mean = 0.0;
  int excluded = 0;  // episodes with an unreachable target, left out of the mean
};
DtgSummary compute_dtg(const std::vector<EpisodeResult>& results);

// (1/N) sum (sigma - 1) / 4 * 100. Throws ValidationError for an empty list or sigma
// outside 1..5.
double llm_match_score(const std::vector<int>& sigmas);

// 5 for a match, 1 otherwise (judge mode returns the judge's 1..5). Constrained mode maps
// both texts through the synonym table and also accepts either containing the other as
// a phrase. Judge mode throws NetworkError when the endpoint cannot be reached.
int score_answer(std::string_view answer, std::string_view truth, AnswerMode mode,
                 const perception::SynonymTable& synonyms = {},
                 const std::optional<planner::EndpointConfig>& judge = std::nullopt);

struct Classification {
  FailureCategory category = FailureCategory::kTimeout;
  std::string rule;
};

// Priority-ordered rules over the trace evidence. Throws ProtocolError for a success.
Classification classify_failure(const EpisodeResult& result, const EpisodeTrace& trace,
                                const gridworld::Episode& episode, const gridworld::Scene& scene,
                                const perception::SynonymTable& synonyms = {});

struct TaskAggregate {
  gridworld::TaskKind task = gridworld::TaskKind::kOvon;
  int episodes = 0;
  double sr = 0.0;
  double spl = 0.0;
  double progress = 0.0;
  double ppl = 0.0;
  double dtg = 0.0;
  int dtg_excluded = 0;
  std::optional<double> score;  // eqa only
  int unscored = 0;
  int harness_errors = 0;
  std::map<FailureCategory, int> failures;
};

struct SuiteReport {
  std::vector<EpisodeResult> results;  // by episode index
  std::vector<TaskAggregate> per_task;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

struct SuiteEpisode {
  gridworld::Episode episode;
  std::shared_ptr<const gridworld::Scene> scene;
};

// Per-episode seed used by run_suite.
std::uint64_t episode_seed(std::uint64_t suite_seed, std::size_t index);

// Runs all episodes (OpenMP, `jobs` threads) and aggregates in index order. The report
// depends only on the inputs and seed, not on `jobs`. Episodes that throw are recorded
// as harness errors. Throws ValidationError for an empty suite.
SuiteReport run_suite(const std::vector<SuiteEpisode>& episodes, const HarnessConfig& config, std::uint64_t seed,
                      int jobs = 1);

// Aggregates from stored rows alone.
std::vector<TaskAggregate> aggregate(const std::vector<EpisodeResult>& results, std::vector<std::string>* warnings = nullptr);

// Columns: index, episode_id, task, seed, success, agent_path_length, optimal_length,
// optimal_length_reached, goals, goals_reached, progress, dtg, steps, answer, sigma,
// failure_category, failure_rule, harness_error, trace. Reals are written with 17
// significant digits so rows reload exactly.
std::string results_csv(const std::vector<EpisodeResult>& results);
std::vector<EpisodeResult> parse_results_csv(std::string_view text);
nlohmann::json summary_json(const SuiteReport& report);
std::string aggregate_line(const TaskAggregate& a);
// Writes results.csv and summary.json under `dir`.
void write_report(const SuiteReport& report, const std::filesystem::path& dir);

// Episode trace file: per goal a {"record":"goal"} line, the statement records and the
// terminal, then one {"record":"episode"} line with the outcome and failure rule.
std::string episode_trace_jsonl(const EpisodeRun& run);

struct TraceFileGoal {
  nlohmann::json header;
  interp::Trace trace;
};
struct TraceFile {
  std::vector<TraceFileGoal> goals;
  nlohmann::json episode;
};
// Throws FormatError naming the line of a malformed record.
TraceFile parse_episode_trace(std::string_view text);

}  // namespace primnav::harness
