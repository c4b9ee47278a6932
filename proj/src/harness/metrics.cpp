#include <algorithm>
#include <cmath>
#include <set>

#include "primnav/harness/harness.hpp"

namespace primnav::harness {

namespace {
constexpr const char* kCategoryNames[] = {"planner_wrong_target", "planner_bad_program", "stopped_at_wrong_object",
                                          "ignored_goal_object",  "didnt_see_target",    "timeout"};

bool valid_optimal(double l) { return std::isfinite(l) && l > 0.0; }

double weight(double optimal, double agent) {
  const double denom = std::max(agent, optimal);
  return denom > 0.0 ? optimal / denom : 1.0;
}
}  // namespace

std::string to_string(FailureCategory c) { return kCategoryNames[static_cast<int>(c)]; }

FailureCategory failure_category_from_string(std::string_view s) {
  for (int i = 0; i < kFailureCategoryCount; ++i)
    if (s == kCategoryNames[i]) return static_cast<FailureCategory>(i);
  throw FormatError("unknown failure category '" + std::string(s) + "'");
}

std::string to_string(AnswerMode m) {
  switch (m) {
    case AnswerMode::kExact: return "exact";
    case AnswerMode::kConstrained: return "constrained";
    case AnswerMode::kJudge: return "judge";
  }
  return "?";
}

AnswerMode answer_mode_from_string(std::string_view s) {
  if (s == "exact") return AnswerMode::kExact;
  if (s == "constrained") return AnswerMode::kConstrained;
  if (s == "judge") return AnswerMode::kJudge;
  throw ValidationError("unknown answer mode '" + std::string(s) + "'");
}

double compute_spl(const std::vector<EpisodeResult>& results) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : results) {
    if (!valid_optimal(r.optimal_length))
      throw ValidationError("episode '" + r.episode_id + "' has no usable optimal path length");
    if (r.success) sum += r.optimal_length / std::max(r.agent_path_length, r.optimal_length);
  }
  return sum / static_cast<double>(results.size()) * 100.0;
}

ProgressPpl compute_progress_ppl(const std::vector<EpisodeResult>& results) {
  ProgressPpl out;
  if (results.empty()) return out;
  for (const auto& r : results) {
    out.progress += r.progress_fraction;
    if (r.progress_fraction > 0.0) out.ppl += r.progress_fraction * weight(r.optimal_length_reached, r.agent_path_length);
  }
  const double n = static_cast<double>(results.size());
  out.progress = out.progress / n * 100.0;
  out.ppl = out.ppl / n * 100.0;
  return out;
}

DtgSummary compute_dtg(const std::vector<EpisodeResult>& results) {
  DtgSummary out;
  double sum = 0.0;
  int n = 0;
  for (const auto& r : results) {
    if (!std::isfinite(r.dtg)) {
      ++out.excluded;
      continue;
    }
    sum += r.dtg;
    ++n;
  }
  out.mean = n ? sum / n : 0.0;
  return out;
}

double llm_match_score(const std::vector<int>& sigmas) {
  if (sigmas.empty()) throw ValidationError("llm_match_score needs at least one score");
  double sum = 0.0;
  for (int s : sigmas) {
    if (s < 1 || s > 5) throw ValidationError("score " + std::to_string(s) + " is outside 1..5");
    sum += (s - 1) / 4.0;
  }
  return sum / static_cast<double>(sigmas.size()) * 100.0;
}

namespace {

bool contains_phrase(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

int score_answer(std::string_view answer, std::string_view truth, AnswerMode mode,
                 const perception::SynonymTable& synonyms, const std::optional<planner::EndpointConfig>& judge) {
  switch (mode) {
    case AnswerMode::kExact:
      return tokenize(answer) == tokenize(truth) && !tokenize(truth).empty() ? 5 : 1;
    case AnswerMode::kConstrained: {
      const auto a = synonyms.canonical_tokens(answer);
      const auto t = synonyms.canonical_tokens(truth);
      if (a.empty() || t.empty()) return 1;
      return a == t || contains_phrase(a, t) || contains_phrase(t, a) ? 5 : 1;
    }
    case AnswerMode::kJudge: {
      if (!judge) throw ValidationError("judge scoring needs an endpoint configuration");
      const std::string prompt =
          "Rate how well the answer matches the ground truth on a scale of 1 to 5, where 5 means the same "
          "meaning and 1 means unrelated. Reply with the digit only.\nGround truth: " +
          std::string(truth) + "\nAnswer: " + std::string(answer) + "\nScore:";
      const auto reply = planner::call_endpoint(*judge, {prompt, 0.0, judge->model}).raw;
      for (char c : reply)
        if (c >= '1' && c <= '5') return c - '0';
      throw planner::NetworkError("judge reply has no score: '" + reply + "'");
    }
  }
  return 1;
}

std::vector<TaskAggregate> aggregate(const std::vector<EpisodeResult>& results, std::vector<std::string>* warnings) {
  std::map<gridworld::TaskKind, std::vector<EpisodeResult>> by_task;
  std::map<gridworld::TaskKind, int> errors;
  for (const auto& r : results) {
    if (r.harness_error) {
      ++errors[r.task];
      by_task[r.task];
      continue;
    }
    by_task[r.task].push_back(r);
  }
  std::vector<TaskAggregate> out;
  for (const auto& [task, rows] : by_task) {
    TaskAggregate a;
    a.task = task;
    a.episodes = static_cast<int>(rows.size());
    a.harness_errors = errors[task];
    if (!rows.empty()) {
      int successes = 0;
      std::vector<EpisodeResult> with_optimal;
      std::vector<int> sigmas;
      for (const auto& r : rows) {
        successes += r.success ? 1 : 0;
        if (valid_optimal(r.optimal_length)) with_optimal.push_back(r);
        if (r.sigma) sigmas.push_back(*r.sigma);
        else if (task == gridworld::TaskKind::kEqa) ++a.unscored;
        if (r.failure) ++a.failures[*r.failure];
      }
      a.sr = 100.0 * successes / static_cast<double>(rows.size());
      // SPL averages over episodes with a usable optimal length; the rest count as zero.
      a.spl = with_optimal.empty() ? 0.0
                                   : compute_spl(with_optimal) * static_cast<double>(with_optimal.size()) /
                                         static_cast<double>(rows.size());
      const auto pp = compute_progress_ppl(rows);
      a.progress = pp.progress;
      a.ppl = pp.ppl;
      const auto d = compute_dtg(rows);
      a.dtg = d.mean;
      a.dtg_excluded = d.excluded;
      if (!sigmas.empty()) a.score = llm_match_score(sigmas);
      if (warnings) {
        const auto name = gridworld::to_string(task);
        if (d.excluded)
          warnings->push_back(name + ": " + std::to_string(d.excluded) + " episode(s) with unreachable targets left out of DTG");
        if (with_optimal.size() != rows.size())
          warnings->push_back(name + ": " + std::to_string(rows.size() - with_optimal.size()) +
                              " episode(s) without an optimal path length count as SPL 0");
        if (a.unscored) warnings->push_back(name + ": " + std::to_string(a.unscored) + " answer(s) unscored");
      }
    }
    if (warnings && a.harness_errors)
      warnings->push_back(gridworld::to_string(task) + ": " + std::to_string(a.harness_errors) + " harness error(s)");
    out.push_back(std::move(a));
  }
  return out;
}

Classification classify_failure(const EpisodeResult& result, const EpisodeTrace& trace,
                                const gridworld::Episode& episode, const gridworld::Scene& scene,
                                const perception::SynonymTable& synonyms) {
  if (result.success) throw ProtocolError("classify_failure called on a successful episode");
  std::size_t fi = episode.goals.size() - 1;
  if (episode.task_kind == gridworld::TaskKind::kEqa) {
    fi = 0;
  } else {
    for (std::size_t i = 0; i < result.per_goal.size(); ++i)
      if (!result.per_goal[i].reached) {
        fi = i;
        break;
      }
  }
  const auto& goal = episode.goals.at(fi);
  const GoalTrace* gt = nullptr;
  for (const auto& g : trace.goals)
    if (g.goal_index == fi) gt = &g;

  // Rule 1: the program searched only for things unrelated to the goal.
  std::set<std::string> goal_tokens;
  auto add_tokens = [&](std::string_view text) {
    for (const auto& phrase : synonyms.expand(to_lower(text)))
      for (auto& t : tokenize(phrase)) goal_tokens.insert(t);
  };
  for (int id : goal.target_ids)
    if (const auto* o = scene.find_object(id)) {
      add_tokens(o->category);
      if (!o->subcategory.empty()) add_tokens(o->subcategory);
    }
  if (goal.kind == gridworld::GoalKind::kCategory || goal.kind == gridworld::GoalKind::kDescription)
    for (auto& t : tokenize(goal.payload))
      if (t != "the" && t != "a" && t != "an") goal_tokens.insert(t);
  std::set<std::string> query_tokens;
  if (gt && gt->trace)
    for (const auto& rec : gt->trace->records) {
      if (rec.module != "explore_scene" && rec.module != "detect") continue;
      for (const auto& [name, v] : rec.inputs)
        if ((name == "target" || name == "query") &&
            (v.kind() == interp::ValueKind::kText || v.kind() == interp::ValueKind::kAnswer))
          for (auto& t : tokenize(v.text())) query_tokens.insert(t);
    }
  if (!query_tokens.empty() &&
      std::none_of(query_tokens.begin(), query_tokens.end(), [&](const auto& t) { return goal_tokens.count(t) > 0; }))
    return {FailureCategory::kPlannerWrongTarget, "1: queries share no token with the goal"};

  // Rule 2: the program could not be produced or crashed.
  if (!gt || gt->planning_error) return {FailureCategory::kPlannerBadProgram, "2: no program for the goal"};
  if (gt->trace && gt->trace->terminal.kind == interp::TerminalKind::kRuntimeError)
    return {FailureCategory::kPlannerBadProgram, "2: program ended with " + gt->trace->terminal.error_kind};

  const auto& targets = goal.target_ids;
  auto is_target = [&](int id) { return std::find(targets.begin(), targets.end(), id) != targets.end(); };

  // Rule 3: stopped next to something else the detector had reported.
  for (const auto& ev : trace.evidence.found_events)
    if (ev.goal_index == fi && !ev.reached &&
        std::any_of(ev.nearby_detected.begin(), ev.nearby_detected.end(), [&](int id) { return !is_target(id); }))
      return {FailureCategory::kStoppedAtWrongObject, "3: found declared beside a non-target detection"};

  const bool sighted = std::any_of(targets.begin(), targets.end(),
                                   [&](int id) { return trace.evidence.sighted_targets.count(id) > 0; });
  const bool detected = std::any_of(targets.begin(), targets.end(),
                                    [&](int id) { return trace.evidence.detected_targets.count(id) > 0; });
  if (sighted && !detected) return {FailureCategory::kIgnoredGoalObject, "4: target in view but never detected"};
  if (!sighted) return {FailureCategory::kDidntSeeTarget, "5: target never in view"};
  return {FailureCategory::kTimeout, "6: target seen and detected but not reached"};
}

}  // namespace primnav::harness
