#include "primnav/harness/harness.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>

#include "primnav/gridworld/geodesic.hpp"
#include "primnav/interpreter/executor.hpp"
#include "primnav/interpreter/registry.hpp"

namespace primnav::harness {

using gridworld::GoalSpec;
using gridworld::Scene;
using gridworld::TaskKind;
using nlohmann::json;

perception::SynonymTable bundled_synonyms() {
  static const auto table = perception::SynonymTable::load(planner::data_dir() / "vocabulary.json");
  return table;
}

json HarnessConfig::echo() const {
  json j;
  j["planner"] = {{"backend", planner::to_string(planner.backend)},
                  {"stub_fault_rate", planner.stub.fault_rate},
                  {"temperature", planner.temperature}};
  if (planner.endpoint) j["planner"]["model"] = planner.endpoint->model;
  j["memory_threshold"] = agent.explorer.threshold.value();
  j["false_negative_rate"] = agent.noise.false_negative_rate;
  j["false_positive_rate"] = agent.noise.false_positive_rate;
  j["answer_mode"] = to_string(answer_mode);
  j["dump_maps"] = dump_maps;
  return j;
}

namespace {

// Multi-source Dijkstra over free cells: each seed starts at its own cost.
std::vector<double> spread(const Scene& scene, const std::vector<std::pair<Cell, double>>& seeds) {
  const auto& g = scene.grid;
  std::vector<double> dist(static_cast<std::size_t>(g.rows()) * g.cols(), kInfinity);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  for (const auto& [c, d] : seeds) {
    if (!g.is_free(c) || !std::isfinite(d)) continue;
    const auto i = g.index(c);
    if (d < dist[i]) {
      dist[i] = d;
      open.push({d, i});
    }
  }
  while (!open.empty()) {
    auto [d, idx] = open.top();
    open.pop();
    if (d > dist[idx]) continue;
    const Cell c{static_cast<int>(idx / g.cols()), static_cast<int>(idx % g.cols())};
    for (const auto& m : gridworld::kMoves8) {
      const Cell n{c.row + m.drow, c.col + m.dcol};
      if (!g.is_free(n)) continue;
      if (m.drow != 0 && m.dcol != 0 && (!g.is_free({c.row + m.drow, c.col}) || !g.is_free({c.row, c.col + m.dcol})))
        continue;
      const double nd = d + m.cost * scene.resolution;
      const auto ni = g.index(n);
      if (nd < dist[ni]) {
        dist[ni] = nd;
        open.push({nd, ni});
      }
    }
  }
  return dist;
}

// Target cells plus the free cells whose centers lie within `radius` of a target object.
std::vector<Cell> goal_region(const Scene& scene, const GoalSpec& goal, double radius) {
  std::vector<Cell> out;
  for (int id : goal.target_ids)
    if (const auto* o = scene.find_object(id)) out.push_back(scene.cell_of(o->position));
  for (int r = 0; r < scene.grid.rows(); ++r)
    for (int c = 0; c < scene.grid.cols(); ++c) {
      const Cell cell{r, c};
      if (scene.grid.is_free(cell) && gridworld::distance_to_targets(scene, goal, scene.center_of(cell)) <= radius)
        out.push_back(cell);
    }
  return out;
}

double optimal_through(const Scene& scene, Point start, const std::vector<GoalSpec>& goals, double radius) {
  std::vector<std::pair<Cell, double>> layer{{scene.cell_of(start), 0.0}};
  for (const auto& goal : goals) {
    const auto dist = spread(scene, layer);
    std::vector<std::pair<Cell, double>> next;
    for (const auto& c : goal_region(scene, goal, radius)) {
      const double d = dist[scene.grid.index(c)];
      if (std::isfinite(d)) next.push_back({c, d});
    }
    if (next.empty()) return kInfinity;
    layer = std::move(next);
  }
  double best = kInfinity;
  for (const auto& [c, d] : layer) best = std::min(best, d);
  return best;
}

// Geodesic from `p` to the nearest target object of `goal`.
double geodesic_to_targets(const Scene& scene, Point p, const GoalSpec& goal) {
  if (!scene.is_free(p) || goal.target_ids.empty()) return kInfinity;
  const auto dist = spread(scene, {{scene.cell_of(p), 0.0}});
  double best = kInfinity;
  for (int id : goal.target_ids)
    if (const auto* o = scene.find_object(id)) best = std::min(best, dist[scene.grid.index(scene.cell_of(o->position))]);
  return best;
}

// Scene object names sharing no token with the goal's targets or its text.
std::vector<std::string> fault_pool(const Scene& scene, const GoalSpec& goal) {
  std::set<std::string> goal_tokens;
  for (auto& t : tokenize(goal.payload)) goal_tokens.insert(t);
  for (int id : goal.target_ids)
    if (const auto* o = scene.find_object(id)) {
      for (auto& t : tokenize(o->category)) goal_tokens.insert(t);
      for (auto& t : tokenize(o->subcategory)) goal_tokens.insert(t);
    }
  std::set<std::string> pool;
  for (const auto& o : scene.objects) {
    if (std::find(goal.target_ids.begin(), goal.target_ids.end(), o.id) != goal.target_ids.end()) continue;
    for (const auto& name : {o.category, o.subcategory}) {
      if (name.empty()) continue;
      const auto toks = tokenize(name);
      if (std::none_of(toks.begin(), toks.end(), [&](const auto& t) { return goal_tokens.count(t) > 0; }))
        pool.insert(to_lower(name));
    }
  }
  return {pool.begin(), pool.end()};
}

std::string sanitize(std::string_view id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out.empty() ? "episode" : out;
}

}  // namespace

double optimal_length_through(const Scene& scene, Point start, const std::vector<GoalSpec>& goals) {
  return optimal_through(scene, start, goals, 0.0);
}

EpisodeRun run_episode(const gridworld::Episode& episode, std::shared_ptr<const Scene> scene,
                       const HarnessConfig& config, std::uint64_t seed) {
  episode.validate();
  scene->validate();
  EpisodeRun run;
  auto& r = run.result;
  r.episode_id = episode.id;
  r.task = episode.task_kind;
  r.seed = seed;

  gridworld::WorldState world(scene, episode);
  const perception::Embedder embedder;
  auto agent_options = config.agent;
  agent_options.noise.seed = mix_seed(seed, 0x6e6f697365ULL);
  interp::Agent agent(world, embedder, agent_options);
  const auto registry = interp::default_registry();
  const bool shared_budget = episode.task_kind == TaskKind::kMultion;
  agent.set_budget(episode.step_budget_per_goal);

  r.per_goal.resize(episode.goals.size());
  int steps_before = 0;
  while (!world.terminated()) {
    const std::size_t gi = world.goal_index();
    const GoalSpec goal = world.current_goal();
    agent.begin_goal();
    if (!shared_budget && gi > 0) agent.set_budget(episode.step_budget_per_goal);

    GoalTrace gt;
    gt.goal_index = gi;
    gt.goal = goal;
    auto popts = config.planner;
    if (popts.backend == planner::Backend::kStub) popts.stub.fault_targets = fault_pool(*scene, goal);
    try {
      auto plan = planner::generate_program(goal, mix_seed(seed, gi + 1), popts);
      gt.program_text = plan.program_text;
      interp::ExecOptions eo;
      eo.record_wall_time = config.record_wall_time;
      if (config.dump_maps && config.out_dir)
        eo.snapshot_stem = (*config.out_dir / "maps" / (sanitize(episode.id) + "_g" + std::to_string(gi))).string();
      gt.trace = interp::execute(plan.program, registry, agent, goal, eo);
      if (goal.kind == gridworld::GoalKind::kQuestion && gt.trace->answer) {
        const auto& a = *gt.trace->answer;
        r.answer = (a.kind() == interp::ValueKind::kText || a.kind() == interp::ValueKind::kAnswer) ? a.text()
                                                                                                     : a.summary();
      }
    } catch (const planner::PlanningError& e) {
      gt.planning_error = e.what();
    }
    run.trace.goals.push_back(std::move(gt));
    if (!world.terminated() && world.goal_index() == gi) world.abandon_goal();

    const auto& rec = world.goal_records()[gi];
    r.per_goal[gi].reached = rec.reached;
    r.per_goal[gi].steps = world.steps_taken() - steps_before;
    r.per_goal[gi].dtg = geodesic_to_targets(*scene, world.pose().position(), goal);
    steps_before = world.steps_taken();
  }
  run.trace.evidence = agent.evidence();

  // Goals never attempted keep reached=false; their DTG is measured from the final pose.
  const auto& records = world.goal_records();
  for (std::size_t i = 0; i < episode.goals.size(); ++i)
    if (!records[i].attempted) r.per_goal[i].dtg = geodesic_to_targets(*scene, world.pose().position(), episode.goals[i]);

  r.steps = world.steps_taken();
  r.agent_path_length = world.path_length();
  const double radius = episode.success_radius;
  const Point start = episode.start_pose.position();
  std::vector<GoalSpec> with_targets;
  for (const auto& g : episode.goals)
    if (!g.target_ids.empty()) with_targets.push_back(g);
  r.optimal_length = with_targets.empty() ? 0.0 : optimal_through(*scene, start, with_targets, radius);

  if (episode.task_kind == TaskKind::kEqa) {
    const auto& truth = episode.goals.front().ground_truth_answer;
    if (truth) {
      try {
        r.sigma = score_answer(r.answer.value_or(""), *truth, config.answer_mode, config.synonyms,
                               config.planner.endpoint);
      } catch (const planner::NetworkError& e) {
        r.error_message = std::string("answer unscored: ") + e.what();
      }
    }
    r.success = r.sigma && *r.sigma >= 3;
    r.progress_fraction = r.success ? 1.0 : 0.0;
    r.optimal_length_reached = r.success ? r.optimal_length : 0.0;
    r.dtg = r.per_goal.front().dtg;
  } else {
    std::vector<GoalSpec> reached;
    std::size_t active = episode.goals.size() - 1;
    bool found_active = false;
    for (std::size_t i = 0; i < episode.goals.size(); ++i) {
      if (r.per_goal[i].reached) {
        reached.push_back(episode.goals[i]);
      } else if (!found_active) {
        active = i;
        found_active = true;
      }
    }
    r.success = reached.size() == episode.goals.size();
    r.progress_fraction = static_cast<double>(reached.size()) / static_cast<double>(episode.goals.size());
    // Reached goals form a prefix (sequential protocol), so the path through them is well defined.
    r.optimal_length_reached = reached.empty() ? 0.0 : optimal_through(*scene, start, reached, radius);
    r.dtg = geodesic_to_targets(*scene, world.pose().position(), episode.goals[active]);
  }

  if (!r.success) {
    const auto c = classify_failure(r, run.trace, episode, *scene, config.synonyms);
    r.failure = c.category;
    r.failure_rule = c.rule;
  }
  return run;
}

std::uint64_t episode_seed(std::uint64_t suite_seed, std::size_t index) { return mix_seed(suite_seed, index); }

SuiteReport run_suite(const std::vector<SuiteEpisode>& episodes, const HarnessConfig& config, std::uint64_t seed,
                      int jobs) {
  if (episodes.empty()) throw ValidationError("suite has no episodes");
  SuiteReport report;
  report.seed = seed;
  report.config = config.echo();
  const auto n = static_cast<std::int64_t>(episodes.size());
  report.results.resize(episodes.size());
  if (config.out_dir) std::filesystem::create_directories(*config.out_dir / "traces");
  if (config.out_dir && config.dump_maps) std::filesystem::create_directories(*config.out_dir / "maps");

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, jobs))
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& se = episodes[static_cast<std::size_t>(i)];
    const auto s = episode_seed(seed, static_cast<std::size_t>(i));
    EpisodeResult res;
    try {
      auto run = run_episode(se.episode, se.scene, config, s);
      res = std::move(run.result);
      res.index = static_cast<std::size_t>(i);
      if (config.out_dir) {
        res.trace_path = "traces/" + std::to_string(i) + "_" + sanitize(se.episode.id) + ".jsonl";
        run.result = res;
        std::ofstream f(*config.out_dir / res.trace_path, std::ios::binary);
        f << episode_trace_jsonl(run);
        if (!f) throw std::runtime_error("cannot write " + res.trace_path);
      }
    } catch (const std::exception& e) {
      res = EpisodeResult{};
      res.index = static_cast<std::size_t>(i);
      res.episode_id = se.episode.id;
      res.task = se.episode.task_kind;
      res.seed = s;
      res.harness_error = true;
      res.error_message = e.what();
    }
    report.results[static_cast<std::size_t>(i)] = std::move(res);
  }
  report.per_task = aggregate(report.results, &report.warnings);
  return report;
}

}  // namespace primnav::harness
