// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero when any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "program_gen.hpp"
#include "primnav/explorer/explorer.hpp"
#include "primnav/explorer/kernels.hpp"
#include "primnav/gridworld/geodesic.hpp"
#include "primnav/gridworld/scene_io.hpp"
#include "primnav/harness/suite.hpp"
#include "primnav/interpreter/executor.hpp"
#include "primnav/interpreter/registry.hpp"
#include "primnav/pointnav/pointnav.hpp"

using namespace primnav;
using namespace primnav::harness;
using gridworld::Action;
using gridworld::GoalKind;
using gridworld::TaskKind;

namespace {

// Pinned tolerances.
constexpr double kAblationMinSrGain = 3.0;
constexpr double kAblationMinPplGain = 1.0;
constexpr double kAblationMaxSeconds = 300.0;
constexpr double kScoreTol = 1e-12;
constexpr double kCosineTol = 1e-9;
constexpr double kSplTol = 1e-12;
constexpr double kNavSlack = 1.1;
constexpr double kOrderTol = 1e-9;

int failures = 0;

void report(int n, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", n, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// SPL <= SR and PPL <= Progress on every suite this binary runs.
int suites_checked = 0;
int order_violations = 0;
void check_order(const SuiteReport& r) {
  ++suites_checked;
  for (const auto& a : r.per_task)
    if (a.spl > a.sr + kOrderTol || a.ppl > a.progress + kOrderTol) ++order_violations;
}

const TaskAggregate& only(const SuiteReport& r) {
  if (r.per_task.size() != 1) throw std::runtime_error("expected a single-task suite");
  return r.per_task.front();
}

HarnessConfig config(double threshold = 0.4) {
  HarnessConfig c;
  c.synonyms = bundled_synonyms();
  c.agent.explorer.threshold = explorer::MemoryThreshold(threshold);
  return c;
}

std::vector<SuiteEpisode> generated(TaskKind task, int scenes, int per_scene, std::uint64_t seed) {
  SuiteConfig c;
  c.seed = seed;
  c.scenes = scenes;
  c.episodes.task = task;
  c.episodes.count = per_scene;
  c.generator.name = gridworld::to_string(task);
  if (task == TaskKind::kMultion) c.generator.required["cylinder"] = 5;
  return flatten(generate_suite(c));
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto eps = flatten(generate_suite(load_suite_config(bundled_multion_config())));
  const auto none = run_suite(eps, config(1.0), 7, 1);
  const auto mem = run_suite(eps, config(0.4), 7, 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  check_order(none);
  check_order(mem);
  const auto& a = only(none);
  const auto& b = only(mem);
  const double dsr = b.sr - a.sr, dppl = b.ppl - a.ppl;
  const bool ok = eps.size() == 200 && dsr >= kAblationMinSrGain && dppl >= kAblationMinPplGain &&
                  secs <= kAblationMaxSeconds;
  report(1, "memory ablation", ok,
         fmt("%zu episodes, SR %.2f -> %.2f (%+.2f, need >= %+.1f), PPL %.2f -> %.2f (%+.2f, need >= %+.1f), "
             "both arms %.1f s (limit %.0f s)",
             eps.size(), a.sr, b.sr, dsr, kAblationMinSrGain, a.ppl, b.ppl, dppl, kAblationMinPplGain, secs,
             kAblationMaxSeconds));
}

void criterion_2() {
  long vectors = 0;
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    long total = 1;
    for (int i = 0; i < n; ++i) total *= 5;
    for (long code = 0; code < total; ++code) {
      std::vector<int> s;
      long c = code;
      long sum = 0;
      for (int i = 0; i < n; ++i) {
        s.push_back(static_cast<int>(c % 5) + 1);
        sum += c % 5;
        c /= 5;
      }
      const double closed = 100.0 * static_cast<double>(sum) / (4.0 * n);
      worst = std::max(worst, std::abs(llm_match_score(s) - closed));
      ++vectors;
    }
  }
  report(2, "LLM-match exactness", worst <= kScoreTol,
         fmt("%ld sigma vectors (n <= 4), max |error| %.3g (tol %.0e)", vectors, worst, kScoreTol));
}

void criterion_3() {
  const perception::Embedder emb;
  const auto target = emb.embed_text("red cylinder");
  const explorer::MapGeometry g{12, 12, 0.25, {0.0, 0.0}};
  explorer::FeatureMap f(g, emb.dim());
  const Cell plant{7, 4};
  f.set(g.index(plant), target.components, 1.0);
  // a vector orthogonal to the target
  std::vector<double> orth(static_cast<std::size_t>(emb.dim()), 0.0);
  orth[0] = target.components[1];
  orth[1] = -target.components[0];
  double n = std::hypot(orth[0], orth[1]);
  for (auto& x : orth) x /= n;
  const Cell orth_cell{2, 9};
  f.set(g.index(orth_cell), orth, 1.0);
  const auto v = explorer::recompute_value_map(f, target);
  const double planted = v.value[g.index(plant)], orthogonal = v.value[g.index(orth_cell)];
  int recalled = 0, thresholds = 0;
  for (double t = 0.0; t < 1.0; t += 0.01) {
    ++thresholds;
    const auto p = explorer::memory_recall(v, explorer::MemoryThreshold(t));
    if (p && g.cell_of(*p) == plant) ++recalled;
  }
  const bool ok = std::abs(planted - 1.0) <= kCosineTol && std::abs(orthogonal) <= kCosineTol && recalled == thresholds;
  report(3, "cosine memory", ok,
         fmt("planted value %.12f, orthogonal %.3g, recalled the plant at %d/%d thresholds in [0, 1)", planted,
             orthogonal, recalled, thresholds));
}

void criterion_4() {
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    Rng rng(mix_seed(404, static_cast<std::uint64_t>(t)));
    explorer::ObstacleMap m({32, 32, 0.25, {0.0, 0.0}});
    const double pu = rng.uniform() * 0.6, po = rng.uniform() * 0.3;
    for (int r = 0; r < 32; ++r)
      for (int c = 0; c < 32; ++c) {
        const double u = rng.uniform();
        m.set({r, c}, u < pu ? explorer::Occupancy::kUnknown
                             : (u < pu + po ? explorer::Occupancy::kOccupied : explorer::Occupancy::kFree));
      }
    std::set<Cell> brute;
    for (const auto& group : oracle::brute_force_frontiers(m, 1))
      brute.insert(group.begin(), group.end());
    std::set<Cell> got;
    const auto mask = explorer::frontier_mask(m);
    for (int r = 0; r < 32; ++r)
      for (int c = 0; c < 32; ++c)
        if (mask[m.geometry().index({r, c})]) got.insert({r, c});
    std::set<Cell> grouped;
    for (const auto& f : explorer::extract_frontiers(m, 1)) grouped.insert(f.cells.begin(), f.cells.end());
    if (got != brute || grouped != brute) ++mismatches;
  }
  report(4, "frontier oracle", mismatches == 0, fmt("1000 random 32x32 maps, %d mismatches", mismatches));
}

void criterion_5() {
  long pairs = 0, geo_mismatch = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    gridworld::GeneratorConfig cfg;
    cfg.rooms = 2 + static_cast<int>(seed % 3);
    const auto scene = gridworld::generate_scene(cfg, mix_seed(55, seed));
    std::vector<Cell> free_cells;
    for (int r = 0; r < scene.grid.rows(); ++r)
      for (int c = 0; c < scene.grid.cols(); ++c)
        if (scene.grid.is_free({r, c})) free_cells.push_back({r, c});
    Rng rng(seed);
    const Cell src = free_cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free_cells.size()) - 1))];
    const auto lattice = oracle::lattice_distances(scene.grid, src);
    for (const auto& t : free_cells) {
      const double d = gridworld::geodesic_distance(scene, scene.center_of(src), scene.center_of(t));
      if (oracle::lattice_split(d, scene.resolution) != lattice[scene.grid.index(t)]) ++geo_mismatch;
      ++pairs;
    }
  }
  double worst = 0.0;
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<EpisodeResult> rows;
    double sum = 0.0;
    const int n = rng.uniform_int(1, 40);
    for (int i = 0; i < n; ++i) {
      EpisodeResult r;
      r.optimal_length = 0.25 + 30 * rng.uniform();
      r.agent_path_length = r.optimal_length * (0.3 + 4 * rng.uniform());
      r.success = rng.bernoulli(0.5);
      rows.push_back(r);
      if (r.success) sum += r.optimal_length / std::max(r.agent_path_length, r.optimal_length);
    }
    worst = std::max(worst, std::abs(compute_spl(rows) - 100.0 * sum / n));
  }
  // the ordering check covers every suite this binary has run so far, so criterion 5
  // is reported after the suite-running criteria
  const bool ok = geo_mismatch == 0 && worst <= kSplTol && order_violations == 0;
  report(5, "geodesic/SPL oracle", ok,
         fmt("50 scenes, %ld cell pairs, %ld move-count mismatches; SPL max |error| %.3g (tol %.0e); "
             "SPL<=SR and PPL<=Progress violated in %d task rows over %d suites",
             pairs, geo_mismatch, worst, kSplTol, order_violations, suites_checked));
}

std::shared_ptr<gridworld::Scene> open_room(int rows, int cols) {
  auto s = std::make_shared<gridworld::Scene>();
  s->name = "open";
  s->grid = gridworld::Grid(rows, cols, gridworld::CellKind::kFree);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1) s->grid.set({r, c}, gridworld::CellKind::kObstacle);
  s->objects.push_back({1, "chair", "", {}, {0.625, 1.125}, std::nullopt});
  return s;
}

gridworld::Episode nav_episode(const gridworld::Scene& scene, Point p, double heading) {
  const auto& target = scene.objects.front();
  gridworld::Episode e;
  e.id = "nav";
  e.scene_ref = scene.name;
  e.start_pose = {p.x, p.y, heading, 0.0};
  e.goals.push_back({GoalKind::kCategory, target.category, {target.id}, std::nullopt});
  return e;
}

void criterion_6() {
  int maps = 0, failed = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; maps < 100; ++seed) {
    gridworld::GeneratorConfig cfg;
    auto scene = std::make_shared<gridworld::Scene>(gridworld::generate_scene(cfg, mix_seed(66, seed)));
    std::vector<Cell> free_cells;
    for (int r = 0; r < scene->grid.rows(); ++r)
      for (int c = 0; c < scene->grid.cols(); ++c)
        if (scene->grid.is_free({r, c})) free_cells.push_back({r, c});
    Rng rng(seed);
    const Cell s = free_cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free_cells.size()) - 1))];
    const Cell t = free_cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free_cells.size()) - 1))];
    const double opt = oracle::relaxation_distances(scene->grid, scene->resolution, s)[scene->grid.index(t)];
    if (opt < 1.0) continue;
    const Point sp = scene->center_of(s);
    gridworld::WorldState world(scene, nav_episode(*scene, sp, 30.0 * rng.uniform_int(0, 11)));
    auto map = oracle::known_map(*scene);
    const auto out = pointnav::navigate_to(world, map, scene->center_of(t), 3000);
    const double ratio = world.path_length() / opt;
    worst = std::max(worst, ratio);
    if (out.status != pointnav::NavStatus::kReached || ratio > kNavSlack) ++failed;
    ++maps;
  }
  // straight runs along +x: facing the goal, and from a quarter turn away when the start
  // is outside the stop tolerance (inside it a stop without turning is already a success)
  int straight_runs = 0, straight_bad = 0;
  std::string straight_detail;
  const double ds[] = {0.25, 0.5, 1.75, 3.0, 4.25};
  for (double heading : {0.0, 90.0})
    for (double d : ds) {
      if (heading != 0.0 && d <= pointnav::NavConfig{}.tolerance) continue;
      auto scene = open_room(6, 24);
      gridworld::WorldState world(scene, nav_episode(*scene, {0.625, 0.625}, heading));
      explorer::ObstacleMap map({6, 24, 0.25, {0.0, 0.0}});
      int forwards = 0, others = 0;
      const auto out = pointnav::navigate_to(world, map, {0.625 + d, 0.625}, 200, {},
                                             [&](Action a, const gridworld::Observation&) {
                                               if (a == Action::kForward) ++forwards;
                                               else if (!gridworld::is_rotation(a)) ++others;
                                             });
      const int expect = static_cast<int>(std::ceil(d / 0.25 - 1e-9));
      ++straight_runs;
      if (out.status != pointnav::NavStatus::kReached || forwards != expect || others != 0) {
        ++straight_bad;
        straight_detail += fmt(" [d=%.2f heading %.0f: %d forwards, expected %d]", d, heading, forwards, expect);
      }
    }
  report(6, "navigator optimality", failed == 0 && straight_bad == 0,
         fmt("100 known maps, %d over %.1fx or unreached (worst ratio %.3f); straight runs %d/%d with exactly "
             "ceil(d/0.25) Forward steps plus rotations%s",
             failed, kNavSlack, worst, straight_runs - straight_bad, straight_runs, straight_detail.c_str()));
}

void criterion_7() {
  const auto& examples = planner::bundled_examples();
  const auto reg = interp::default_registry();
  const perception::Embedder emb;
  int ok_examples = 0;
  std::string first_bad;
  for (const auto& ex : examples) {
    try {
      const auto program = interp::parse_program(ex.program);
      if (!interp::check_program(program, reg).empty()) throw std::runtime_error("static check failed");
      const auto file = gridworld::load_scene_file(planner::data_dir() / "scenes" / (ex.scene + ".json"));
      auto scene = std::make_shared<const gridworld::Scene>(file.scene);
      auto episode = file.episodes.at(0);
      episode.goals = {ex.goal};
      episode.task_kind = ex.goal.kind == GoalKind::kQuestion ? TaskKind::kEqa : TaskKind::kOvon;
      gridworld::WorldState world(scene, episode);
      interp::Agent agent(world, emb);
      agent.set_budget(episode.step_budget_per_goal);
      const auto trace = interp::execute(program, reg, agent, world.current_goal());
      if (trace.terminal.kind != interp::TerminalKind::kCompleted) throw std::runtime_error(trace.terminal.message);
      ++ok_examples;
    } catch (const std::exception& e) {
      if (first_bad.empty()) first_bad = ex.instruction + ": " + e.what();
    }
  }
  int round_trip_bad = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto src = testgen::ProgramGen(seed).program();
    const auto p = interp::parse_program(src);
    const auto printed = interp::pretty_print(p);
    const auto q = interp::parse_program(printed);
    if (!interp::same_structure(p, q) || interp::pretty_print(q) != printed) ++round_trip_bad;
  }
  const bool ok = examples.size() == 15 && ok_examples == 15 && round_trip_bad == 0;
  report(7, "interpreter soundness", ok,
         fmt("%d/%zu examples parse, check and complete%s; %d/10000 round-trip failures", ok_examples,
             examples.size(), first_bad.empty() ? "" : (" (first failure: " + first_bad + ")").c_str(),
             round_trip_bad));
}

// Two rooms with no opening; the target sits in the right one.
std::shared_ptr<const gridworld::Scene> sealed_scene() {
  auto s = std::make_shared<gridworld::Scene>();
  s->name = "sealed";
  s->grid = gridworld::Grid(20, 40);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 40; ++c)
      if (r == 0 || c == 0 || r == 19 || c == 39 || c == 20) s->grid.set({r, c}, gridworld::CellKind::kObstacle);
  s->objects.push_back({1, "bed", "double bed", {{"color", "white"}}, {8.0, 2.5}, std::nullopt});
  s->objects.push_back({2, "couch", "sofa", {{"color", "gray"}}, {2.0, 3.0}, std::nullopt});
  s->objects.push_back({3, "plant", "", {{"color", "green"}}, {4.0, 1.0}, std::nullopt});
  s->validate();
  return s;
}

bool target_visible_from_start(const gridworld::Scene& scene, const gridworld::Episode& e) {
  for (int k = 0; k < 12; ++k) {
    auto pose = e.start_pose;
    pose.heading = wrap360(pose.heading - 30.0 * k);
    for (const auto& s : gridworld::sense_at(scene, pose, {}).sightings)
      for (int id : e.goals[0].target_ids)
        if (s.object_id == id) return true;
  }
  return false;
}

struct Tally {
  int episodes = 0, failed = 0, matching = 0;
  std::map<FailureCategory, int> counts;
};

Tally tally(const SuiteReport& r, const std::set<FailureCategory>& allowed) {
  Tally t;
  for (const auto& e : r.results) {
    ++t.episodes;
    if (e.success) continue;
    ++t.failed;
    if (e.failure) {
      ++t.counts[*e.failure];
      if (allowed.count(*e.failure)) ++t.matching;
    }
  }
  return t;
}

SuiteReport noisy_suite_run(int jobs, std::vector<SuiteEpisode>* keep = nullptr) {
  static const auto eps = [] {
    std::vector<SuiteEpisode> all;
    const std::pair<TaskKind, int> mix[] = {
        {TaskKind::kOvon, 5}, {TaskKind::kGoat, 5}, {TaskKind::kMultion, 5}, {TaskKind::kEqa, 5}};
    std::uint64_t seed = 900;
    for (const auto& [task, per_scene] : mix) {
      auto part = generated(task, 25, per_scene, seed++);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }();
  if (keep) *keep = eps;
  auto cfg = config();
  cfg.agent.noise.false_negative_rate = 0.2;
  cfg.agent.noise.false_positive_rate = 0.05;
  cfg.planner.stub.fault_rate = 0.15;
  return run_suite(eps, cfg, 31337, jobs);
}

SuiteReport noisy_serial;

void criterion_8() {
  // fault mode p = 1
  auto fault_cfg = config();
  fault_cfg.planner.stub.fault_rate = 1.0;
  const auto fault = run_suite(generated(TaskKind::kOvon, 8, 5, 81), fault_cfg, 1, 1);
  check_order(fault);
  const auto a = tally(fault, {FailureCategory::kPlannerWrongTarget});

  // false negatives on every detection, target visible from the start
  std::vector<SuiteEpisode> visible;
  for (const auto& e : generated(TaskKind::kOvon, 20, 5, 82))
    if (target_visible_from_start(*e.scene, e.episode)) visible.push_back(e);
  auto fn_cfg = config();
  fn_cfg.agent.noise.false_negative_rate = 1.0;
  const auto fn = run_suite(visible, fn_cfg, 2, 1);
  check_order(fn);
  const auto b = tally(fn, {FailureCategory::kIgnoredGoalObject});

  // sealed target room
  const auto sealed = sealed_scene();
  std::vector<SuiteEpisode> sealed_eps;
  for (int i = 0; i < 20; ++i) {
    gridworld::Episode e;
    e.id = "sealed_" + std::to_string(i);
    e.scene_ref = "sealed";
    e.start_pose = {1.125 + 0.25 * (i % 10), 1.125 + 0.25 * (i / 10) * 8, 30.0 * (i % 12), 0.0};
    e.goals.push_back({GoalKind::kCategory, "bed", {1}, std::nullopt});
    sealed_eps.push_back({e, sealed});
  }
  const auto sr = run_suite(sealed_eps, config(), 3, 1);
  const auto c = tally(sr, {FailureCategory::kDidntSeeTarget, FailureCategory::kTimeout});

  // totality over a noisy mixed suite
  noisy_serial = noisy_suite_run(1);
  check_order(noisy_serial);
  int wrong_shape = 0, failed = 0, categorized = 0;
  for (const auto& e : noisy_serial.results) {
    if (e.harness_error) {
      ++wrong_shape;
      continue;
    }
    if (e.success != !e.failure.has_value()) ++wrong_shape;
    if (!e.success) ++failed;
  }
  for (const auto& t : noisy_serial.per_task)
    for (const auto& [cat, n] : t.failures) categorized += n;

  // a decoy can sit inside the success radius of a goal instance, so some fault episodes succeed
  const bool ok = a.matching == a.failed && a.failed >= a.episodes * 9 / 10 &&
                  b.failed == b.episodes && b.matching == b.failed && b.episodes >= 10 &&
                  c.failed == c.episodes && c.matching == c.failed && noisy_serial.results.size() == 500 &&
                  wrong_shape == 0 && categorized == failed;
  report(8, "failure classifier", ok,
         fmt("fault p=1: %d/%d failures planner_wrong_target (%d lucky successes); fn=1 visible target: %d/%d ignored_goal_object; sealed room: "
             "%d/%d didnt_see_target|timeout; noisy suite: %zu episodes, %d failures, %d categorized, %d malformed",
             a.matching, a.failed, a.episodes - a.failed, b.matching, b.episodes, c.matching, c.episodes, noisy_serial.results.size(),
             failed, categorized, wrong_shape));
}

void criterion_9() {
  const auto again = noisy_suite_run(1);
  const auto parallel = noisy_suite_run(4);
  check_order(parallel);
  const auto base = results_csv(noisy_serial.results);
  const bool same_serial = results_csv(again.results) == base;
  const bool same_parallel = results_csv(parallel.results) == base;
  report(9, "determinism", same_serial && same_parallel,
         fmt("%zu rows (%zu bytes): rerun at 1 thread %s, at 4 threads %s", noisy_serial.results.size(), base.size(),
             same_serial ? "identical" : "differs", same_parallel ? "identical" : "differs"));
}

void criterion_10() {
  std::vector<SuiteEpisode> eps;
  noisy_suite_run(1, &eps);
  for (const auto& id : {"ovon-bed", "ovon-gas-boiler", "eqa-bed-color", "goat-mixed"})
    eps.push_back({fixture::apartment_episode(id), fixture::apartment_scene()});
  int bad = 0, checked = 0;
  auto cfg = config();
  cfg.agent.noise.false_negative_rate = 0.2;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto run = run_episode(eps[i].episode, eps[i].scene, cfg, episode_seed(10, i));
    const auto& actions = run.trace.evidence.actions;
    ++checked;
    if (actions.size() < 12) {
      ++bad;
      continue;
    }
    double turned = 0.0;
    for (int k = 0; k < 12; ++k) {
      if (actions[static_cast<std::size_t>(k)] == Action::kMoveLeft) turned -= 30.0;
      else if (actions[static_cast<std::size_t>(k)] == Action::kMoveRight) turned += 30.0;
      else turned = 1e9;
    }
    if (std::abs(std::abs(turned) - 360.0) > 1e-9) ++bad;
  }
  report(10, "initialization spin", bad == 0,
         fmt("%d episode traces, %d without 12 leading rotations totalling 360 degrees", checked, bad));
}

void guarded(int n, const char* name, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(n, name, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "memory ablation", criterion_1);
  guarded(2, "LLM-match exactness", criterion_2);
  guarded(3, "cosine memory", criterion_3);
  guarded(4, "frontier oracle", criterion_4);
  guarded(6, "navigator optimality", criterion_6);
  guarded(7, "interpreter soundness", criterion_7);
  guarded(8, "failure classifier", criterion_8);
  guarded(9, "determinism", criterion_9);
  guarded(10, "initialization spin", criterion_10);
  guarded(5, "geodesic/SPL oracle", criterion_5);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
