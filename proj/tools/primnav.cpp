#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "primnav/gridworld/scene_io.hpp"
#include "primnav/harness/suite.hpp"

using namespace primnav;
using namespace primnav::harness;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::vector<std::string> scenes;
  std::string episodes;
  std::string task;
  std::string planner = "stub";
  double memory_threshold = 0.4;
  double fn_rate = 0.0;
  double fp_rate = 0.0;
  double fault_rate = 0.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out = "primnav_out";
  std::string cache = ".primnav_cache";
  std::string answer_mode = "constrained";
  bool dump_maps = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--scene", f.scenes, "scene file(s) with episodes, or directories of them");
  cmd->add_option("--episodes", f.episodes, "suite generator config (JSON)");
  cmd->add_option("--task", f.task, "keep only this task: ovon|goat|multion|eqa");
  cmd->add_option("--planner", f.planner, "stub|endpoint");
  cmd->add_option("--memory-threshold", f.memory_threshold, "memory recall threshold in [0,1]; 1.0 disables memory");
  cmd->add_option("--fn-rate", f.fn_rate, "detector false-negative rate");
  cmd->add_option("--fp-rate", f.fp_rate, "detector false-positive rate");
  cmd->add_option("--fault-rate", f.fault_rate, "stub planner wrong-target rate");
  cmd->add_option("--seed", f.seed, "suite seed");
  cmd->add_option("--jobs", f.jobs, "parallel episodes");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--cache", f.cache, "planner response cache (endpoint backend)");
  cmd->add_option("--answer-mode", f.answer_mode, "exact|constrained|judge");
  cmd->add_flag("--dump-maps", f.dump_maps, "write map layers after every moving statement");
}

HarnessConfig make_config(const RunFlags& f) {
  HarnessConfig c;
  c.synonyms = bundled_synonyms();
  c.planner.backend = planner::backend_from_string(f.planner);
  if (!(f.fault_rate >= 0.0 && f.fault_rate <= 1.0)) throw ValidationError("--fault-rate must lie in [0, 1]");
  c.planner.stub.fault_rate = f.fault_rate;
  c.answer_mode = answer_mode_from_string(f.answer_mode);
  if (c.planner.backend == planner::Backend::kEndpoint || c.answer_mode == AnswerMode::kJudge) {
    c.planner.endpoint = planner::EndpointConfig::from_env();
    c.planner.cache_dir = f.cache;
  }
  if (!(f.memory_threshold >= 0.0 && f.memory_threshold <= 1.0))
    throw ValidationError("--memory-threshold must lie in [0, 1] (1.0 turns memory off), got " +
                          std::to_string(f.memory_threshold));
  c.agent.explorer.threshold = explorer::MemoryThreshold(f.memory_threshold);
  c.agent.noise.false_negative_rate = f.fn_rate;
  c.agent.noise.false_positive_rate = f.fp_rate;
  c.agent.noise.validate();
  if (f.jobs < 1) throw ValidationError("--jobs must be >= 1");
  c.out_dir = f.out;
  c.dump_maps = f.dump_maps;
  return c;
}

std::vector<SuiteEpisode> load_episodes(const RunFlags& f, bool default_multion) {
  std::vector<GeneratedScene> scenes;
  if (!f.episodes.empty()) {
    scenes = generate_suite(load_suite_config(f.episodes));
  } else if (!f.scenes.empty()) {
    std::vector<fs::path> paths(f.scenes.begin(), f.scenes.end());
    scenes = load_scene_files(paths);
  } else if (default_multion) {
    scenes = generate_suite(load_suite_config(bundled_multion_config()));
  } else {
    throw UsageError("give --scene or --episodes");
  }
  auto eps = flatten(scenes);
  if (!f.task.empty()) {
    const auto kind = gridworld::task_kind_from_string(f.task);
    std::erase_if(eps, [&](const SuiteEpisode& e) { return e.episode.task_kind != kind; });
  }
  if (eps.empty()) throw ValidationError("no episodes to run");
  return eps;
}

int cmd_run(const RunFlags& f) {
  auto cfg = make_config(f);
  const auto eps = load_episodes(f, false);
  std::cout << "config: " << cfg.echo().dump() << " seed=" << f.seed << "\n";
  const auto report = run_suite(eps, cfg, f.seed, f.jobs);
  write_report(report, f.out);
  for (const auto& a : report.per_task) std::cout << aggregate_line(a) << "\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "report: " << (fs::path(f.out) / "results.csv").string() << "\n";
  int errors = 0;
  for (const auto& r : report.results)
    if (r.harness_error) {
      ++errors;
      std::cerr << "harness error in " << r.episode_id << ": " << r.error_message << "\n";
    }
  return errors ? 1 : 0;
}

std::vector<double> parse_arms(const std::string& text) {
  std::vector<double> arms;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (item.find_first_not_of(" ", pos) != std::string::npos) throw std::invalid_argument(item);
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("threshold " + item + " lies outside [0, 1]");
      arms.push_back(v);
    } catch (const std::logic_error&) {
      throw ValidationError("bad threshold '" + item + "' in --arms");
    }
  }
  if (arms.empty()) throw ValidationError("--arms is empty");
  return arms;
}

int cmd_ablate(RunFlags f, const std::string& arms_text) {
  const auto arms = parse_arms(arms_text);
  const auto eps = load_episodes(f, true);
  const fs::path root = f.out;
  std::string table = "threshold,episodes,sr,progress,spl,ppl\n";
  std::printf("%-12s %8s %8s %8s %8s %8s\n", "threshold", "episodes", "SR", "Progress", "SPL", "PPL");
  std::vector<std::uint64_t> first_seeds;
  int errors = 0;
  for (double t : arms) {
    f.memory_threshold = t;
    char name[32];
    std::snprintf(name, sizeof name, "arm_%.2f", t);
    f.out = (root / name).string();
    auto cfg = make_config(f);
    const auto report = run_suite(eps, cfg, f.seed, f.jobs);
    write_report(report, f.out);
    std::vector<std::uint64_t> seeds;
    for (const auto& r : report.results) {
      seeds.push_back(r.seed);
      errors += r.harness_error ? 1 : 0;
    }
    if (first_seeds.empty()) first_seeds = seeds;
    else if (seeds != first_seeds) throw ProtocolError("ablation arms ran with different episode seeds");
    const auto all = aggregate(report.results);
    for (const auto& a : all) {
      const std::string label = t >= 1.0 ? "none (1.0)" : name + 4;
      std::printf("%-12s %8d %8.2f %8.2f %8.2f %8.2f\n", label.c_str(), a.episodes, a.sr, a.progress, a.spl, a.ppl);
      char row[160];
      std::snprintf(row, sizeof row, "%.2f,%d,%.17g,%.17g,%.17g,%.17g\n", t, a.episodes, a.sr, a.progress, a.spl, a.ppl);
      table += row;
    }
  }
  std::ofstream(root / "ablation.csv") << table;
  std::cout << "table: " << (root / "ablation.csv").string() << "\n";
  return errors ? 1 : 0;
}

int cmd_gen(const std::string& config_path, int count, int per_scene, const std::string& task, std::uint64_t seed,
            const std::string& out) {
  SuiteConfig c;
  if (!config_path.empty()) {
    c = load_suite_config(config_path);
  } else {
    if (count <= 0) throw UsageError("--count must be >= 1");
    if (per_scene <= 0) throw UsageError("--per-scene must be >= 1");
    c.scenes = count;
    c.seed = seed;
    c.episodes.count = per_scene;
    c.episodes.task = gridworld::task_kind_from_string(task);
    if (c.episodes.task == gridworld::TaskKind::kMultion) c.generator.required["cylinder"] = 5;
  }
  fs::create_directories(out);
  const auto scenes = generate_suite(c);
  for (const auto& s : scenes) {
    const auto path = fs::path(out) / (s.scene->name + ".json");
    gridworld::save_scene_file(path, *s.scene, s.episodes);
    std::cout << path.string() << " (" << s.episodes.size() << " episodes)\n";
  }
  std::ofstream(fs::path(out) / "suite.json") << to_json(c).dump(1) << "\n";
  return 0;
}

std::string compact(const interp::Value& v) {
  auto s = v.summary();
  if (s.size() > 100) s = s.substr(0, 97) + "...";
  return s;
}

int cmd_trace(const std::string& path, bool failures_only, const std::string& module) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw LookupError("cannot open trace " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const auto tf = parse_episode_trace(ss.str());
  for (const auto& g : tf.goals) {
    const auto& h = g.header;
    std::cout << "goal " << h.at("goal_index").get<int>() << " [" << h.at("kind").get<std::string>() << "] "
              << h.at("payload").get<std::string>() << "\n";
    if (!h.at("planning_error").is_null()) {
      std::cout << "  planning error: " << h.at("planning_error").get<std::string>() << "\n";
      continue;
    }
    if (!failures_only) {
      for (const auto& r : g.trace.records) {
        if (!module.empty() && r.module != module) continue;
        std::cout << "  line " << r.line << ": " << (r.output_var.empty() ? "" : r.output_var + " = ") << r.module
                  << "\n";
        for (const auto& [name, v] : r.inputs) std::cout << "    " << name << " = " << compact(v) << "\n";
        std::cout << "    -> " << compact(r.output) << "  (" << r.steps << " steps)\n";
        for (const auto& m : r.map_snapshots) std::cout << "    map " << m << "\n";
      }
    }
    const auto& t = g.trace.terminal;
    std::cout << "  terminal: " << interp::to_string(t.kind);
    if (t.kind != interp::TerminalKind::kCompleted)
      std::cout << " at line " << t.line << " (" << t.error_kind << ") " << t.message;
    std::cout << "\n";
  }
  const auto& e = tf.episode;
  std::cout << "episode " << e.at("episode_id").get<std::string>() << ": "
            << (e.at("success").get<bool>() ? "success" : "failure") << ", " << e.at("steps").get<int>() << " steps";
  if (!e.at("failure_category").is_null())
    std::cout << ", " << e.at("failure_category").get<std::string>() << " (rule " << e.at("failure_rule").get<std::string>()
              << ")";
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primnav: program-driven navigation in grid worlds"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-scenes", "generate scenes with episodes");
  std::string gen_config, gen_task = "ovon", gen_out = "scenes";
  int gen_count = 0, gen_per_scene = 10;
  std::uint64_t gen_seed = 1;
  gen->add_option("--episodes", gen_config, "suite generator config (JSON); overrides the flags below");
  gen->add_option("--count", gen_count, "number of scenes");
  gen->add_option("--per-scene", gen_per_scene, "episodes per scene");
  gen->add_option("--task", gen_task, "ovon|goat|multion|eqa");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output directory");

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run a suite and write results.csv, summary.json and traces");
  add_run_flags(run, run_flags);

  RunFlags ab_flags;
  ab_flags.out = "primnav_ablation";
  std::string arms = "1.0,0.2,0.3,0.4,0.5";
  auto* ab = app.add_subcommand("ablate-memory", "memory threshold sweep on one episode set");
  add_run_flags(ab, ab_flags);
  ab->add_option("--arms", arms, "comma-separated thresholds; 1.0 is the no-memory arm");

  std::string trace_path, trace_module;
  bool failures_only = false;
  auto* tr = app.add_subcommand("trace", "render an episode trace");
  tr->add_option("path", trace_path, "trace file")->required();
  tr->add_flag("--failures-only", failures_only, "show only terminals and the failure rule");
  tr->add_option("--module", trace_module, "show only records of this module");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen(gen_config, gen_count, gen_per_scene, gen_task, gen_seed, gen_out);
    if (*run) return cmd_run(run_flags);
    if (*ab) return cmd_ablate(ab_flags, arms);
    if (*tr) return cmd_trace(trace_path, failures_only, trace_module);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
