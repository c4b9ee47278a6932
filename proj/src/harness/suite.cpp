#include "primnav/harness/suite.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "primnav/gridworld/scene_io.hpp"

namespace primnav::harness {

using nlohmann::json;

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [k, v] : j.items())
    if (std::none_of(known.begin(), known.end(), [&](const char* s) { return k == s; }))
      throw FormatError(where + ": unknown field '" + k + "'");
}

}  // namespace

SuiteConfig parse_suite_config(const std::string& json_text) {
  SuiteConfig c;
  try {
    const json j = json::parse(json_text);
    reject_unknown(j, {"name", "seed", "scenes", "generator", "episodes"}, "suite config");
    take(j, "name", c.name);
    take(j, "seed", c.seed);
    take(j, "scenes", c.scenes);
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      reject_unknown(g,
                     {"name", "rooms", "room_min", "room_max", "vocabulary", "object_count", "required", "density",
                      "resolution", "door_width", "max_retries"},
                     "suite config generator");
      auto& o = c.generator;
      take(g, "name", o.name);
      take(g, "rooms", o.rooms);
      take(g, "room_min", o.room_min);
      take(g, "room_max", o.room_max);
      take(g, "vocabulary", o.vocabulary);
      take(g, "object_count", o.object_count);
      take(g, "required", o.required);
      take(g, "density", o.density);
      take(g, "resolution", o.resolution);
      take(g, "door_width", o.door_width);
      take(g, "max_retries", o.max_retries);
    }
    if (j.contains("episodes")) {
      const auto& e = j.at("episodes");
      reject_unknown(e,
                     {"task", "count", "multion_goals", "goat_min_goals", "goat_max_goals", "ovon_budget", "goat_budget",
                      "multion_budget", "eqa_budget", "success_radius"},
                     "suite config episodes");
      auto& o = c.episodes;
      if (e.contains("task")) o.task = gridworld::task_kind_from_string(e.at("task").get<std::string>());
      take(e, "count", o.count);
      take(e, "multion_goals", o.multion_goals);
      take(e, "goat_min_goals", o.goat_min_goals);
      take(e, "goat_max_goals", o.goat_max_goals);
      take(e, "ovon_budget", o.ovon_budget);
      take(e, "goat_budget", o.goat_budget);
      take(e, "multion_budget", o.multion_budget);
      take(e, "eqa_budget", o.eqa_budget);
      take(e, "success_radius", o.success_radius);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("suite config: ") + e.what());
  }
  if (c.scenes < 1) throw ValidationError("suite config: scenes must be >= 1");
  if (c.episodes.count < 1) throw ValidationError("suite config: episodes.count must be >= 1");
  return c;
}

SuiteConfig load_suite_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw LookupError("cannot open suite config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_suite_config(ss.str());
}

json to_json(const SuiteConfig& c) {
  const auto& g = c.generator;
  const auto& e = c.episodes;
  return {{"name", c.name},
          {"seed", c.seed},
          {"scenes", c.scenes},
          {"generator",
           {{"name", g.name},
            {"rooms", g.rooms},
            {"room_min", g.room_min},
            {"room_max", g.room_max},
            {"vocabulary", g.vocabulary},
            {"object_count", g.object_count},
            {"required", g.required},
            {"density", g.density},
            {"resolution", g.resolution},
            {"door_width", g.door_width},
            {"max_retries", g.max_retries}}},
          {"episodes",
           {{"task", gridworld::to_string(e.task)},
            {"count", e.count},
            {"multion_goals", e.multion_goals},
            {"goat_min_goals", e.goat_min_goals},
            {"goat_max_goals", e.goat_max_goals},
            {"ovon_budget", e.ovon_budget},
            {"goat_budget", e.goat_budget},
            {"multion_budget", e.multion_budget},
            {"eqa_budget", e.eqa_budget},
            {"success_radius", e.success_radius}}}};
}

std::vector<GeneratedScene> generate_suite(const SuiteConfig& config) {
  std::vector<GeneratedScene> out;
  std::uint64_t attempt = 0;
  for (int i = 0; i < config.scenes; ++i) {
    auto gen = config.generator;
    gen.name = config.generator.name + "_" + std::to_string(i);
    for (int tries = 0;; ++tries, ++attempt) {
      try {
        const auto scene = gridworld::generate_scene(gen, mix_seed(config.seed, 2 * (i + attempt)));
        auto eps = gridworld::generate_episodes(scene, config.episodes, mix_seed(config.seed, 2 * (i + attempt) + 1));
        out.push_back({std::make_shared<const gridworld::Scene>(scene), std::move(eps)});
        break;
      } catch (const GenerationError&) {
        if (tries >= 8) throw;
      }
    }
  }
  return out;
}

std::vector<SuiteEpisode> flatten(const std::vector<GeneratedScene>& scenes) {
  std::vector<SuiteEpisode> out;
  for (const auto& s : scenes)
    for (const auto& e : s.episodes) out.push_back({e, s.scene});
  return out;
}

std::vector<GeneratedScene> load_scene_files(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::filesystem::path> files;
  for (const auto& p : paths) {
    if (std::filesystem::is_directory(p)) {
      std::vector<std::filesystem::path> inside;
      for (const auto& entry : std::filesystem::directory_iterator(p))
        // suite.json is the generation config gen-scenes writes next to the scenes
        if (entry.path().extension() == ".json" && entry.path().filename() != "suite.json")
          inside.push_back(entry.path());
      std::sort(inside.begin(), inside.end());
      files.insert(files.end(), inside.begin(), inside.end());
    } else if (std::filesystem::exists(p)) {
      files.push_back(p);
    } else {
      throw LookupError("scene path does not exist: " + p.string());
    }
  }
  std::vector<GeneratedScene> out;
  for (const auto& f : files) {
    auto sf = gridworld::load_scene_file(f);
    out.push_back({std::make_shared<const gridworld::Scene>(std::move(sf.scene)), std::move(sf.episodes)});
  }
  return out;
}

std::filesystem::path bundled_multion_config() { return planner::data_dir() / "suites" / "multion_ablation.json"; }

}  // namespace primnav::harness
