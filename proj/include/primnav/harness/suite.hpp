#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "primnav/gridworld/generator.hpp"
#include "primnav/harness/harness.hpp"

namespace primnav::harness {

// Generated suite: `scenes` scenes from one generator config, `episodes.count` episodes
// in each. JSON fields: name, seed, scenes, generator{...}, episodes{...}.
struct SuiteConfig {
  std::string name = "suite";
  std::uint64_t seed = 1;
  int scenes = 1;
  gridworld::GeneratorConfig generator;
  gridworld::EpisodeGenConfig episodes;
};

SuiteConfig parse_suite_config(const std::string& json_text);
SuiteConfig load_suite_config(const std::filesystem::path& path);
nlohmann::json to_json(const SuiteConfig& c);

struct GeneratedScene {
  std::shared_ptr<const gridworld::Scene> scene;
  std::vector<gridworld::Episode> episodes;
};

// Scene i uses seed mix_seed(seed, 2i), its episodes mix_seed(seed, 2i + 1). Scenes
// that fail to generate are retried with the next seed.
std::vector<GeneratedScene> generate_suite(const SuiteConfig& config);

std::vector<SuiteEpisode> flatten(const std::vector<GeneratedScene>& scenes);

// Scene files with embedded episodes; a directory means every *.json inside, sorted.
std::vector<GeneratedScene> load_scene_files(const std::vector<std::filesystem::path>& paths);

// The MultiON suite used by the memory ablation.
std::filesystem::path bundled_multion_config();

}  // namespace primnav::harness
