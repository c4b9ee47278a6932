#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "primnav/gridworld/scene.hpp"

namespace primnav::gridworld {

// One placeable object family. Instances draw a subcategory and attribute values.
struct ObjectKind {
  std::string category;
  std::vector<std::string> subcategories;
  std::map<std::string, std::vector<std::string>> attributes;
  // Each instance takes a distinct subcategory (colored MultiON cylinders).
  bool unique_subcategory = false;
};

// Built-in families keyed by category.
const std::vector<ObjectKind>& default_object_kinds();

struct GeneratorConfig {
  std::string name = "generated";
  int rooms = 3;
  int room_min = 9;   // interior cells per side
  int room_max = 13;
  std::vector<std::string> vocabulary;  // categories; empty = all built-in families
  int object_count = 12;
  // Forced instances per category on top of `object_count` (e.g. {"cylinder", 5}).
  std::map<std::string, int> required;
  double density = 0.03;  // fraction of room interior turned into clutter, in (0, 1)
  double resolution = 0.25;
  int door_width = 3;
  int max_retries = 16;
};

// Deterministic for a fixed (config, seed). Rooms are joined by doors along a random
// spanning tree, so every free cell is reachable. Throws GenerationError when objects
// cannot be placed after `max_retries` attempts.
Scene generate_scene(const GeneratorConfig& config, std::uint64_t seed);

struct EpisodeGenConfig {
  TaskKind task = TaskKind::kOvon;
  int count = 10;
  int multion_goals = 3;
  int goat_min_goals = 5;
  int goat_max_goals = 10;
  int ovon_budget = 500;
  int goat_budget = 500;
  int multion_budget = 2500;
  int eqa_budget = 500;
  double success_radius = 1.0;
};

std::vector<Episode> generate_episodes(const Scene& scene, const EpisodeGenConfig& config,
                                       std::uint64_t seed);

}  // namespace primnav::gridworld
