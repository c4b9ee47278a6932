#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "primnav/gridworld/scene.hpp"

namespace primnav::gridworld {

struct SceneFile {
  Scene scene;
  std::vector<Episode> episodes;
};

// JSON scene format. Top-level fields: name, resolution, grid (strings of '#'/'.'),
// objects, episodes. Unknown fields are rejected with a FormatError naming the field;
// JSON syntax errors name the line.
SceneFile parse_scene_file(const std::string& text, const std::string& source = "<memory>");
SceneFile load_scene_file(const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);

std::string dump_scene_file(const Scene& scene, const std::vector<Episode>& episodes);
void save_scene_file(const std::filesystem::path& path, const Scene& scene,
                     const std::vector<Episode>& episodes);

}  // namespace primnav::gridworld
