#pragma once

#include <memory>
#include <string>

#include "primnav/gridworld/scene_io.hpp"

namespace primnav::fixture {

inline const gridworld::SceneFile& apartment() {
  static const gridworld::SceneFile file =
      gridworld::load_scene_file(std::string(PRIMNAV_DATA_DIR) + "/scenes/apartment_small.json");
  return file;
}

inline std::shared_ptr<const gridworld::Scene> apartment_scene() {
  static const auto scene = std::make_shared<const gridworld::Scene>(apartment().scene);
  return scene;
}

inline gridworld::Episode apartment_episode(const std::string& id) {
  for (const auto& e : apartment().episodes)
    if (e.id == id) return e;
  throw LookupError("no fixture episode '" + id + "'");
}

}  // namespace primnav::fixture
