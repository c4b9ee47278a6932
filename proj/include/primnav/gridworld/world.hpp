#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "primnav/gridworld/scene.hpp"

namespace primnav::gridworld {

enum class Action { kForward, kMoveLeft, kMoveRight, kLookUp, kLookDown, kStop };

std::string to_string(Action a);
Action action_from_string(std::string_view s);
bool is_rotation(Action a);

struct SensorConfig {
  double hfov_deg = 79.0;
  int depth_width = 64;
  double max_range = 5.0;
};

struct AgentConfig {
  double forward_step = 0.25;
  double turn_deg = 30.0;
  double pitch_step = 15.0;
  double pitch_limit = 30.0;
};

struct Sighting {
  int object_id = 0;
  std::string category;
  double bearing = 0.0;  // degrees relative to heading, positive clockwise
  double range = 0.0;    // meters

  friend bool operator==(const Sighting&, const Sighting&) = default;
};

struct RelativeGoal {
  double distance = 0.0;
  double heading_offset = 0.0;

  friend bool operator==(const RelativeGoal&, const RelativeGoal&) = default;
};

struct Observation {
  std::vector<Sighting> sightings;
  std::vector<double> depth_scan;
  std::optional<RelativeGoal> relative_goal;
  int steps_taken = 0;
  bool collided = false;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Outcome of each goal attempt as judged by the world when the agent stops or gives up.
struct GoalRecord {
  bool attempted = false;
  bool reached = false;
  bool stopped = false;
  std::optional<Point> stop_position;
  int steps_at_end = 0;
};

// Dynamic episode state. Owned by one episode loop; the scene is shared read-only.
class WorldState {
 public:
  WorldState(std::shared_ptr<const Scene> scene, Episode episode, SensorConfig sensor = {},
             AgentConfig agent = {});

  const Scene& scene() const { return *scene_; }
  const std::shared_ptr<const Scene>& scene_ptr() const { return scene_; }
  const Episode& episode() const { return episode_; }
  const SensorConfig& sensor() const { return sensor_; }
  const AgentConfig& agent_config() const { return agent_; }

  const AgentPose& pose() const { return pose_; }
  int steps_taken() const { return steps_taken_; }
  bool terminated() const { return terminated_; }
  std::size_t goal_index() const { return goal_index_; }

  // The active goal; later goals stay hidden until this one is resolved.
  const GoalSpec& current_goal() const;
  std::span<const GoalSpec> visible_goals() const;
  const std::vector<GoalRecord>& goal_records() const { return records_; }
  // True once the agent stopped away from every target of the active MultiON goal.
  bool wrong_found() const { return wrong_found_; }

  void set_nav_point(std::optional<Point> p) { nav_point_ = p; }
  const std::optional<Point>& nav_point() const { return nav_point_; }

  // Applies one action and returns the observation after it.
  Observation step(Action action);
  Observation sense() const;

  // Marks the active goal as given up (budget spent or program ended without a stop).
  void abandon_goal();

  double path_length() const { return path_length_; }
  bool last_collided() const { return last_collided_; }

 private:
  void resolve_goal(bool reached, bool stopped);

  std::shared_ptr<const Scene> scene_;
  Episode episode_;
  SensorConfig sensor_;
  AgentConfig agent_;
  AgentPose pose_;
  int steps_taken_ = 0;
  std::size_t goal_index_ = 0;
  bool terminated_ = false;
  bool wrong_found_ = false;
  bool last_collided_ = false;
  double path_length_ = 0.0;
  std::optional<Point> nav_point_;
  std::vector<GoalRecord> records_;
};

WorldState reset(std::shared_ptr<const Scene> scene, const Episode& episode,
                 SensorConfig sensor = {}, AgentConfig agent = {});

// Observation for an arbitrary pose; used by the world and by tests.
Observation sense_at(const Scene& scene, const AgentPose& pose, const SensorConfig& sensor);

// Euclidean distance from `p` to the nearest target object of `goal`.
double distance_to_targets(const Scene& scene, const GoalSpec& goal, const Point& p);

}  // namespace primnav::gridworld
