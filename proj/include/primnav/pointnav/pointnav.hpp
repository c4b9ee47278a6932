#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "primnav/explorer/maps.hpp"
#include "primnav/gridworld/world.hpp"

namespace primnav::pointnav {

struct NavConfig {
  double tolerance = 0.25;        // meters to the goal point for "reached"
  double heading_deadband = 15.0; // degrees
  int inflation = 1;              // cells
  double inflation_penalty = 0.25; // extra cost fraction for entering an inflated cell
  double goal_snap_radius = 1.0;  // meters; goals inside obstacles snap to a free cell this close
  double waypoint_reach = 0.15;   // intermediate waypoints closer than this are dropped
  int stall_turns = 24;           // consecutive turns before the follower gives up
};

struct Path {
  std::vector<Point> waypoints;  // excludes the start
  double total_length = 0.0;     // start through every waypoint
  std::vector<Cell> cells;       // dense grid path, start cell first
};

enum class NavStatus { kReached, kBlocked, kBudgetExhausted };

std::string to_string(NavStatus s);
NavStatus nav_status_from_string(std::string_view s);

struct NavOutcome {
  NavStatus status = NavStatus::kBlocked;
  int steps_used = 0;
  double final_distance = 0.0;

  friend bool operator==(const NavOutcome&, const NavOutcome&) = default;
};

// A* over the 8-connected map with unknown cells passable and no corner cutting.
// Cells within `config.inflation` of an obstacle cost `1 + inflation_penalty` times
// as much to enter (waived around start and goal). The dense cell path is then
// shortened to waypoints joined by obstacle-free segments. Returns nullopt when the
// goal is unreachable or sits in an obstacle with no free cell within the snap radius.
std::optional<Path> plan_path(const explorer::ObstacleMap& map, Point start, Point goal,
                              const NavConfig& config = {});

// One action toward the path. Within tolerance of the final waypoint the agent still
// steps forward when that brings it strictly closer without leaving tolerance, so a
// straight run ends on the goal rather than a step short; otherwise it stops. Outside
// tolerance it turns toward the first waypoint when the heading error exceeds the
// deadband and walks forward otherwise. With a map, Forward into a known-occupied
// cell is replaced by a turn.
gridworld::Action next_action(const gridworld::AgentPose& pose, const Path& path, const NavConfig& config = {},
                              const explorer::ObstacleMap* map = nullptr,
                              const gridworld::AgentConfig& agent = {});

// Stateful follower: keeps the current plan and replans only when the goal changes,
// the last Forward collided, or a known obstacle appears on the stored path. When the
// heading that points at the path clips an obstacle, it commits to the nearest
// neighbouring heading with a clear step that still makes progress, and takes that
// step. A long run of turns with no Forward reports the goal as blocked.
class Navigator {
 public:
  explicit Navigator(NavConfig config = {}) : config_(config) {}

  struct Decision {
    gridworld::Action action = gridworld::Action::kStop;
    bool blocked = false;
  };

  Decision decide(explorer::ObstacleMap& map, const gridworld::AgentPose& pose, Point goal, bool last_collided,
                  const gridworld::AgentConfig& agent = {});
  void reset() { path_.reset(); }
  const std::optional<Path>& path() const { return path_; }
  int plan_count() const { return plan_count_; }
  const NavConfig& config() const { return config_; }

 private:
  bool path_invalidated(const explorer::ObstacleMap& map) const;
  void prune(const explorer::ObstacleMap& map, const gridworld::AgentPose& pose);
  Decision counted(gridworld::Action a);
  std::optional<double> sidestep(const explorer::ObstacleMap& map, const gridworld::AgentPose& pose, Point target,
                                 const gridworld::AgentConfig& agent) const;

  NavConfig config_;
  std::optional<Path> path_;
  Point goal_;
  int plan_count_ = 0;
  std::optional<double> commit_heading_;
  int turns_in_a_row_ = 0;
};

using StepHook = std::function<void(gridworld::Action, const gridworld::Observation&)>;

// Drives the world toward `goal` for at most `budget` actions, folding every depth scan
// into `map`. Never issues the world's Stop: reaching the point is reported through the
// outcome and leaves the decision to declare success with the caller.
NavOutcome navigate_to(gridworld::WorldState& world, explorer::ObstacleMap& map, Point goal, int budget,
                       const NavConfig& config = {}, const StepHook& after_step = {});

}  // namespace primnav::pointnav
