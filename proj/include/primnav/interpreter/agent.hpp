#pragma once

#include <set>
#include <string>
#include <vector>

#include "primnav/explorer/explorer.hpp"
#include "primnav/gridworld/world.hpp"
#include "primnav/perception/oracle.hpp"
#include "primnav/pointnav/pointnav.hpp"

namespace primnav::interp {

struct AgentOptions {
  explorer::ExplorerConfig explorer;
  pointnav::NavConfig nav;
  perception::NoiseConfig noise;
  // explore/navigate give up after this many consecutive decisions without an action.
  int max_idle_decisions = 2000;
};

struct FoundEvent {
  std::size_t goal_index = 0;
  int step = 0;
  Point position;
  bool reached = false;
  // Objects returned by detect during this goal that lie within the success radius of
  // the stop position.
  std::vector<int> nearby_detected;
};

// What the agent saw and did, kept for failure attribution.
struct Evidence {
  std::vector<std::string> queries;
  std::set<int> sighted_targets;   // targets of the active goal that entered a sighting
  std::set<int> detected_targets;  // targets of the active goal returned by detect
  std::vector<FoundEvent> found_events;
  std::vector<gridworld::Action> actions;
};

// The world handle the primitives act through. Every action goes through act(), which
// enforces the step budget, finishes the initialization spin first, and folds each
// observation into the exploration maps.
class Agent {
 public:
  Agent(gridworld::WorldState& world, const perception::Embedder& embedder, AgentOptions options = {});

  gridworld::WorldState& world() { return *world_; }
  const gridworld::WorldState& world() const { return *world_; }
  explorer::ExplorerState& explorer() { return explorer_; }
  const explorer::ExplorerState& explorer() const { return explorer_; }
  const perception::Embedder& embedder() const { return *embedder_; }
  const AgentOptions& options() const { return options_; }
  const gridworld::Observation& observation() const { return obs_; }
  const Evidence& evidence() const { return evidence_; }

  void set_budget(int steps) { remaining_ = steps; }
  int budget_remaining() const { return remaining_; }
  bool out_of_steps() const { return remaining_ <= 0 || world_->terminated(); }

  // Starts a new goal: reopens acting and re-arms per-goal exploration state.
  void begin_goal();
  // True once declare_found stopped for the current goal; further actions are refused.
  bool goal_closed() const { return goal_closed_; }

  // False when the action could not be taken (budget spent, goal closed, episode over).
  bool act(gridworld::Action action);

  // Oracle detections in the current view, with world-frame positions.
  std::vector<perception::Detection> detect(const std::vector<std::string>& queries, bool log_query = true);

  // Explores until `target` is detected; the target counts as a query in the evidence.
  pointnav::NavOutcome explore(const std::string& target);
  pointnav::NavOutcome navigate(Point goal);
  // Positive degrees turn right. Must be a multiple of the turn angle.
  pointnav::NavOutcome turn(int degrees);
  // Issues the world Stop. Returns whether the goal counted as reached.
  bool declare_found();

 private:
  void observe(const gridworld::Observation& obs);
  bool step_once(gridworld::Action action);
  pointnav::NavOutcome outcome(pointnav::NavStatus status, int start_steps, double remaining) const;

  gridworld::WorldState* world_;
  const perception::Embedder* embedder_;
  AgentOptions options_;
  explorer::ExplorerState explorer_;
  gridworld::Observation obs_;
  int remaining_;
  Evidence evidence_;
  std::vector<perception::Detection> goal_detections_;
  std::size_t detections_goal_ = 0;
  bool goal_closed_ = false;
};

}  // namespace primnav::interp
