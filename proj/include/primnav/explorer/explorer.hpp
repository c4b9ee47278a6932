#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "primnav/explorer/kernels.hpp"
#include "primnav/explorer/maps.hpp"
#include "primnav/perception/oracle.hpp"

namespace primnav::explorer {

inline constexpr int kDefaultMinFrontierSize = 3;

// Free cells 4-adjacent to unknown, grouped 8-connected; groups under `min_size`
// are dropped. Components are ordered by their lowest (row, col) cell.
std::vector<Frontier> extract_frontiers(const ObstacleMap& map, int min_size = kDefaultMinFrontierSize);

// Highest value at the midpoint cell wins; ties go to the shorter geodesic distance
// from `agent` over the map (unknown passable), then the lexicographically smaller
// midpoint cell. Returns the index into `frontiers`.
std::optional<std::size_t> select_frontier(const std::vector<Frontier>& frontiers, const ValueMap& vmap,
                                           const ObstacleMap& map, Point agent);

// Center of the argmax cell when its value is strictly above the threshold. Ties go to
// the lowest (row, col).
std::optional<Point> memory_recall(const ValueMap& vmap, MemoryThreshold threshold);

struct ExplorerConfig {
  MemoryThreshold threshold{0.4};
  int min_frontier_size = kDefaultMinFrontierSize;
  int spin_actions = 12;
  bool spin_every_goal = false;
  // Rotations spent looking around at a recalled point before it counts as a miss.
  int confirm_turns = 12;
  // Cells within this radius of a missed memory point are zeroed.
  double miss_clear_radius = 1.0;
};

enum class DirectiveKind { kRotate, kGoto, kTargetFound, kExhausted };

std::string to_string(DirectiveKind k);

struct Directive {
  DirectiveKind kind = DirectiveKind::kExhausted;
  Point point;
  bool memory_driven = false;
  int object_id = 0;
};

// Per-episode exploration state: obstacle, feature and value maps plus the current
// exploration goal. The caller drives it one action at a time: integrate the latest
// observation, ask explore_step for a directive, act on it, and report arrival or
// unreachability of goto points.
class ExplorerState {
 public:
  ExplorerState(MapGeometry geometry, const perception::Embedder& embedder, ExplorerConfig config = {});

  const ExplorerConfig& config() const { return config_; }
  const ObstacleMap& obstacle_map() const { return obstacles_; }
  const FeatureMap& feature_map() const { return features_; }
  const ValueMap& value_map() const { return values_; }
  ObstacleMap& obstacle_map() { return obstacles_; }

  // Switches the navigation target. A different target recomputes the value map and
  // attempts a memory recall; the same target again is a no-op.
  void set_target(const std::string& text);
  const std::optional<std::string>& target() const { return target_; }
  const perception::EmbeddingVector& target_embedding() const { return target_embedding_; }
  int recompute_count() const { return recompute_count_; }

  // Re-arms the initialization spin when configured to spin for every goal.
  void begin_goal();
  // Rotations of the initialization spin still owed. Callers that move the agent
  // without explore_step consume them with take_spin_action.
  int spin_remaining() const { return spin_remaining_; }
  void take_spin_action();

  // Folds one observation into the maps.
  void integrate(const gridworld::AgentPose& pose, const gridworld::Observation& obs,
                 const perception::EmbeddingVector& obs_embedding, const gridworld::SensorConfig& sensor);

  // Next directive given the current pose and the detections of the target in view.
  Directive explore_step(const gridworld::AgentPose& pose, const std::vector<perception::Detection>& detections);

  // The last goto point was reached or proved unreachable.
  void report_arrived();
  void report_unreachable();

  const std::optional<Point>& memory_goal() const { return memory_goal_; }
  const std::set<Cell>& missed_memory_cells() const { return missed_; }

 private:
  void fail_memory_goal();
  bool still_frontier(const Cell& c) const;
  void blacklist_around(const Cell& c);

  ExplorerConfig config_;
  const perception::Embedder* embedder_;
  ObstacleMap obstacles_;
  FeatureMap features_;
  ValueMap values_;

  std::optional<std::string> target_;
  perception::EmbeddingVector target_embedding_;
  int recompute_count_ = 0;

  int spin_remaining_ = 0;
  int confirm_remaining_ = 0;
  std::optional<Point> memory_goal_;
  bool memory_arrived_ = false;
  std::optional<Cell> frontier_goal_;
  bool frontier_done_ = false;
  std::set<Cell> missed_;
  std::set<Cell> blacklist_;
};

// Writes <stem>_obstacle.pgm, <stem>_value.pgm, <stem>_confidence.pgm and <stem>.json
// (resolution, origin, layer file names). Returns the written paths.
std::vector<std::string> dump_maps(const ExplorerState& state, const std::string& stem);

}  // namespace primnav::explorer
