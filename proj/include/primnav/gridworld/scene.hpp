#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "primnav/common.hpp"

namespace primnav::gridworld {

enum class CellKind : std::uint8_t { kFree = 0, kObstacle = 1 };

// Row-major 2-D grid of free/obstacle cells. Row index grows with y, column with x.
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, CellKind fill = CellKind::kFree);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return cells_.empty(); }

  bool in_bounds(const Cell& c) const {
    return c.row >= 0 && c.col >= 0 && c.row < rows_ && c.col < cols_;
  }
  CellKind at(const Cell& c) const { return cells_[index(c)]; }
  void set(const Cell& c, CellKind k) { cells_[index(c)] = k; }
  bool is_free(const Cell& c) const { return in_bounds(c) && at(c) == CellKind::kFree; }

  std::size_t index(const Cell& c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c.col);
  }
  const std::vector<CellKind>& data() const { return cells_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<CellKind> cells_;
};

struct SceneObject {
  int id = 0;
  std::string category;
  std::string subcategory;
  std::map<std::string, std::string> attributes;
  Point position;
  std::optional<std::string> image_ref;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct Scene {
  std::string name;
  Grid grid;
  double resolution = 0.25;
  std::vector<SceneObject> objects;

  Cell cell_of(const Point& p) const {
    return {static_cast<int>(std::floor(p.y / resolution)),
            static_cast<int>(std::floor(p.x / resolution))};
  }
  Point center_of(const Cell& c) const {
    return {(c.col + 0.5) * resolution, (c.row + 0.5) * resolution};
  }
  bool is_free(const Point& p) const { return grid.is_free(cell_of(p)); }

  const SceneObject* find_object(int id) const;
  const SceneObject* find_by_image(std::string_view image_ref) const;

  // Throws ValidationError when an invariant does not hold.
  void validate() const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

enum class TaskKind { kOvon, kGoat, kMultion, kEqa };

std::string to_string(TaskKind k);
TaskKind task_kind_from_string(std::string_view s);

enum class GoalKind { kCategory, kDescription, kImage, kQuestion };

std::string to_string(GoalKind k);
GoalKind goal_kind_from_string(std::string_view s);

struct GoalSpec {
  GoalKind kind = GoalKind::kCategory;
  std::string payload;
  std::vector<int> target_ids;
  std::optional<std::string> ground_truth_answer;

  friend bool operator==(const GoalSpec&, const GoalSpec&) = default;
};

struct AgentPose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // degrees, [0, 360), clockwise on the y-down grid
  double pitch = 0.0;    // degrees, [-30, 30]

  Point position() const { return {x, y}; }
  friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

struct Episode {
  std::string id;
  std::string scene_ref;
  AgentPose start_pose;
  std::vector<GoalSpec> goals;
  TaskKind task_kind = TaskKind::kOvon;
  int step_budget_per_goal = 500;
  double success_radius = 1.0;

  void validate() const;
  friend bool operator==(const Episode&, const Episode&) = default;
};

}  // namespace primnav::gridworld
