#include "primnav/gridworld/scene.hpp"

#include <set>

namespace primnav::gridworld {

Grid::Grid(int rows, int cols, CellKind fill)
    : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows <= 0 || cols <= 0) throw ValidationError("grid dimensions must be positive");
}

const SceneObject* Scene::find_object(int id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const SceneObject* Scene::find_by_image(std::string_view image_ref) const {
  for (const auto& o : objects)
    if (o.image_ref && *o.image_ref == image_ref) return &o;
  return nullptr;
}

void Scene::validate() const {
  if (!(resolution > 0.0)) throw ValidationError("scene '" + name + "': resolution must be > 0");
  if (grid.empty()) throw ValidationError("scene '" + name + "': grid is empty");
  std::set<int> ids;
  for (const auto& o : objects) {
    if (o.category.empty())
      throw ValidationError("scene '" + name + "': object " + std::to_string(o.id) +
                            " has an empty category");
    if (!ids.insert(o.id).second)
      throw ValidationError("scene '" + name + "': duplicate object id " + std::to_string(o.id));
    Cell c = cell_of(o.position);
    if (!grid.in_bounds(c))
      throw ValidationError("scene '" + name + "': object " + std::to_string(o.id) +
                            " lies outside the grid");
    if (grid.at(c) != CellKind::kFree)
      throw ValidationError("scene '" + name + "': object " + std::to_string(o.id) +
                            " lies on an obstacle cell (row " + std::to_string(c.row) +
                            ", col " + std::to_string(c.col) + ")");
  }
}

std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::kOvon: return "ovon";
    case TaskKind::kGoat: return "goat";
    case TaskKind::kMultion: return "multion";
    case TaskKind::kEqa: return "eqa";
  }
  return "?";
}

TaskKind task_kind_from_string(std::string_view s) {
  if (s == "ovon") return TaskKind::kOvon;
  if (s == "goat") return TaskKind::kGoat;
  if (s == "multion") return TaskKind::kMultion;
  if (s == "eqa") return TaskKind::kEqa;
  throw ValidationError("unknown task kind '" + std::string(s) + "'");
}

std::string to_string(GoalKind k) {
  switch (k) {
    case GoalKind::kCategory: return "category";
    case GoalKind::kDescription: return "description";
    case GoalKind::kImage: return "image";
    case GoalKind::kQuestion: return "question";
  }
  return "?";
}

GoalKind goal_kind_from_string(std::string_view s) {
  if (s == "category") return GoalKind::kCategory;
  if (s == "description") return GoalKind::kDescription;
  if (s == "image") return GoalKind::kImage;
  if (s == "question") return GoalKind::kQuestion;
  throw ValidationError("unknown goal kind '" + std::string(s) + "'");
}

void Episode::validate() const {
  if (goals.empty()) throw ValidationError("episode '" + id + "': goals must be non-empty");
  if (step_budget_per_goal <= 0)
    throw ValidationError("episode '" + id + "': step_budget_per_goal must be > 0");
  if (!(success_radius > 0.0))
    throw ValidationError("episode '" + id + "': success_radius must be > 0");
  for (const auto& g : goals) {
    bool question = g.kind == GoalKind::kQuestion;
    if (!question && g.target_ids.empty())
      throw ValidationError("episode '" + id + "': navigation goal '" + g.payload +
                            "' has no target ids");
    if (question != g.ground_truth_answer.has_value())
      throw ValidationError("episode '" + id +
                            "': ground_truth_answer must be present exactly for question goals");
  }
}

}  // namespace primnav::gridworld
