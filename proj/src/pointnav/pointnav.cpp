#include "primnav/pointnav/pointnav.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "primnav/explorer/kernels.hpp"
#include "primnav/gridworld/geodesic.hpp"
#include "primnav/gridworld/raycast.hpp"

namespace primnav::pointnav {

using explorer::ObstacleMap;
using explorer::Occupancy;
using gridworld::Action;

std::string to_string(NavStatus s) {
  switch (s) {
    case NavStatus::kReached: return "reached";
    case NavStatus::kBlocked: return "blocked";
    case NavStatus::kBudgetExhausted: return "budget_exhausted";
  }
  return "unknown";
}

NavStatus nav_status_from_string(std::string_view s) {
  if (s == "reached") return NavStatus::kReached;
  if (s == "blocked") return NavStatus::kBlocked;
  if (s == "budget_exhausted") return NavStatus::kBudgetExhausted;
  throw FormatError("unknown navigation status '" + std::string(s) + "'");
}

namespace {

bool occupied(const ObstacleMap& map, const Cell& c) { return map.at(c) == Occupancy::kOccupied; }

bool inflated(const ObstacleMap& map, const Cell& c, int radius) {
  for (int dr = -radius; dr <= radius; ++dr)
    for (int dc = -radius; dc <= radius; ++dc)
      if ((dr != 0 || dc != 0) && occupied(map, {c.row + dr, c.col + dc})) return true;
  return false;
}

// Cells the planner may stand on: anything not known to be occupied. `always` passes
// even if occupied, since a collision may have marked the agent's own cell.
struct Passability {
  const ObstacleMap& map;
  std::optional<Cell> always;

  bool operator()(const Cell& c) const {
    if (!map.geometry().in_bounds(c)) return false;
    if (always && c == *always) return true;
    return !occupied(map, c);
  }
};

// Cost multiplier for entering a cell: cells within `inflation` of an obstacle cost
// more unless exempt, so paths keep clear of walls without giving up narrow gaps.
struct Inflation {
  const ObstacleMap& map;
  int radius;
  double penalty;
  const std::vector<std::uint8_t>& exempt;

  double operator()(const Cell& c) const {
    if (radius <= 0 || exempt[map.geometry().index(c)]) return 1.0;
    return inflated(map, c, radius) ? 1.0 + penalty : 1.0;
  }
};

std::optional<std::vector<Cell>> astar(const ObstacleMap& map, Cell start, Cell goal, const Passability& ok,
                                       const Inflation& weight) {
  const auto& g = map.geometry();
  const std::size_t n = g.size();
  std::vector<double> cost(n, kInfinity);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  auto h = [&](const Cell& c) {
    const double dr = std::abs(c.row - goal.row), dc = std::abs(c.col - goal.col);
    return (std::max(dr, dc) + (gridworld::kSqrt2 - 1.0) * std::min(dr, dc)) * g.resolution;
  };
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  cost[g.index(start)] = 0.0;
  open.push({h(start), g.index(start)});
  const std::size_t goal_idx = g.index(goal);
  while (!open.empty()) {
    const auto [f, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (idx == goal_idx) break;
    const Cell c{static_cast<int>(idx / static_cast<std::size_t>(g.cols)),
                 static_cast<int>(idx % static_cast<std::size_t>(g.cols))};
    for (const auto& m : gridworld::kMoves8) {
      const Cell nb{c.row + m.drow, c.col + m.dcol};
      if (!ok(nb)) continue;
      if (m.drow != 0 && m.dcol != 0 && (!ok({c.row + m.drow, c.col}) || !ok({c.row, c.col + m.dcol}))) continue;
      const std::size_t ni = g.index(nb);
      const double nc = cost[idx] + m.cost * g.resolution * weight(nb);
      if (nc < cost[ni] - 1e-12) {
        cost[ni] = nc;
        parent[ni] = static_cast<std::int64_t>(idx);
        open.push({nc + h(nb), ni});
      }
    }
  }
  if (!closed[goal_idx]) return std::nullopt;
  std::vector<Cell> cells;
  for (std::int64_t i = static_cast<std::int64_t>(goal_idx); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    const auto u = static_cast<std::size_t>(i);
    cells.push_back({static_cast<int>(u / static_cast<std::size_t>(g.cols)),
                     static_cast<int>(u % static_cast<std::size_t>(g.cols))});
  }
  std::reverse(cells.begin(), cells.end());
  return cells;
}

bool line_clear(const ObstacleMap& map, Point a, Point b, const Passability& ok) {
  const auto& g = map.geometry();
  return gridworld::segment_clear(g.resolution, a - g.origin, b - g.origin, [&](const Cell& c) { return !ok(c); });
}

std::optional<Cell> snap_goal(const ObstacleMap& map, Point goal, double radius) {
  const auto& g = map.geometry();
  const Cell gc = g.cell_of(goal);
  if (g.in_bounds(gc) && !occupied(map, gc)) return gc;
  const int reach = static_cast<int>(std::ceil(radius / g.resolution)) + 1;
  std::optional<Cell> best;
  double best_d = kInfinity;
  for (int r = gc.row - reach; r <= gc.row + reach; ++r) {
    for (int c = gc.col - reach; c <= gc.col + reach; ++c) {
      const Cell cell{r, c};
      if (!g.in_bounds(cell) || occupied(map, cell)) continue;
      const double d = distance(g.center_of(cell), goal);
      if (d <= radius && d < best_d - 1e-12) {
        best_d = d;
        best = cell;
      }
    }
  }
  return best;
}

bool forward_clear(const ObstacleMap& map, Point pos, double heading, double step) {
  const auto& g = map.geometry();
  const Point dest = pos + gridworld::heading_vector(heading) * step;
  return !occupied(map, g.cell_of(dest)) &&
         gridworld::segment_clear(g.resolution, pos - g.origin, dest - g.origin,
                                  [&](const Cell& c) { return occupied(map, c); });
}

double heading_error(Point pos, double heading, Point target) {
  const Point d = target - pos;
  if (d.norm() < 1e-12) return 0.0;
  return wrap180(rad2deg(std::atan2(d.y, d.x)) - heading);
}

// First waypoint farther than the reach distance, or the final one.
Point steering_target(const Path& path, Point pos, double reach) {
  for (const auto& wp : path.waypoints)
    if (distance(pos, wp) > reach) return wp;
  return path.waypoints.back();
}

Action turn_toward(double err) { return err > 0 ? Action::kMoveRight : Action::kMoveLeft; }

}  // namespace

std::optional<Path> plan_path(const ObstacleMap& map, Point start, Point goal, const NavConfig& config) {
  const auto& g = map.geometry();
  const Cell sc = g.cell_of(start);
  if (!g.in_bounds(sc)) return std::nullopt;
  const auto gc = snap_goal(map, goal, config.goal_snap_radius);
  if (!gc) return std::nullopt;
  const Point end = *gc == g.cell_of(goal) ? goal : g.center_of(*gc);

  std::vector<std::uint8_t> exempt(g.size(), 0);
  // No inflation cost next to the endpoints: an agent standing by a wall has to step
  // away from it, and a goal by a wall has to be approached.
  for (const Cell& e : {sc, *gc})
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc)
        if (g.in_bounds({e.row + dr, e.col + dc})) exempt[g.index({e.row + dr, e.col + dc})] = 1;
  const Passability ok{map, sc};
  const auto cells = astar(map, sc, *gc, ok, Inflation{map, config.inflation, config.inflation_penalty, exempt});
  if (!cells) return std::nullopt;

  Path path;
  path.cells = *cells;

  Point anchor = start;
  std::size_t k = 0;
  const std::size_t last = path.cells.size() - 1;
  while (k < last) {
    std::size_t j = k + 1;
    while (j < last && line_clear(map, anchor, g.center_of(path.cells[j + 1]), ok)) ++j;
    const Point wp = j == last ? end : g.center_of(path.cells[j]);
    path.waypoints.push_back(wp);
    anchor = wp;
    k = j;
  }
  if (path.waypoints.empty() || !(path.waypoints.back() == end)) path.waypoints.push_back(end);

  Point prev = start;
  for (const auto& wp : path.waypoints) {
    path.total_length += distance(prev, wp);
    prev = wp;
  }
  return path;
}

Action next_action(const gridworld::AgentPose& pose, const Path& path, const NavConfig& config,
                   const ObstacleMap* map, const gridworld::AgentConfig& agent) {
  if (path.waypoints.empty()) throw ValidationError("next_action needs a non-empty path");
  const Point pos = pose.position();
  const Point final_wp = path.waypoints.back();
  const Point dest = pos + gridworld::heading_vector(pose.heading) * agent.forward_step;

  const bool forward_ok = !map || forward_clear(*map, pos, pose.heading, agent.forward_step);
  auto err_to = [&](Point target) { return heading_error(pos, pose.heading, target); };

  const double d_final = distance(pos, final_wp);
  if (d_final <= config.tolerance) {
    const double d_next = distance(dest, final_wp);
    if (forward_ok && std::abs(err_to(final_wp)) <= config.heading_deadband && d_next < d_final - 1e-9 &&
        d_next <= config.tolerance)
      return Action::kForward;
    return Action::kStop;
  }

  const double err = err_to(steering_target(path, pos, config.waypoint_reach));
  if (std::abs(err) > config.heading_deadband) return turn_toward(err);
  if (!forward_ok) return err >= 0 ? Action::kMoveRight : Action::kMoveLeft;
  return Action::kForward;
}

bool Navigator::path_invalidated(const ObstacleMap& map) const {
  const auto& cells = path_->cells;
  for (std::size_t i = 1; i < cells.size(); ++i)
    if (occupied(map, cells[i])) return true;
  return false;
}

void Navigator::prune(const ObstacleMap& map, const gridworld::AgentPose& pose) {
  auto& wps = path_->waypoints;
  const Point pos = pose.position();
  const Passability ok{map, std::nullopt};
  while (wps.size() > 1 && (distance(pos, wps.front()) <= config_.waypoint_reach || line_clear(map, pos, wps[1], ok)))
    wps.erase(wps.begin());
}

Navigator::Decision Navigator::decide(ObstacleMap& map, const gridworld::AgentPose& pose, Point goal,
                                      bool last_collided, const gridworld::AgentConfig& agent) {
  const Point pos = pose.position();
  bool replan = !path_ || distance(goal, goal_) > 1e-9 || last_collided || path_invalidated(map);
  if (!replan && distance(pos, path_->waypoints.front()) > config_.waypoint_reach) {
    if (!line_clear(map, pos, path_->waypoints.front(), Passability{map, std::nullopt})) replan = true;
  }
  if (replan) {
    goal_ = goal;
    path_ = plan_path(map, pos, goal, config_);
    ++plan_count_;
    commit_heading_.reset();
    if (!path_) {
      if (distance(pos, goal) <= config_.tolerance) return {Action::kStop, false};
      return {Action::kStop, true};
    }
  }
  prune(map, pose);

  if (commit_heading_) {
    const double to_go = wrap180(*commit_heading_ - pose.heading);
    if (std::abs(to_go) > 1e-6) return counted(turn_toward(to_go));
    commit_heading_.reset();
    if (forward_clear(map, pos, pose.heading, agent.forward_step)) return counted(Action::kForward);
  }

  const Action a = next_action(pose, *path_, config_, &map, agent);
  if (gridworld::is_rotation(a)) {
    const Point target = steering_target(*path_, pos, config_.waypoint_reach);
    if (std::abs(heading_error(pos, pose.heading, target)) <= config_.heading_deadband) {
      // The aligned step clips an obstacle.
      if (auto h = sidestep(map, pose, target, agent)) {
        commit_heading_ = *h;
        return counted(turn_toward(wrap180(*h - pose.heading)));
      }
      path_.reset();
    }
  }
  return counted(a);
}

std::optional<double> Navigator::sidestep(const ObstacleMap& map, const gridworld::AgentPose& pose, Point target,
                                          const gridworld::AgentConfig& agent) const {
  const Point pos = pose.position();
  std::optional<double> best;
  double best_err = 90.0;
  const int quanta = static_cast<int>(std::lround(180.0 / agent.turn_deg));
  for (int k = 1; k < quanta; ++k) {
    for (int sign : {1, -1}) {
      const double h = wrap360(pose.heading + sign * k * agent.turn_deg);
      const double e = std::abs(heading_error(pos, h, target));
      if (e < best_err - 1e-9 && forward_clear(map, pos, h, agent.forward_step)) {
        best = h;
        best_err = e;
      }
    }
  }
  return best;
}

Navigator::Decision Navigator::counted(Action a) {
  turns_in_a_row_ = gridworld::is_rotation(a) ? turns_in_a_row_ + 1 : 0;
  if (turns_in_a_row_ > config_.stall_turns) {
    turns_in_a_row_ = 0;
    commit_heading_.reset();
    return {Action::kStop, true};
  }
  return {a, false};
}

NavOutcome navigate_to(gridworld::WorldState& world, ObstacleMap& map, Point goal, int budget,
                       const NavConfig& config, const StepHook& after_step) {
  if (budget <= 0) throw ValidationError("navigate_to budget must be positive");
  const auto& g = map.geometry();
  auto integrate = [&](const gridworld::Observation& obs) {
    explorer::update_obstacle_map(map, world.pose(), obs.depth_scan, world.sensor());
    const Cell here = g.cell_of(world.pose().position());
    if (g.in_bounds(here)) map.mark_free(here);
  };
  integrate(world.sense());

  Navigator nav(config);
  NavOutcome out;
  bool collided = false;
  auto finish = [&](NavStatus s) {
    out.status = s;
    out.final_distance = distance(world.pose().position(), goal);
    return out;
  };
  for (;;) {
    if (world.terminated()) return finish(NavStatus::kBudgetExhausted);
    const auto d = nav.decide(map, world.pose(), goal, collided, world.agent_config());
    if (d.blocked) return finish(NavStatus::kBlocked);
    if (d.action == Action::kStop) return finish(NavStatus::kReached);
    if (out.steps_used >= budget) return finish(NavStatus::kBudgetExhausted);
    const Point dest = world.pose().position() +
                       gridworld::heading_vector(world.pose().heading) * world.agent_config().forward_step;
    const auto obs = world.step(d.action);
    ++out.steps_used;
    integrate(obs);
    collided = obs.collided;
    if (collided) {
      const Cell dc = g.cell_of(dest);
      if (g.in_bounds(dc) && dc != g.cell_of(world.pose().position())) map.mark_occupied(dc);
    }
    if (after_step) after_step(d.action, obs);
  }
}

}  // namespace primnav::pointnav
