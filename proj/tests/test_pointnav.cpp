#include <gtest/gtest.h>

#include <memory>

#include "oracles.hpp"
#include "primnav/gridworld/generator.hpp"
#include "primnav/pointnav/pointnav.hpp"

using namespace primnav;
using gridworld::Action;
using pointnav::NavStatus;

namespace {

// Open rectangular room with a one-cell wall border.
std::shared_ptr<gridworld::Scene> open_room(int rows, int cols) {
  auto s = std::make_shared<gridworld::Scene>();
  s->name = "open";
  s->grid = gridworld::Grid(rows, cols, gridworld::CellKind::kFree);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1) s->grid.set({r, c}, gridworld::CellKind::kObstacle);
  return s;
}

gridworld::Episode episode_at(double x, double y, double heading) {
  gridworld::Episode e;
  e.id = "t";
  e.scene_ref = "open";
  e.start_pose = {x, y, heading, 0.0};
  e.goals.push_back({gridworld::GoalKind::kCategory, "chair", {1}, std::nullopt});
  return e;
}

explorer::ObstacleMap empty_map(const gridworld::Scene& s) {
  return explorer::ObstacleMap({s.grid.rows(), s.grid.cols(), s.resolution, {0.0, 0.0}});
}

}  // namespace

TEST(PlanPath, StraightCorridorIsStraight) {
  auto scene = open_room(5, 30);
  auto map = oracle::known_map(*scene);
  auto path = pointnav::plan_path(map, {0.625, 0.625}, {5.625, 0.625});
  ASSERT_TRUE(path);
  ASSERT_EQ(path->waypoints.size(), 1u);
  EXPECT_NEAR(path->total_length, 5.0, 1e-9);
}

TEST(PlanPath, UWallMatchesDijkstra) {
  auto scene = open_room(20, 20);
  // U opening to the top: goal sits inside the cup.
  for (int r = 5; r <= 14; ++r) {
    scene->grid.set({r, 5}, gridworld::CellKind::kObstacle);
    scene->grid.set({r, 14}, gridworld::CellKind::kObstacle);
  }
  for (int c = 5; c <= 14; ++c) scene->grid.set({14, c}, gridworld::CellKind::kObstacle);
  auto map = oracle::known_map(*scene);
  const Cell start{17, 9}, goal{11, 9};
  auto path = pointnav::plan_path(map, scene->center_of(start), scene->center_of(goal));
  ASSERT_TRUE(path);
  // Entering a cell next to a wall costs 1.25x, except around the endpoints.
  auto near_wall = oracle::inflate(scene->grid, 1, {});
  auto weight = [&](const Cell& c) {
    const bool by_endpoint = (std::abs(c.row - start.row) <= 1 && std::abs(c.col - start.col) <= 1) ||
                             (std::abs(c.row - goal.row) <= 1 && std::abs(c.col - goal.col) <= 1);
    return near_wall.at(c) == gridworld::CellKind::kObstacle && !by_endpoint ? 1.25 : 1.0;
  };
  auto weighted = oracle::relaxation_distances(scene->grid, scene->resolution, start, weight);
  double cost = 0.0, cell_len = 0.0;
  for (std::size_t i = 1; i < path->cells.size(); ++i) {
    const double step = distance(scene->center_of(path->cells[i - 1]), scene->center_of(path->cells[i]));
    cell_len += step;
    cost += step * weight(path->cells[i]);
  }
  EXPECT_NEAR(cost, weighted[scene->grid.index(goal)], 1e-9);
  // Shortcutting the dense path never lengthens it, and it cannot beat the plain grid optimum
  // by more than the any-angle saving.
  const double opt = oracle::relaxation_distances(scene->grid, scene->resolution, start)[scene->grid.index(goal)];
  EXPECT_LE(path->total_length, cell_len + 1e-9);
  EXPECT_GE(cell_len, opt - 1e-9);
  EXPECT_GT(path->total_length, distance(scene->center_of(start), scene->center_of(goal)));
}

TEST(PlanPath, SealedRoomIsBlocked) {
  auto scene = open_room(12, 12);
  for (int i = 3; i <= 8; ++i) {
    scene->grid.set({3, i}, gridworld::CellKind::kObstacle);
    scene->grid.set({8, i}, gridworld::CellKind::kObstacle);
    scene->grid.set({i, 3}, gridworld::CellKind::kObstacle);
    scene->grid.set({i, 8}, gridworld::CellKind::kObstacle);
  }
  auto map = oracle::known_map(*scene);
  EXPECT_FALSE(pointnav::plan_path(map, scene->center_of({1, 1}), scene->center_of({5, 5})));
}

TEST(PlanPath, GoalInObstacleSnapsToNearbyFreeCell) {
  auto scene = open_room(10, 10);
  scene->grid.set({5, 5}, gridworld::CellKind::kObstacle);
  auto map = oracle::known_map(*scene);
  auto path = pointnav::plan_path(map, scene->center_of({1, 1}), scene->center_of({5, 5}));
  ASSERT_TRUE(path);
  EXPECT_LE(distance(path->waypoints.back(), scene->center_of({5, 5})), 1.0);
  EXPECT_NE(map.geometry().cell_of(path->waypoints.back()), (Cell{5, 5}));
}

TEST(NextAction, Examples) {
  pointnav::Path path;
  path.waypoints = {{1.0, 1.1}};
  EXPECT_EQ(pointnav::next_action({1.0, 1.0, 0.0, 0.0}, path), Action::kStop);

  // Heading 0 looks along +x; a waypoint at -y is 90 degrees counter-clockwise (left).
  path.waypoints = {{1.0, -1.0}};
  EXPECT_EQ(pointnav::next_action({1.0, 1.0, 0.0, 0.0}, path), Action::kMoveLeft);
  path.waypoints = {{1.0, 3.0}};
  EXPECT_EQ(pointnav::next_action({1.0, 1.0, 0.0, 0.0}, path), Action::kMoveRight);

  path.waypoints = {{3.0, 1.0}};
  EXPECT_EQ(pointnav::next_action({1.0, 1.0, 0.0, 0.0}, path), Action::kForward);
}

TEST(NextAction, NeverForwardIntoKnownObstacle) {
  auto scene = open_room(8, 8);
  scene->grid.set({3, 4}, gridworld::CellKind::kObstacle);
  auto map = oracle::known_map(*scene);
  pointnav::Path path;
  path.waypoints = {scene->center_of({3, 6})};
  auto a = pointnav::next_action({scene->center_of({3, 3}).x, scene->center_of({3, 3}).y, 0.0, 0.0}, path, {}, &map);
  EXPECT_NE(a, Action::kForward);
}

TEST(NavigateTo, OpenStraightGoalTakesTwelveForwards) {
  auto scene = open_room(6, 24);
  gridworld::WorldState world(scene, episode_at(0.625, 0.625, 0.0));
  auto map = empty_map(*scene);
  std::vector<Action> actions;
  auto out = pointnav::navigate_to(world, map, {3.625, 0.625}, 100, {},
                                   [&](Action a, const gridworld::Observation&) { actions.push_back(a); });
  EXPECT_EQ(out.status, NavStatus::kReached);
  EXPECT_EQ(out.steps_used, 12);
  EXPECT_EQ(std::count(actions.begin(), actions.end(), Action::kForward), 12);
  EXPECT_NEAR(out.final_distance, 0.0, 1e-9);
}

TEST(NavigateTo, BudgetOneIsExhausted) {
  auto scene = open_room(6, 24);
  gridworld::WorldState world(scene, episode_at(0.625, 0.625, 0.0));
  auto map = empty_map(*scene);
  auto out = pointnav::navigate_to(world, map, {3.625, 0.625}, 1);
  EXPECT_EQ(out.status, NavStatus::kBudgetExhausted);
  EXPECT_EQ(out.steps_used, 1);
}

TEST(NavigateTo, ReplansAroundDiscoveredWall) {
  auto scene = open_room(16, 16);
  for (int c = 2; c <= 13; ++c) scene->grid.set({8, c}, gridworld::CellKind::kObstacle);
  const Cell start{12, 7}, goal{4, 7};
  const Point sp = scene->center_of(start), gp = scene->center_of(goal);
  gridworld::WorldState world(scene, episode_at(sp.x, sp.y, 270.0));
  auto map = empty_map(*scene);
  auto out = pointnav::navigate_to(world, map, gp, 400);
  EXPECT_EQ(out.status, NavStatus::kReached);
  EXPECT_GT(out.steps_used, static_cast<int>(std::ceil(distance(sp, gp) / 0.25)));
  // The wall forces a detour well beyond the straight line.
  EXPECT_GT(world.path_length(), distance(sp, gp) + 1.0);
}

TEST(NavigateTo, SealedGoalIsBlockedOnKnownMap) {
  auto scene = open_room(12, 12);
  for (int i = 3; i <= 8; ++i) {
    scene->grid.set({3, i}, gridworld::CellKind::kObstacle);
    scene->grid.set({8, i}, gridworld::CellKind::kObstacle);
    scene->grid.set({i, 3}, gridworld::CellKind::kObstacle);
    scene->grid.set({i, 8}, gridworld::CellKind::kObstacle);
  }
  gridworld::WorldState world(scene, episode_at(0.375, 0.375, 0.0));
  auto map = oracle::known_map(*scene);
  auto out = pointnav::navigate_to(world, map, scene->center_of({5, 5}), 100);
  EXPECT_EQ(out.status, NavStatus::kBlocked);
}

// Property: on fully known generated maps the walked path stays within 10% of the grid
// optimum and every run ends within budget + 1 actions.
TEST(NavigateTo, NearOptimalOnKnownGeneratedMaps) {
  int checked = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; checked < 100; ++seed) {
    gridworld::GeneratorConfig cfg;
    cfg.name = "open";
    auto scene = std::make_shared<gridworld::Scene>(gridworld::generate_scene(cfg, seed));
    Rng rng(mix_seed(seed, 77));
    std::vector<Cell> free_cells;
    for (int r = 0; r < scene->grid.rows(); ++r)
      for (int c = 0; c < scene->grid.cols(); ++c)
        if (scene->grid.is_free({r, c})) free_cells.push_back({r, c});
    const Cell s = free_cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free_cells.size()) - 1))];
    const Cell t = free_cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free_cells.size()) - 1))];
    auto oracle = oracle::relaxation_distances(scene->grid, scene->resolution, s);
    const double opt = oracle[scene->grid.index(t)];
    if (opt < 1.0) continue;
    const Point sp = scene->center_of(s), tp = scene->center_of(t);
    gridworld::WorldState world(scene, episode_at(sp.x, sp.y, 30.0 * rng.uniform_int(0, 11)));
    auto map = oracle::known_map(*scene);
    const int budget = 2000;
    auto out = pointnav::navigate_to(world, map, tp, budget);
    ASSERT_EQ(out.status, NavStatus::kReached) << "seed " << seed;
    ASSERT_LE(world.steps_taken(), budget + 1);
    const double ratio = world.path_length() / opt;
    worst = std::max(worst, ratio);
    EXPECT_LE(ratio, 1.1) << "seed " << seed << " opt " << opt;
    ++checked;
  }
  RecordProperty("worst_ratio", std::to_string(worst));
}
