#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "primnav/gridworld/generator.hpp"
#include "primnav/gridworld/geodesic.hpp"
#include "primnav/gridworld/raycast.hpp"
#include "primnav/gridworld/scene_io.hpp"
#include "primnav/gridworld/world.hpp"

using namespace primnav;
using namespace primnav::gridworld;

namespace {

std::shared_ptr<Scene> open_room(int rows, int cols) {
  auto s = std::make_shared<Scene>();
  s->name = "room";
  s->grid = Grid(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1) s->grid.set({r, c}, CellKind::kObstacle);
  s->objects.push_back({1, "chair", "armchair", {{"color", "red"}}, {2.0, 1.0}, std::nullopt});
  return s;
}

Episode one_goal(Point start, double heading, TaskKind task = TaskKind::kOvon) {
  Episode e;
  e.id = "e";
  e.scene_ref = "room";
  e.start_pose = {start.x, start.y, heading, 0.0};
  e.goals.push_back({GoalKind::kCategory, "chair", {1}, std::nullopt});
  e.task_kind = task;
  return e;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

}  // namespace

TEST(Scene, ValidationCatchesBrokenInvariants) {
  auto s = *open_room(10, 10);
  EXPECT_NO_THROW(s.validate());
  auto on_wall = s;
  on_wall.objects[0].position = {0.1, 0.1};
  EXPECT_THROW(on_wall.validate(), ValidationError);
  auto dup = s;
  dup.objects.push_back(dup.objects[0]);
  dup.objects.back().position = {0.6, 0.6};
  EXPECT_THROW(dup.validate(), ValidationError);
  auto unnamed = s;
  unnamed.objects[0].category.clear();
  EXPECT_THROW(unnamed.validate(), ValidationError);
}

TEST(SceneIo, RoundTripsTheFixture) {
  const auto& f = fixture::apartment();
  const auto text = dump_scene_file(f.scene, f.episodes);
  const auto back = parse_scene_file(text);
  EXPECT_EQ(back.scene, f.scene);
  EXPECT_EQ(back.episodes, f.episodes);
  EXPECT_EQ(dump_scene_file(back.scene, back.episodes), text);
}

TEST(SceneIo, ErrorsNameTheProblem) {
  const auto& f = fixture::apartment();
  const auto text = dump_scene_file(f.scene, f.episodes);
  try {
    parse_scene_file(replace_once(text, "\"resolution\"", "\"resolutoin\""));
    FAIL() << "unknown field accepted";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("resolutoin"), std::string::npos) << e.what();
  }
  try {
    parse_scene_file("{\n \"name\": \"x\",\n oops\n}");
    FAIL() << "syntax error accepted";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(World, ForwardTurnAndCollision) {
  auto s = open_room(8, 8);
  WorldState w(s, one_goal({1.125, 1.125}, 0.0));
  w.step(Action::kForward);
  EXPECT_DOUBLE_EQ(w.pose().x, 1.375);
  EXPECT_DOUBLE_EQ(w.path_length(), 0.25);
  w.step(Action::kMoveLeft);
  EXPECT_DOUBLE_EQ(w.pose().heading, 330.0);
  w.step(Action::kMoveRight);
  w.step(Action::kMoveRight);
  EXPECT_DOUBLE_EQ(w.pose().heading, 30.0);
  // face the top wall and walk into it
  for (int i = 0; i < 4; ++i) w.step(Action::kMoveLeft);
  EXPECT_DOUBLE_EQ(w.pose().heading, 270.0);
  int collided = 0;
  for (int i = 0; i < 6; ++i) collided += w.step(Action::kForward).collided ? 1 : 0;
  EXPECT_GT(collided, 0);
  EXPECT_TRUE(s->is_free(w.pose().position()));
  EXPECT_EQ(w.steps_taken(), 4 + 4 + 6);
}

TEST(World, PitchIsClamped) {
  WorldState w(open_room(6, 6), one_goal({1.125, 1.125}, 0.0));
  for (int i = 0; i < 5; ++i) w.step(Action::kLookUp);
  EXPECT_DOUBLE_EQ(w.pose().pitch, 30.0);
  for (int i = 0; i < 5; ++i) w.step(Action::kLookDown);
  EXPECT_DOUBLE_EQ(w.pose().pitch, -30.0);
}

TEST(World, StopNearTargetReachesGoal) {
  WorldState w(open_room(8, 8), one_goal({1.375, 1.125}, 0.0));
  w.step(Action::kStop);
  EXPECT_TRUE(w.terminated());
  ASSERT_TRUE(w.goal_records()[0].reached);
  EXPECT_THROW(w.step(Action::kForward), ProtocolError);
}

TEST(World, MultionWrongStopEndsEpisode) {
  auto s = open_room(30, 30);
  auto e = one_goal({5.0, 5.0}, 0.0, TaskKind::kMultion);
  e.goals.push_back(e.goals[0]);
  WorldState w(s, e);
  w.step(Action::kStop);
  EXPECT_TRUE(w.terminated());
  EXPECT_TRUE(w.wrong_found());
  EXPECT_FALSE(w.goal_records()[1].attempted);
}

TEST(World, SightingsRespectFovAndWalls) {
  auto s = open_room(10, 10);
  const AgentPose facing{1.0, 1.0, 0.0, 0.0};
  auto obs = sense_at(*s, facing, {});
  ASSERT_EQ(obs.sightings.size(), 1u);
  EXPECT_NEAR(obs.sightings[0].range, 1.0, 1e-12);
  EXPECT_NEAR(obs.sightings[0].bearing, 0.0, 1e-12);
  EXPECT_TRUE(sense_at(*s, {1.0, 1.0, 180.0, 0.0}, {}).sightings.empty());
  // out of range
  SensorConfig short_range;
  short_range.max_range = 0.9;
  EXPECT_TRUE(sense_at(*s, facing, short_range).sightings.empty());
  // wall between agent and chair
  for (int r = 1; r < 9; ++r) s->grid.set({r, 6}, CellKind::kObstacle);
  EXPECT_TRUE(sense_at(*s, facing, {}).sightings.empty());
}

TEST(World, DepthToWall) {
  auto s = open_room(10, 10);  // inner wall face at x = 2.25
  SensorConfig one;
  one.depth_width = 1;
  const auto obs = sense_at(*s, {1.0, 1.0, 0.0, 0.0}, one);
  ASSERT_EQ(obs.depth_scan.size(), 1u);
  EXPECT_NEAR(obs.depth_scan[0], 1.25, 1e-12);
}

TEST(Raycast, CornerVisitsBothSides) {
  std::vector<Cell> seen;
  traverse_cells(1.0, {0.5, 0.5}, Point{1, 1} * (1 / std::sqrt(2.0)), 2.0, [&](const Cell& c, double) {
    seen.push_back(c);
    return true;
  });
  ASSERT_GE(seen.size(), 4u);
  EXPECT_EQ(seen[0], (Cell{0, 0}));
  EXPECT_EQ(seen[1], (Cell{0, 1}));
  EXPECT_EQ(seen[2], (Cell{1, 0}));
  EXPECT_EQ(seen[3], (Cell{1, 1}));
}

TEST(Raycast, SegmentBlockedByDiagonalPair) {
  Grid g(3, 3);
  g.set({0, 1}, CellKind::kObstacle);
  g.set({1, 0}, CellKind::kObstacle);
  auto blocked = [&](const Cell& c) { return !g.is_free(c); };
  EXPECT_FALSE(segment_clear(1.0, {0.5, 0.5}, {1.5, 1.5}, blocked));
  EXPECT_TRUE(segment_clear(1.0, {1.5, 1.5}, {2.5, 2.5}, blocked));
}

TEST(Geodesic, Examples) {
  auto s = open_room(10, 10);
  EXPECT_DOUBLE_EQ(geodesic_distance(*s, {1.125, 1.125}, {1.125, 1.125}), 0.0);
  EXPECT_DOUBLE_EQ(geodesic_distance(*s, {0.375, 0.375}, {1.125, 0.375}), 0.75);
  EXPECT_NEAR(geodesic_distance(*s, {0.375, 0.375}, {0.875, 0.875}), 2 * kSqrt2 * 0.25, 1e-12);
  EXPECT_THROW(geodesic_distance(*s, {0.1, 0.1}, {1.0, 1.0}), ValidationError);
  for (int r = 1; r < 9; ++r) s->grid.set({r, 5}, CellKind::kObstacle);
  EXPECT_EQ(geodesic_distance(*s, {0.375, 0.375}, {2.0, 0.375}), kInfinity);
}

// Property: on generated scenes the library geodesic and an O(V^2) lattice Dijkstra
// agree on the exact straight/diagonal move counts.
TEST(Geodesic, MatchesLatticeOracleOnGeneratedScenes) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GeneratorConfig cfg;
    cfg.rooms = 2 + static_cast<int>(seed % 3);
    const auto scene = generate_scene(cfg, seed);
    Rng rng(mix_seed(seed, 3));
    std::vector<Cell> free_cells;
    for (int r = 0; r < scene.grid.rows(); ++r)
      for (int c = 0; c < scene.grid.cols(); ++c)
        if (scene.grid.is_free({r, c})) free_cells.push_back({r, c});
    const Cell src = free_cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free_cells.size()) - 1))];
    const auto oracle = oracle::lattice_distances(scene.grid, src);
    const DistanceField field(scene.grid, scene.resolution, src);
    for (const auto& t : free_cells) {
      const auto want = oracle[scene.grid.index(t)];
      const auto got = oracle::lattice_split(field.at(t), scene.resolution);
      ASSERT_EQ(got, want) << "seed " << seed << " cell " << t.row << "," << t.col;
    }
    for (int k = 0; k < 10; ++k) {
      const Cell t = free_cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free_cells.size()) - 1))];
      EXPECT_EQ(oracle::lattice_split(geodesic_distance(scene, scene.center_of(src), scene.center_of(t)), scene.resolution),
                oracle[scene.grid.index(t)]);
    }
  }
}

TEST(Generator, DeterministicAndConnected) {
  GeneratorConfig cfg;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto a = generate_scene(cfg, seed);
    EXPECT_EQ(a, generate_scene(cfg, seed));
    EXPECT_TRUE(free_space_connected(a.grid));
    EXPECT_NO_THROW(a.validate());
  }
  EXPECT_NE(generate_scene(cfg, 1), generate_scene(cfg, 2));
}

TEST(Generator, MultionEpisodesHaveThreeCylinderGoals) {
  GeneratorConfig cfg;
  cfg.required["cylinder"] = 5;
  const auto scene = generate_scene(cfg, 9);
  EpisodeGenConfig ec;
  ec.task = TaskKind::kMultion;
  ec.count = 20;
  const auto eps = generate_episodes(scene, ec, 4);
  ASSERT_EQ(eps.size(), 20u);
  for (const auto& e : eps) {
    ASSERT_EQ(e.goals.size(), 3u);
    EXPECT_EQ(e.step_budget_per_goal, 2500);
    for (const auto& g : e.goals) EXPECT_EQ(scene.find_object(g.target_ids.at(0))->category, "cylinder");
  }
  EXPECT_EQ(eps, generate_episodes(scene, ec, 4));
}

TEST(Generator, EveryTaskKindProducesValidEpisodes) {
  GeneratorConfig cfg;
  cfg.required["cylinder"] = 3;
  const auto scene = generate_scene(cfg, 21);
  for (auto task : {TaskKind::kOvon, TaskKind::kGoat, TaskKind::kMultion, TaskKind::kEqa}) {
    EpisodeGenConfig ec;
    ec.task = task;
    ec.count = 8;
    for (const auto& e : generate_episodes(scene, ec, 5)) {
      EXPECT_NO_THROW(e.validate());
      EXPECT_TRUE(scene.is_free(e.start_pose.position()));
      if (task == TaskKind::kGoat) {
        EXPECT_GE(e.goals.size(), 5u);
        EXPECT_LE(e.goals.size(), 10u);
      }
      if (task == TaskKind::kEqa) EXPECT_TRUE(e.goals.at(0).ground_truth_answer);
    }
  }
}
