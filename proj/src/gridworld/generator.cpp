#include "primnav/gridworld/generator.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "primnav/gridworld/geodesic.hpp"

namespace primnav::gridworld {

const std::vector<ObjectKind>& default_object_kinds() {
  static const std::vector<std::string> kColors = {"white", "black", "brown", "gray", "blue",
                                                   "red",   "green", "beige"};
  static const std::vector<ObjectKind> kinds = {
      {"chair", {"armchair", "office chair", "dining chair"}, {{"color", kColors}}, false},
      {"couch", {"sofa", "loveseat"}, {{"color", kColors}}, false},
      {"bed", {"double bed", "single bed"}, {{"color", kColors}}, false},
      {"table", {"kitchen table", "coffee table", "desk"}, {{"state", {"clean", "dirty"}}}, false},
      {"tv", {"flat screen tv"}, {{"state", {"on", "off"}}}, false},
      {"lamp", {"floor lamp", "desk lamp"}, {{"state", {"on", "off"}}}, false},
      {"plant", {"potted plant"}, {{"color", {"green", "yellow"}}}, false},
      {"toilet", {}, {{"color", {"white", "beige"}}}, false},
      {"sink", {}, {{"color", {"white", "gray"}}}, false},
      {"refrigerator", {}, {{"color", {"white", "gray", "black"}}}, false},
      {"laptop", {}, {{"state", {"open", "closed"}}}, false},
      {"gas boiler", {}, {{"color", {"white", "gray"}}}, false},
      {"bookshelf", {}, {{"color", {"brown", "white", "black"}}}, false},
      {"oven", {}, {{"state", {"on", "off"}}}, false},
      {"shower", {}, {{"state", {"open", "closed"}}}, false},
      {"cylinder",
       {"red cylinder", "white cylinder", "blue cylinder", "green cylinder", "yellow cylinder",
        "black cylinder", "pink cylinder", "orange cylinder"},
       {},
       true},
  };
  return kinds;
}

namespace {

const std::vector<std::string> kRoomNames = {"living room", "kitchen",   "bedroom",
                                             "bathroom",    "office",    "hallway",
                                             "dining room", "laundry room", "garage"};

struct Room {
  int r0, c0, h, w;
  std::string label;
  bool contains(const Cell& c) const {
    return c.row >= r0 && c.row < r0 + h && c.col >= c0 && c.col < c0 + w;
  }
};

struct Layout {
  Grid grid;
  std::vector<Room> rooms;
  std::set<Cell> door_cells;
};

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

Layout build_layout(const GeneratorConfig& cfg, Rng& rng) {
  const int ncols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.rooms))));
  const int nrows = (cfg.rooms + ncols - 1) / ncols;
  std::vector<int> widths(ncols), heights(nrows);
  for (auto& w : widths) w = rng.uniform_int(cfg.room_min, cfg.room_max);
  for (auto& h : heights) h = rng.uniform_int(cfg.room_min, cfg.room_max);
  int total_cols = 1, total_rows = 1;
  for (int w : widths) total_cols += w + 1;
  for (int h : heights) total_rows += h + 1;

  Layout lay{Grid(total_rows, total_cols, CellKind::kObstacle), {}, {}};
  std::vector<std::string> names = kRoomNames;
  rng.shuffle(names);
  int r0 = 1;
  for (int i = 0; i < nrows; ++i) {
    int c0 = 1;
    for (int j = 0; j < ncols; ++j) {
      int k = i * ncols + j;
      if (k < cfg.rooms) {
        Room room{r0, c0, heights[i], widths[j], names[static_cast<std::size_t>(k) % names.size()]};
        for (int r = room.r0; r < room.r0 + room.h; ++r)
          for (int c = room.c0; c < room.c0 + room.w; ++c) lay.grid.set({r, c}, CellKind::kFree);
        lay.rooms.push_back(room);
      }
      c0 += widths[j] + 1;
    }
    r0 += heights[i] + 1;
  }

  struct Edge {
    int a, b;
    bool horizontal;
  };
  std::vector<Edge> edges;
  for (int k = 0; k < cfg.rooms; ++k) {
    int i = k / ncols, j = k % ncols;
    if (j + 1 < ncols && k + 1 < cfg.rooms) edges.push_back({k, k + 1, true});
    if (i + 1 < nrows && k + ncols < cfg.rooms) edges.push_back({k, k + ncols, false});
  }
  rng.shuffle(edges);
  std::vector<int> parent(static_cast<std::size_t>(cfg.rooms));
  std::iota(parent.begin(), parent.end(), 0);
  auto carve_door = [&](const Edge& e) {
    const Room& a = lay.rooms[static_cast<std::size_t>(e.a)];
    int dw = std::min(cfg.door_width, e.horizontal ? a.h : a.w);
    if (e.horizontal) {
      int wall_col = a.c0 + a.w;
      int start = rng.uniform_int(a.r0, a.r0 + a.h - dw);
      for (int r = start; r < start + dw; ++r) {
        lay.grid.set({r, wall_col}, CellKind::kFree);
        lay.door_cells.insert({r, wall_col});
      }
    } else {
      int wall_row = a.r0 + a.h;
      int start = rng.uniform_int(a.c0, a.c0 + a.w - dw);
      for (int c = start; c < start + dw; ++c) {
        lay.grid.set({wall_row, c}, CellKind::kFree);
        lay.door_cells.insert({wall_row, c});
      }
    }
  };
  for (const auto& e : edges) {
    int ra = find_root(parent, e.a), rb = find_root(parent, e.b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      carve_door(e);
    } else if (rng.bernoulli(0.25)) {
      carve_door(e);
    }
  }
  return lay;
}

bool near_door(const Layout& lay, const Cell& c) {
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc)
      if (lay.door_cells.count({c.row + dr, c.col + dc})) return true;
  return false;
}

void add_clutter(Layout& lay, const GeneratorConfig& cfg, Rng& rng) {
  std::vector<Cell> interior;
  for (const auto& room : lay.rooms)
    for (int r = room.r0; r < room.r0 + room.h; ++r)
      for (int c = room.c0; c < room.c0 + room.w; ++c) interior.push_back({r, c});
  int target = static_cast<int>(std::lround(cfg.density * static_cast<double>(interior.size())));
  int placed = 0;
  int attempts = 0;
  while (placed < target && attempts < 4 * target + 8) {
    ++attempts;
    const Cell c = interior[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(interior.size()) - 1))];
    if (!lay.grid.is_free(c) || near_door(lay, c)) continue;
    lay.grid.set(c, CellKind::kObstacle);
    if (!free_space_connected(lay.grid)) {
      lay.grid.set(c, CellKind::kFree);
      continue;
    }
    ++placed;
  }
}

std::vector<ObjectKind> resolve_vocabulary(const GeneratorConfig& cfg) {
  const auto& kinds = default_object_kinds();
  std::vector<ObjectKind> out;
  if (cfg.vocabulary.empty()) {
    for (const auto& k : kinds)
      if (!k.unique_subcategory) out.push_back(k);
    return out;
  }
  for (const auto& name : cfg.vocabulary) {
    auto it = std::find_if(kinds.begin(), kinds.end(),
                           [&](const ObjectKind& k) { return k.category == name; });
    // Unknown categories are placed as plain objects with no subcategory.
    out.push_back(it == kinds.end() ? ObjectKind{name, {}, {}, false} : *it);
  }
  return out;
}

SceneObject make_object(const ObjectKind& kind, int id, Rng& rng, std::set<std::string>& used_subcats) {
  SceneObject o;
  o.id = id;
  o.category = kind.category;
  if (!kind.subcategories.empty()) {
    if (kind.unique_subcategory) {
      std::vector<std::string> free_subcats;
      for (const auto& s : kind.subcategories)
        if (!used_subcats.count(s)) free_subcats.push_back(s);
      if (free_subcats.empty())
        throw GenerationError("not enough distinct '" + kind.category + "' subcategories");
      o.subcategory = free_subcats[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free_subcats.size()) - 1))];
      used_subcats.insert(o.subcategory);
      o.attributes["color"] = tokenize(o.subcategory).front();
    } else {
      o.subcategory = kind.subcategories[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(kind.subcategories.size()) - 1))];
    }
  }
  for (const auto& [key, values] : kind.attributes)
    o.attributes[key] = values[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(values.size()) - 1))];
  return o;
}

}  // namespace

Scene generate_scene(const GeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.rooms <= 0) throw GenerationError("rooms must be positive");
  if (cfg.room_min < 3 || cfg.room_max < cfg.room_min) throw GenerationError("invalid room size range");
  if (!(cfg.density > 0.0 && cfg.density < 1.0)) throw GenerationError("density must lie in (0, 1)");
  if (cfg.object_count < 0) throw GenerationError("object_count must be non-negative");

  const auto vocab = resolve_vocabulary(cfg);
  if (vocab.empty() && cfg.object_count > 0) throw GenerationError("empty vocabulary");

  for (int attempt = 0; attempt < std::max(cfg.max_retries, 1); ++attempt) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    Layout lay = build_layout(cfg, rng);
    add_clutter(lay, cfg, rng);

    std::vector<Cell> candidates;
    for (const auto& room : lay.rooms)
      for (int r = room.r0; r < room.r0 + room.h; ++r)
        for (int c = room.c0; c < room.c0 + room.w; ++c)
          if (lay.grid.is_free({r, c})) candidates.push_back({r, c});
    rng.shuffle(candidates);

    std::vector<const ObjectKind*> to_place;
    const auto& kinds = default_object_kinds();
    for (const auto& [cat, n] : cfg.required) {
      auto it = std::find_if(kinds.begin(), kinds.end(),
                             [&](const ObjectKind& k) { return k.category == cat; });
      if (it == kinds.end()) throw GenerationError("unknown required category '" + cat + "'");
      for (int i = 0; i < n; ++i) to_place.push_back(&*it);
    }
    for (int i = 0; i < cfg.object_count; ++i)
      to_place.push_back(&vocab[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(vocab.size()) - 1))]);

    std::vector<Cell> chosen;
    for (const auto& c : candidates) {
      if (chosen.size() == to_place.size()) break;
      bool spaced = std::all_of(chosen.begin(), chosen.end(), [&](const Cell& o) {
        return std::max(std::abs(o.row - c.row), std::abs(o.col - c.col)) >= 2;
      });
      if (spaced && !near_door(lay, c)) chosen.push_back(c);
    }
    if (chosen.size() < to_place.size()) continue;

    Scene scene;
    scene.name = cfg.name;
    scene.resolution = cfg.resolution;
    scene.grid = lay.grid;
    std::set<std::string> used_subcats;
    for (std::size_t i = 0; i < to_place.size(); ++i) {
      SceneObject o = make_object(*to_place[i], static_cast<int>(i) + 1, rng, used_subcats);
      o.position = scene.center_of(chosen[i]);
      for (const auto& room : lay.rooms)
        if (room.contains(chosen[i])) o.attributes["room"] = room.label;
      o.image_ref = scene.name + "/img_" + std::to_string(o.id);
      scene.objects.push_back(std::move(o));
    }
    scene.validate();
    return scene;
  }
  throw GenerationError("could not place " + std::to_string(cfg.object_count) +
                        " objects after " + std::to_string(cfg.max_retries) + " attempts");
}

namespace {

AgentPose random_start(const Scene& scene, Rng& rng) {
  std::vector<Cell> free;
  for (int r = 0; r < scene.grid.rows(); ++r)
    for (int c = 0; c < scene.grid.cols(); ++c)
      if (scene.grid.is_free({r, c})) free.push_back({r, c});
  const Cell c = free[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free.size()) - 1))];
  Point p = scene.center_of(c);
  return AgentPose{p.x, p.y, 30.0 * rng.uniform_int(0, 11), 0.0};
}

std::vector<int> ids_where(const Scene& scene, auto pred) {
  std::vector<int> out;
  for (const auto& o : scene.objects)
    if (pred(o)) out.push_back(o.id);
  return out;
}

const SceneObject& pick(const std::vector<const SceneObject*>& pool, Rng& rng) {
  return *pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
}

GoalSpec category_goal(const Scene& scene, const SceneObject& o) {
  return {GoalKind::kCategory, o.category,
          ids_where(scene, [&](const SceneObject& x) { return x.category == o.category; }),
          std::nullopt};
}

GoalSpec description_goal(const Scene& scene, const SceneObject& o) {
  std::string noun = o.subcategory.empty() ? o.category : o.subcategory;
  std::string adj;
  if (auto it = o.attributes.find("color"); it != o.attributes.end()) adj = it->second + " ";
  auto same = [&](const SceneObject& x) {
    return x.category == o.category && x.subcategory == o.subcategory;
  };
  return {GoalKind::kDescription, "the " + adj + noun, ids_where(scene, same), std::nullopt};
}

std::optional<GoalSpec> question_goal(const Scene& scene, const SceneObject& o, Rng& rng) {
  auto count = ids_where(scene, [&](const SceneObject& x) { return x.category == o.category; });
  if (count.size() != 1) return std::nullopt;
  if (auto it = o.attributes.find("color"); it != o.attributes.end())
    return GoalSpec{GoalKind::kQuestion, "what color is the " + o.category, count, it->second};
  if (auto it = o.attributes.find("state"); it != o.attributes.end()) {
    static const std::vector<std::string> kStates = {"on", "off", "open", "closed", "clean", "dirty"};
    std::string asked = rng.bernoulli(0.5) ? it->second
                                           : kStates[static_cast<std::size_t>(rng.uniform_int(0, 5))];
    return GoalSpec{GoalKind::kQuestion, "is the " + o.category + " " + asked, count,
                    std::string(asked == it->second ? "yes" : "no")};
  }
  return std::nullopt;
}

}  // namespace

std::vector<Episode> generate_episodes(const Scene& scene, const EpisodeGenConfig& cfg,
                                       std::uint64_t seed) {
  if (scene.objects.empty()) throw GenerationError("scene has no objects");
  std::vector<const SceneObject*> all, furniture, cylinders;
  for (const auto& o : scene.objects) {
    all.push_back(&o);
    (o.category == "cylinder" ? cylinders : furniture).push_back(&o);
  }
  if (furniture.empty()) furniture = all;
  std::vector<Episode> out;
  for (int i = 0; i < cfg.count; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    Episode e;
    e.id = scene.name + "/" + to_string(cfg.task) + "_" + std::to_string(i);
    e.scene_ref = scene.name;
    e.task_kind = cfg.task;
    e.success_radius = cfg.success_radius;
    e.start_pose = random_start(scene, rng);
    switch (cfg.task) {
      case TaskKind::kOvon:
        e.goals.push_back(category_goal(scene, pick(furniture, rng)));
        e.step_budget_per_goal = cfg.ovon_budget;
        break;
      case TaskKind::kMultion: {
        if (static_cast<int>(cylinders.size()) < cfg.multion_goals)
          throw GenerationError("scene '" + scene.name + "' has too few cylinders for MultiON");
        auto pool = cylinders;
        rng.shuffle(pool);
        for (int g = 0; g < cfg.multion_goals; ++g) {
          const auto& o = *pool[static_cast<std::size_t>(g)];
          e.goals.push_back({GoalKind::kCategory, o.subcategory, {o.id}, std::nullopt});
        }
        e.step_budget_per_goal = cfg.multion_budget;
        break;
      }
      case TaskKind::kGoat: {
        int n = rng.uniform_int(cfg.goat_min_goals, cfg.goat_max_goals);
        for (int g = 0; g < n; ++g) {
          const auto& o = pick(furniture, rng);
          switch (rng.uniform_int(0, 2)) {
            case 0: e.goals.push_back(category_goal(scene, o)); break;
            case 1: e.goals.push_back(description_goal(scene, o)); break;
            default:
              e.goals.push_back({GoalKind::kImage, o.image_ref.value_or(""), {o.id}, std::nullopt});
          }
        }
        e.step_budget_per_goal = cfg.goat_budget;
        break;
      }
      case TaskKind::kEqa: {
        auto pool = furniture;
        rng.shuffle(pool);
        for (const auto* o : pool) {
          if (auto g = question_goal(scene, *o, rng)) {
            e.goals.push_back(*g);
            break;
          }
        }
        if (e.goals.empty()) throw GenerationError("scene '" + scene.name + "' has no answerable object");
        e.step_budget_per_goal = cfg.eqa_budget;
        break;
      }
    }
    e.validate();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace primnav::gridworld
