#include "primnav/explorer/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "primnav/gridworld/geodesic.hpp"
#include "primnav/gridworld/raycast.hpp"

namespace primnav::explorer {

std::vector<Frontier> extract_frontiers(const ObstacleMap& map, int min_size) {
  const auto& g = map.geometry();
  const auto mask = frontier_mask(map);
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::vector<Frontier> out;
  std::vector<Cell> stack;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const std::size_t start = g.index({r, c});
      if (!mask[start] || seen[start]) continue;
      Frontier f;
      seen[start] = 1;
      stack.assign(1, Cell{r, c});
      while (!stack.empty()) {
        Cell cur = stack.back();
        stack.pop_back();
        f.cells.push_back(cur);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            Cell n{cur.row + dr, cur.col + dc};
            if ((dr == 0 && dc == 0) || !g.in_bounds(n)) continue;
            const std::size_t ni = g.index(n);
            if (mask[ni] && !seen[ni]) {
              seen[ni] = 1;
              stack.push_back(n);
            }
          }
        }
      }
      if (static_cast<int>(f.cells.size()) < min_size) continue;
      std::sort(f.cells.begin(), f.cells.end());
      double sr = 0.0, sc = 0.0;
      for (const auto& cell : f.cells) {
        sr += cell.row;
        sc += cell.col;
      }
      const double n = static_cast<double>(f.cells.size());
      const double mr = sr / n, mc = sc / n;
      double best = kInfinity;
      for (const auto& cell : f.cells) {
        const double d = (cell.row - mr) * (cell.row - mr) + (cell.col - mc) * (cell.col - mc);
        if (d < best - 1e-12) {
          best = d;
          f.midpoint_cell = cell;
        }
      }
      f.midpoint = g.center_of(f.midpoint_cell);
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::optional<std::size_t> select_frontier(const std::vector<Frontier>& frontiers, const ValueMap& vmap,
                                           const ObstacleMap& map, Point agent) {
  if (frontiers.empty()) return std::nullopt;
  constexpr double kTie = 1e-12;
  double top = -kInfinity;
  for (const auto& f : frontiers) top = std::max(top, vmap.value_at(f.midpoint_cell));
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < frontiers.size(); ++i)
    if (vmap.value_at(frontiers[i].midpoint_cell) >= top - kTie) tied.push_back(i);
  if (tied.size() == 1) return tied.front();

  const auto& g = map.geometry();
  const Cell source = g.cell_of(agent);
  gridworld::DistanceField field(g.rows, g.cols, g.resolution, source, [&](const Cell& c) {
    return c == source || (g.in_bounds(c) && map.at(c) != Occupancy::kOccupied);
  });
  auto dist = [&](std::size_t i) { return g.in_bounds(source) ? field.at(frontiers[i].midpoint_cell) : kInfinity; };
  std::size_t best = tied.front();
  for (std::size_t k = 1; k < tied.size(); ++k) {
    const std::size_t i = tied[k];
    const double di = dist(i), db = dist(best);
    if (di < db - kTie || (std::abs(di - db) <= kTie && frontiers[i].midpoint_cell < frontiers[best].midpoint_cell))
      best = i;
  }
  return best;
}

std::optional<Point> memory_recall(const ValueMap& vmap, MemoryThreshold threshold) {
  const auto& g = vmap.geometry;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < vmap.value.size(); ++i)
    if (vmap.value[i] > threshold.value() && (!best || vmap.value[i] > vmap.value[*best])) best = i;
  if (!best) return std::nullopt;
  const int cols = g.cols;
  return g.center_of({static_cast<int>(*best / cols), static_cast<int>(*best % cols)});
}

std::string to_string(DirectiveKind k) {
  switch (k) {
    case DirectiveKind::kRotate: return "rotate";
    case DirectiveKind::kGoto: return "goto";
    case DirectiveKind::kTargetFound: return "target_found";
    case DirectiveKind::kExhausted: return "exhausted";
  }
  return "unknown";
}

ExplorerState::ExplorerState(MapGeometry geometry, const perception::Embedder& embedder, ExplorerConfig config)
    : config_(config),
      embedder_(&embedder),
      obstacles_(geometry),
      features_(geometry, embedder.dim()),
      values_(geometry),
      spin_remaining_(config.spin_actions) {}

void ExplorerState::set_target(const std::string& text) {
  if (target_ && *target_ == text) return;
  target_ = text;
  target_embedding_ = embedder_->embed_text(text);
  values_ = recompute_value_map(features_, target_embedding_);
  ++recompute_count_;
  missed_.clear();
  memory_goal_ = memory_recall(values_, config_.threshold);
  memory_arrived_ = false;
  confirm_remaining_ = 0;
  frontier_goal_.reset();
  frontier_done_ = false;
}

void ExplorerState::begin_goal() {
  if (config_.spin_every_goal) spin_remaining_ = config_.spin_actions;
}

void ExplorerState::integrate(const gridworld::AgentPose& pose, const gridworld::Observation& obs,
                              const perception::EmbeddingVector& obs_embedding,
                              const gridworld::SensorConfig& sensor) {
  const auto& g = obstacles_.geometry();
  update_obstacle_map(obstacles_, pose, obs.depth_scan, sensor);
  const Cell here = g.cell_of(pose.position());
  if (g.in_bounds(here)) obstacles_.mark_free(here);

  double similarity = 0.0;
  if (target_) similarity = std::clamp(perception::cosine(obs_embedding, target_embedding_), 0.0, 1.0);
  ViewCone cone{pose.position(), pose.heading, sensor.hfov_deg / 2.0, sensor.max_range, obs.depth_scan};
  update_memory(features_, values_, obstacles_, cone, obs_embedding, similarity);
  for (const auto& c : missed_) values_.value[g.index(c)] = 0.0;
}

void ExplorerState::take_spin_action() {
  if (spin_remaining_ > 0) --spin_remaining_;
}

Directive ExplorerState::explore_step(const gridworld::AgentPose& pose,
                                      const std::vector<perception::Detection>& detections) {
  if (!target_) throw ProtocolError("explore_step called before a target was set");
  if (spin_remaining_ > 0) {
    --spin_remaining_;
    return {DirectiveKind::kRotate, {}};
  }
  if (!detections.empty()) {
    const auto nearest = std::min_element(detections.begin(), detections.end(), [](const auto& a, const auto& b) {
      return a.range < b.range || (a.range == b.range && a.object_id < b.object_id);
    });
    Point dir = gridworld::heading_vector(pose.heading + nearest->bearing);
    Directive d{DirectiveKind::kTargetFound, pose.position() + dir * nearest->range};
    d.object_id = nearest->object_id;
    return d;
  }
  if (memory_goal_) {
    if (!memory_arrived_) return {DirectiveKind::kGoto, *memory_goal_, true};
    if (confirm_remaining_ > 0) {
      --confirm_remaining_;
      return {DirectiveKind::kRotate, {}};
    }
    fail_memory_goal();
  }

  if (frontier_goal_) {
    if (frontier_done_) {
      blacklist_around(*frontier_goal_);
      frontier_goal_.reset();
    } else if (!still_frontier(*frontier_goal_)) {
      frontier_goal_.reset();
    }
  }
  if (!frontier_goal_) {
    auto frontiers = extract_frontiers(obstacles_, config_.min_frontier_size);
    std::erase_if(frontiers, [&](const Frontier& f) { return blacklist_.count(f.midpoint_cell) > 0; });
    auto pick = select_frontier(frontiers, values_, obstacles_, pose.position());
    if (!pick) return {DirectiveKind::kExhausted, {}};
    frontier_goal_ = frontiers[*pick].midpoint_cell;
    frontier_done_ = false;
  }
  return {DirectiveKind::kGoto, obstacles_.geometry().center_of(*frontier_goal_)};
}

void ExplorerState::report_arrived() {
  if (memory_goal_ && !memory_arrived_) {
    memory_arrived_ = true;
    confirm_remaining_ = config_.confirm_turns;
  } else if (frontier_goal_) {
    frontier_done_ = true;
  }
}

void ExplorerState::report_unreachable() {
  if (memory_goal_) {
    fail_memory_goal();
  } else if (frontier_goal_) {
    frontier_done_ = true;
  }
}

void ExplorerState::fail_memory_goal() {
  const auto& g = values_.geometry;
  const Point p = *memory_goal_;
  const Cell center = g.cell_of(p);
  const int reach = static_cast<int>(std::ceil(config_.miss_clear_radius / g.resolution));
  for (int r = center.row - reach; r <= center.row + reach; ++r) {
    for (int c = center.col - reach; c <= center.col + reach; ++c) {
      const Cell cell{r, c};
      if (!g.in_bounds(cell)) continue;
      if (cell != center && distance(g.center_of(cell), p) > config_.miss_clear_radius) continue;
      values_.value[g.index(cell)] = 0.0;
      missed_.insert(cell);
    }
  }
  memory_goal_.reset();
  memory_arrived_ = false;
  confirm_remaining_ = 0;
}

bool ExplorerState::still_frontier(const Cell& c) const {
  if (obstacles_.at(c) != Occupancy::kFree) return false;
  const auto& g = obstacles_.geometry();
  const Cell n[4] = {{c.row - 1, c.col}, {c.row + 1, c.col}, {c.row, c.col - 1}, {c.row, c.col + 1}};
  return std::any_of(std::begin(n), std::end(n),
                     [&](const Cell& x) { return g.in_bounds(x) && obstacles_.at(x) == Occupancy::kUnknown; });
}

void ExplorerState::blacklist_around(const Cell& c) {
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) blacklist_.insert({c.row + dr, c.col + dc});
}

namespace {

void write_pgm(const std::string& path, const MapGeometry& g, const std::vector<std::uint8_t>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << "P5\n" << g.cols << ' ' << g.rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

std::vector<std::uint8_t> to_gray(const std::vector<double>& v) {
  std::vector<std::uint8_t> px(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    px[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v[i], 0.0, 1.0) * 255.0));
  return px;
}

std::string base_name(const std::string& path) {
  auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace

std::vector<std::string> dump_maps(const ExplorerState& state, const std::string& stem) {
  const auto& g = state.obstacle_map().geometry();
  std::vector<std::uint8_t> occ(g.size());
  const auto& cells = state.obstacle_map().data();
  for (std::size_t i = 0; i < cells.size(); ++i)
    occ[i] = cells[i] == Occupancy::kFree ? 255 : (cells[i] == Occupancy::kOccupied ? 0 : 127);

  std::vector<std::string> paths{stem + "_obstacle.pgm", stem + "_value.pgm", stem + "_confidence.pgm",
                                 stem + ".json"};
  write_pgm(paths[0], g, occ);
  write_pgm(paths[1], g, to_gray(state.value_map().value));
  write_pgm(paths[2], g, to_gray(state.value_map().confidence));

  nlohmann::json meta = {
      {"rows", g.rows},
      {"cols", g.cols},
      {"resolution", g.resolution},
      {"origin", {g.origin.x, g.origin.y}},
      {"target", state.target() ? nlohmann::json(*state.target()) : nlohmann::json(nullptr)},
      {"layers",
       {{"obstacle", base_name(paths[0])}, {"value", base_name(paths[1])}, {"confidence", base_name(paths[2])}}},
      {"obstacle_levels", {{"unknown", 127}, {"free", 255}, {"occupied", 0}}},
  };
  std::ofstream out(paths[3]);
  if (!out) throw ValidationError("cannot write " + paths[3]);
  out << meta.dump(2) << '\n';
  return paths;
}

}  // namespace primnav::explorer
