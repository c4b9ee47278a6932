#include "primnav/explorer/kernels.hpp"

#include <algorithm>

#include "primnav/gridworld/raycast.hpp"
#include "kernel_detail.hpp"

namespace primnav::explorer {

namespace {

// Parallel regions only pay off on large maps; desk-scale maps stay on one thread.
constexpr std::size_t kParallelCells = 1 << 14;

}  // namespace

double ViewCone::depth_at(double offset_deg) const {
  if (depth.empty()) return range;
  if (depth.size() == 1) return depth.front();
  const double u = (offset_deg + half_fov_deg) / (2.0 * half_fov_deg);
  const auto last = static_cast<double>(depth.size() - 1);
  const auto i = static_cast<std::size_t>(std::lround(std::clamp(u, 0.0, 1.0) * last));
  return depth[i];
}

double view_confidence(double offset_deg, double half_fov_deg) {
  double a = std::abs(offset_deg);
  if (a >= half_fov_deg) return 0.0;
  double c = std::cos(a / half_fov_deg * kPi / 2.0);
  return c * c;
}

void update_obstacle_map(ObstacleMap& map, const gridworld::AgentPose& pose,
                         const std::vector<double>& depth_scan, const gridworld::SensorConfig& sensor) {
  if (static_cast<int>(depth_scan.size()) != sensor.depth_width)
    throw ValidationError("depth scan width does not match the sensor configuration");
  const auto& g = map.geometry();
  const Point origin = pose.position() - g.origin;
  const int w = sensor.depth_width;
  for (int i = 0; i < w; ++i) {
    double offset = w == 1 ? 0.0 : -sensor.hfov_deg / 2.0 + sensor.hfov_deg * i / (w - 1);
    double heading = pose.heading + offset;
    double range = depth_scan[static_cast<std::size_t>(i)];
    bool hit = range < sensor.max_range - 1e-9;
    gridworld::traverse_cells(g.resolution, origin, gridworld::heading_vector(heading), range,
                              [&](const Cell& c, double t) {
                                if (!g.in_bounds(c)) return false;
                                if (t >= range - 1e-9) return false;
                                map.mark_free(c);
                                return true;
                              });
    if (hit) {
      Point end = origin + gridworld::heading_vector(heading) * (range + 1e-6);
      Cell c{static_cast<int>(std::floor(end.y / g.resolution)),
             static_cast<int>(std::floor(end.x / g.resolution))};
      if (g.in_bounds(c)) map.mark_occupied(c);
    }
  }
}

void update_memory(FeatureMap& fmap, ValueMap& vmap, const ObstacleMap& obstacles, const ViewCone& cone,
                   const perception::EmbeddingVector& obs_embedding, double target_similarity) {
  const auto& g = fmap.geometry();
  const Cell apex = g.cell_of(cone.apex);
  const int reach = static_cast<int>(std::ceil(cone.range / g.resolution)) + 1;
  const int r_lo = std::max(0, apex.row - reach), r_hi = std::min(g.rows - 1, apex.row + reach);
  const int c_lo = std::max(0, apex.col - reach), c_hi = std::min(g.cols - 1, apex.col + reach);
  const std::size_t span = static_cast<std::size_t>(r_hi - r_lo + 1) * static_cast<std::size_t>(c_hi - c_lo + 1);
#pragma omp parallel for schedule(static) if (span >= kParallelCells)
  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      const Cell cell{r, c};
      double c_new = 0.0;
      if (!detail::in_view(cone, g.center_of(cell), c_new)) continue;
      if (obstacles.at(cell) == Occupancy::kOccupied) continue;
      detail::blend_cell(fmap, vmap, g.index(cell), c_new, obs_embedding, target_similarity);
    }
  }
}

ValueMap recompute_value_map(const FeatureMap& fmap, const perception::EmbeddingVector& target) {
  ValueMap out(fmap.geometry());
  const std::size_t n = fmap.geometry().size();
  const std::size_t dim = static_cast<std::size_t>(fmap.dim());
#pragma omp parallel for schedule(static) if (n * dim >= kParallelCells)
  for (std::size_t i = 0; i < n; ++i) {
    out.confidence[i] = fmap.confidence(i);
    if (!fmap.has(i)) continue;
    auto v = fmap.vector(i);
    double dot = 0.0;
    for (std::size_t k = 0; k < dim; ++k) dot += v[k] * target.components[k];
    out.value[i] = std::clamp(dot, 0.0, 1.0);
  }
  return out;
}

std::vector<std::uint8_t> frontier_mask(const ObstacleMap& map) {
  const auto& g = map.geometry();
  std::vector<std::uint8_t> mask(g.size(), 0);
  auto unknown = [&](int r, int c) {
    return r >= 0 && c >= 0 && r < g.rows && c < g.cols && map.at({r, c}) == Occupancy::kUnknown;
  };
#pragma omp parallel for schedule(static) if (g.size() >= kParallelCells)
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      if (map.at({r, c}) != Occupancy::kFree) continue;
      if (unknown(r - 1, c) || unknown(r + 1, c) || unknown(r, c - 1) || unknown(r, c + 1))
        mask[g.index({r, c})] = 1;
    }
  }
  return mask;
}

}  // namespace primnav::explorer
