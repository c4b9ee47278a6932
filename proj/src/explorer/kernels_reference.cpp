#include <cmath>

#include "kernel_detail.hpp"
#include "primnav/explorer/kernels.hpp"

namespace primnav::explorer::reference {

// Plain full-map scans with no windowing or threading.

void update_memory(FeatureMap& fmap, ValueMap& vmap, const ObstacleMap& obstacles, const ViewCone& cone,
                   const perception::EmbeddingVector& obs_embedding, double target_similarity) {
  const auto& g = fmap.geometry();
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const Cell cell{r, c};
      const Point p = g.center_of(cell);
      const double dx = p.x - cone.apex.x, dy = p.y - cone.apex.y;
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (dist > cone.range) continue;
      double offset = 0.0;
      if (dist > 1e-12) offset = wrap180(std::atan2(dy, dx) * 180.0 / kPi - cone.heading_deg);
      const double c_new = view_confidence(offset, cone.half_fov_deg);
      if (c_new <= 0.0) continue;
      if (!(dist < cone.depth_at(offset))) continue;
      if (obstacles.at(cell) == Occupancy::kOccupied) continue;
      detail::blend_cell(fmap, vmap, g.index(cell), c_new, obs_embedding, target_similarity);
    }
  }
}

ValueMap recompute_value_map(const FeatureMap& fmap, const perception::EmbeddingVector& target) {
  ValueMap out(fmap.geometry());
  for (std::size_t i = 0; i < fmap.geometry().size(); ++i) {
    out.confidence[i] = fmap.confidence(i);
    if (!fmap.has(i)) continue;
    double dot = 0.0;
    auto v = fmap.vector(i);
    for (std::size_t k = 0; k < v.size(); ++k) dot += v[k] * target.components[k];
    out.value[i] = dot < 0.0 ? 0.0 : (dot > 1.0 ? 1.0 : dot);
  }
  return out;
}

std::vector<std::uint8_t> frontier_mask(const ObstacleMap& map) {
  const auto& g = map.geometry();
  std::vector<std::uint8_t> mask(g.size(), 0);
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      if (map.at({r, c}) != Occupancy::kFree) continue;
      for (int k = 0; k < 4; ++k) {
        Cell n{r + dr[k], c + dc[k]};
        if (g.in_bounds(n) && map.at(n) == Occupancy::kUnknown) {
          mask[g.index({r, c})] = 1;
          break;
        }
      }
    }
  }
  return mask;
}

}  // namespace primnav::explorer::reference
