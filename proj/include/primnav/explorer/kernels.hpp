#pragma once

#include <cstdint>
#include <vector>

#include "primnav/explorer/maps.hpp"
#include "primnav/gridworld/world.hpp"

namespace primnav::explorer {

// Sensor frustum projected on the map. `depth` holds the scan the cone was seen with
// (rays spread evenly across the field of view); cells past the depth of their nearest
// ray are occluded. An empty scan means nothing occludes within `range`.
struct ViewCone {
  Point apex;
  double heading_deg = 0.0;
  double half_fov_deg = 79.0 / 2.0;
  double range = 5.0;
  std::vector<double> depth;

  // Depth of the ray nearest to `offset_deg`, or `range` without a scan.
  double depth_at(double offset_deg) const;
};

// Update weight of a cell at `offset_deg` from the optical axis: cos^2 of the offset
// scaled so the axis gets 1 and the cone edge gets 0.
double view_confidence(double offset_deg, double half_fov_deg);

// Marks cells along each depth ray free and the hit cell occupied. A ray at max range
// leaves its endpoint unknown. Occupied cells are never downgraded.
void update_obstacle_map(ObstacleMap& map, const gridworld::AgentPose& pose,
                         const std::vector<double>& depth_scan, const gridworld::SensorConfig& sensor);

// Blends `obs_embedding` and `target_similarity` into every cell of the view cone that
// is neither occupied nor occluded, weighted by view_confidence against the stored
// confidence. OpenMP-parallel over rows.
void update_memory(FeatureMap& fmap, ValueMap& vmap, const ObstacleMap& obstacles, const ViewCone& cone,
                   const perception::EmbeddingVector& obs_embedding, double target_similarity);

// value = max(0, cos(cell vector, target)) for cells with a vector, else 0; confidence
// is carried over from the feature map. OpenMP-parallel over cells.
ValueMap recompute_value_map(const FeatureMap& fmap, const perception::EmbeddingVector& target);

// 1 for free cells with at least one 4-neighbour unknown. OpenMP-parallel over rows.
std::vector<std::uint8_t> frontier_mask(const ObstacleMap& map);

// Serial versions of the parallel kernels above, kept as the test and benchmark baseline.
namespace reference {

void update_memory(FeatureMap& fmap, ValueMap& vmap, const ObstacleMap& obstacles, const ViewCone& cone,
                   const perception::EmbeddingVector& obs_embedding, double target_similarity);
ValueMap recompute_value_map(const FeatureMap& fmap, const perception::EmbeddingVector& target);
std::vector<std::uint8_t> frontier_mask(const ObstacleMap& map);

}  // namespace reference

}  // namespace primnav::explorer
