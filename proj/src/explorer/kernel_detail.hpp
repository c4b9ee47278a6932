#pragma once

#include <algorithm>
#include <cmath>

#include "primnav/explorer/kernels.hpp"

namespace primnav::explorer::detail {

// True when the cell center `p` lies inside the cone and in front of the scan.
inline bool in_view(const ViewCone& cone, Point p, double& c_new) {
  const double dx = p.x - cone.apex.x, dy = p.y - cone.apex.y;
  const double dist = std::sqrt(dx * dx + dy * dy);
  if (dist > cone.range) return false;
  const double offset = dist > 1e-12 ? wrap180(rad2deg(std::atan2(dy, dx)) - cone.heading_deg) : 0.0;
  c_new = view_confidence(offset, cone.half_fov_deg);
  if (c_new <= 0.0) return false;
  return dist < cone.depth_at(offset);
}

inline void blend_cell(FeatureMap& fmap, ValueMap& vmap, std::size_t i, double c_new,
                       const perception::EmbeddingVector& e, double similarity) {
  const double c_old = fmap.has(i) ? fmap.confidence(i) : 0.0;
  if (c_new <= 0.0 && c_old <= 0.0) return;
  auto v = fmap.vector(i);
  double norm2 = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    double x = c_new * e.components[k] + c_old * v[k];
    v[k] = x;
    norm2 += x * x;
  }
  if (norm2 > 1e-24) {
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
  } else {
    std::copy(e.components.begin(), e.components.end(), v.begin());
  }
  fmap.mark_present(i);
  vmap.value[i] = (c_new * similarity + c_old * vmap.value[i]) / (c_new + c_old);
  double conf = std::min(1.0, c_old + c_new);
  fmap.set_confidence(i, conf);
  vmap.confidence[i] = conf;
}

}  // namespace primnav::explorer::detail
