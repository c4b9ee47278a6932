#pragma once

#include <cmath>

#include "primnav/common.hpp"

namespace primnav::gridworld {

// Grid traversal (Amanatides-Woo) along a ray from `origin` in unit direction `dir`.
// `visit(cell, t_enter)` is called for every cell the ray enters, in order, until it
// returns false or t exceeds `t_max`. A ray passing exactly through a cell corner
// also visits both side-adjacent cells at the same t, so a caller that stops on
// obstacles never sees through a diagonal gap.
template <class Visit>
void traverse_cells(double resolution, Point origin, Point dir, double t_max, Visit&& visit) {
  Cell cur{static_cast<int>(std::floor(origin.y / resolution)),
           static_cast<int>(std::floor(origin.x / resolution))};
  const int step_x = dir.x > 0 ? 1 : (dir.x < 0 ? -1 : 0);
  const int step_y = dir.y > 0 ? 1 : (dir.y < 0 ? -1 : 0);
  double t_max_x = kInfinity, t_max_y = kInfinity;
  double t_delta_x = kInfinity, t_delta_y = kInfinity;
  if (step_x != 0) {
    double boundary = (step_x > 0 ? cur.col + 1 : cur.col) * resolution;
    t_max_x = (boundary - origin.x) / dir.x;
    t_delta_x = resolution / std::abs(dir.x);
  }
  if (step_y != 0) {
    double boundary = (step_y > 0 ? cur.row + 1 : cur.row) * resolution;
    t_max_y = (boundary - origin.y) / dir.y;
    t_delta_y = resolution / std::abs(dir.y);
  }
  if (!visit(cur, 0.0)) return;
  constexpr double kCornerEps = 1e-9;
  for (;;) {
    double t = std::min(t_max_x, t_max_y);
    if (t > t_max) return;
    if (std::abs(t_max_x - t_max_y) <= kCornerEps) {
      if (!visit(Cell{cur.row, cur.col + step_x}, t)) return;
      if (!visit(Cell{cur.row + step_y, cur.col}, t)) return;
      cur.col += step_x;
      cur.row += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      cur.col += step_x;
      t_max_x += t_delta_x;
    } else {
      cur.row += step_y;
      t_max_y += t_delta_y;
    }
    if (!visit(cur, t)) return;
  }
}

inline Point heading_vector(double heading_deg) {
  double r = deg2rad(heading_deg);
  return {std::cos(r), std::sin(r)};
}

// Distance from `origin` along `heading_deg` to the first cell for which
// `blocked(cell)` holds, capped at `max_range`.
template <class Blocked>
double cast_ray(double resolution, Point origin, double heading_deg, double max_range,
                Blocked&& blocked) {
  double hit = max_range;
  traverse_cells(resolution, origin, heading_vector(heading_deg), max_range,
                 [&](const Cell& c, double t) {
                   if (blocked(c)) {
                     hit = std::min(t, max_range);
                     return false;
                   }
                   return true;
                 });
  return hit;
}

// True when no cell touched by the segment a->b is blocked.
template <class Blocked>
bool segment_clear(double resolution, Point a, Point b, Blocked&& blocked) {
  Point d = b - a;
  double len = d.norm();
  if (len == 0.0) return !blocked(Cell{static_cast<int>(std::floor(a.y / resolution)),
                                       static_cast<int>(std::floor(a.x / resolution))});
  bool clear = true;
  traverse_cells(resolution, a, d * (1.0 / len), len, [&](const Cell& c, double) {
    if (blocked(c)) {
      clear = false;
      return false;
    }
    return true;
  });
  return clear;
}

}  // namespace primnav::gridworld
