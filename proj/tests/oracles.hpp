#pragma once

// Independent reference computations used as test oracles. They deliberately use
// different algorithms from the library code they check.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "primnav/explorer/maps.hpp"
#include "primnav/gridworld/scene.hpp"

namespace primnav::oracle {

// Shortest 8-connected distances (no corner cutting) by repeated relaxation sweeps
// until nothing changes. `entry_weight(cell)` scales the cost of moving into a cell.
template <class Weight>
std::vector<double> relaxation_distances(const gridworld::Grid& grid, double res, Cell src, Weight&& entry_weight) {
  const int R = grid.rows(), C = grid.cols();
  std::vector<double> d(static_cast<std::size_t>(R) * C, kInfinity);
  auto free = [&](int r, int c) { return r >= 0 && c >= 0 && r < R && c < C && grid.at({r, c}) == gridworld::CellKind::kFree; };
  if (!free(src.row, src.col)) return d;
  d[static_cast<std::size_t>(src.row) * C + src.col] = 0.0;
  const double diag = std::sqrt(2.0) * res;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < R; ++r) {
      for (int c = 0; c < C; ++c) {
        if (!free(r, c)) continue;
        double best = d[static_cast<std::size_t>(r) * C + c];
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if ((dr == 0 && dc == 0) || !free(r + dr, c + dc)) continue;
            if (dr != 0 && dc != 0 && (!free(r + dr, c) || !free(r, c + dc))) continue;
            double w = ((dr != 0 && dc != 0) ? diag : res) * entry_weight(Cell{r, c});
            best = std::min(best, d[static_cast<std::size_t>(r + dr) * C + (c + dc)] + w);
          }
        }
        if (best < d[static_cast<std::size_t>(r) * C + c] - 1e-12) {
          d[static_cast<std::size_t>(r) * C + c] = best;
          changed = true;
        }
      }
    }
  }
  return d;
}

inline std::vector<double> relaxation_distances(const gridworld::Grid& grid, double res, Cell src) {
  return relaxation_distances(grid, res, src, [](const Cell&) { return 1.0; });
}

// Shortest path as exact move counts: `straight` unit moves plus `diagonal` moves.
// Costs compare as straight + diagonal * sqrt(2) in long double, which separates
// distinct integer pairs at grid sizes used here.
struct LatticeMoves {
  long straight = -1;  // -1 marks unreachable
  long diagonal = -1;
  friend bool operator==(const LatticeMoves&, const LatticeMoves&) = default;
};

inline std::vector<LatticeMoves> lattice_distances(const gridworld::Grid& grid, Cell src) {
  const int R = grid.rows(), C = grid.cols();
  std::vector<LatticeMoves> d(static_cast<std::size_t>(R) * C);
  auto free = [&](int r, int c) { return r >= 0 && c >= 0 && r < R && c < C && grid.at({r, c}) == gridworld::CellKind::kFree; };
  auto key = [](const LatticeMoves& m) {
    return m.straight < 0 ? static_cast<long double>(INFINITY)
                          : m.straight + m.diagonal * 1.41421356237309504880168872420969808L;
  };
  if (!free(src.row, src.col)) return d;
  // O(V^2) Dijkstra with a linear scan instead of a heap.
  std::vector<char> done(d.size(), 0);
  d[static_cast<std::size_t>(src.row) * C + src.col] = {0, 0};
  for (;;) {
    std::size_t best = d.size();
    for (std::size_t i = 0; i < d.size(); ++i)
      if (!done[i] && d[i].straight >= 0 && (best == d.size() || key(d[i]) < key(d[best]))) best = i;
    if (best == d.size()) break;
    done[best] = 1;
    const int r = static_cast<int>(best) / C, c = static_cast<int>(best) % C;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        if ((dr == 0 && dc == 0) || !free(r + dr, c + dc)) continue;
        const bool diag = dr != 0 && dc != 0;
        if (diag && (!free(r + dr, c) || !free(r, c + dc))) continue;
        LatticeMoves m = d[best];
        (diag ? m.diagonal : m.straight) += 1;
        auto& slot = d[static_cast<std::size_t>(r + dr) * C + (c + dc)];
        if (key(m) < key(slot)) slot = m;
      }
  }
  return d;
}

// Splits a metric distance back into move counts; {-1,-1} when it is not a lattice length.
inline LatticeMoves lattice_split(double meters, double res) {
  if (!std::isfinite(meters)) return {};
  const double cells = meters / res;
  for (long b = 0; b <= static_cast<long>(cells / std::sqrt(2.0)) + 1; ++b) {
    const double a = cells - b * std::sqrt(2.0);
    const double ar = std::round(a);
    if (ar >= 0 && std::abs(a - ar) < 1e-6) return {static_cast<long>(ar), b};
  }
  return {};
}

// Copy of `grid` where every free cell within `radius` (Chebyshev) of an obstacle
// becomes an obstacle, except the listed cells.
inline gridworld::Grid inflate(const gridworld::Grid& grid, int radius, const std::vector<Cell>& keep) {
  gridworld::Grid out = grid;
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) {
      if (std::find(keep.begin(), keep.end(), Cell{r, c}) != keep.end()) continue;
      for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc) {
          Cell n{r + dr, c + dc};
          if (grid.in_bounds(n) && grid.at(n) == gridworld::CellKind::kObstacle)
            out.set({r, c}, gridworld::CellKind::kObstacle);
        }
    }
  return out;
}

// Obstacle map with the true occupancy of every cell.
inline explorer::ObstacleMap known_map(const gridworld::Scene& scene) {
  explorer::MapGeometry g{scene.grid.rows(), scene.grid.cols(), scene.resolution, {0.0, 0.0}};
  explorer::ObstacleMap map(g);
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c)
      map.set({r, c}, scene.grid.at({r, c}) == gridworld::CellKind::kFree ? explorer::Occupancy::kFree
                                                                           : explorer::Occupancy::kOccupied);
  return map;
}

// Frontier cell sets straight from the definition: free, 4-adjacent to unknown, grouped
// by 8-connectivity with a union-find, small groups dropped.
inline std::set<std::set<Cell>> brute_force_frontiers(const explorer::ObstacleMap& map, int min_size) {
  const auto& g = map.geometry();
  using explorer::Occupancy;
  std::vector<Cell> cells;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      if (map.at({r, c}) != Occupancy::kFree) continue;
      bool f = false;
      const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        Cell n{r + dr[k], c + dc[k]};
        if (g.in_bounds(n) && map.at(n) == Occupancy::kUnknown) f = true;
      }
      if (f) cells.push_back({r, c});
    }
  }
  std::vector<std::size_t> parent(cells.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j)
      if (std::abs(cells[i].row - cells[j].row) <= 1 && std::abs(cells[i].col - cells[j].col) <= 1)
        parent[find(i)] = find(j);
  std::map<std::size_t, std::set<Cell>> groups;
  for (std::size_t i = 0; i < cells.size(); ++i) groups[find(i)].insert(cells[i]);
  std::set<std::set<Cell>> out;
  for (auto& [root, group] : groups)
    if (static_cast<int>(group.size()) >= min_size) out.insert(group);
  return out;
}

}  // namespace primnav::oracle
