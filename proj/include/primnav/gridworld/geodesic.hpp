#pragma once

#include <array>
#include <functional>
#include <queue>
#include <vector>

#include "primnav/gridworld/scene.hpp"

namespace primnav::gridworld {

// 8-connected moves; diagonal moves may not cut an obstacle corner.
struct Move {
  int drow;
  int dcol;
  double cost;  // in cells
};
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr std::array<Move, 8> kMoves8{{{-1, 0, 1.0},
                                              {1, 0, 1.0},
                                              {0, -1, 1.0},
                                              {0, 1, 1.0},
                                              {-1, -1, kSqrt2},
                                              {-1, 1, kSqrt2},
                                              {1, -1, kSqrt2},
                                              {1, 1, kSqrt2}}};

// Shortest-path lengths in meters from `source` to every cell; +inf where unreachable.
class DistanceField {
 public:
  DistanceField(const Grid& grid, double resolution, Cell source);
  // Generic form over any rows x cols lattice; `passable(cell)` must be in-bounds-safe.
  template <class Passable>
  DistanceField(int rows, int cols, double resolution, Cell source, Passable&& passable);

  double at(const Cell& c) const;
  const std::vector<double>& data() const { return dist_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> dist_;
};

template <class Passable>
DistanceField::DistanceField(int rows, int cols, double resolution, Cell source, Passable&& passable)
    : rows_(rows), cols_(cols), dist_(static_cast<std::size_t>(rows) * cols, kInfinity) {
  auto inside = [&](const Cell& c) { return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols; };
  auto index = [&](const Cell& c) { return static_cast<std::size_t>(c.row) * cols + c.col; };
  if (!inside(source) || !passable(source)) return;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist_[index(source)] = 0.0;
  open.push({0.0, index(source)});
  while (!open.empty()) {
    auto [d, idx] = open.top();
    open.pop();
    if (d > dist_[idx]) continue;
    Cell c{static_cast<int>(idx / cols), static_cast<int>(idx % cols)};
    for (const auto& m : kMoves8) {
      Cell n{c.row + m.drow, c.col + m.dcol};
      if (!inside(n) || !passable(n)) continue;
      if (m.drow != 0 && m.dcol != 0) {
        Cell a{c.row + m.drow, c.col}, b{c.row, c.col + m.dcol};
        if (!passable(a) || !passable(b)) continue;
      }
      double nd = d + m.cost * resolution;
      std::size_t ni = index(n);
      if (nd < dist_[ni]) {
        dist_[ni] = nd;
        open.push({nd, ni});
      }
    }
  }
}

// Geodesic distance in meters between two points on free cells; +inf if disconnected.
// Throws ValidationError if either point is not on a free cell.
double geodesic_distance(const Scene& scene, const Point& a, const Point& b);

// True when every free cell is reachable from every other free cell.
bool free_space_connected(const Grid& grid);

}  // namespace primnav::gridworld
