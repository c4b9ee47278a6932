#include "primnav/gridworld/geodesic.hpp"


namespace primnav::gridworld {

DistanceField::DistanceField(const Grid& grid, double resolution, Cell source)
    : DistanceField(grid.rows(), grid.cols(), resolution, source,
                    [&grid](const Cell& c) { return grid.is_free(c); }) {
  if (!grid.is_free(source)) throw ValidationError("distance field source is not a free cell");
}

double DistanceField::at(const Cell& c) const {
  if (c.row < 0 || c.col < 0 || c.row >= rows_ || c.col >= cols_) return kInfinity;
  return dist_[static_cast<std::size_t>(c.row) * cols_ + c.col];
}

double geodesic_distance(const Scene& scene, const Point& a, const Point& b) {
  Cell ca = scene.cell_of(a), cb = scene.cell_of(b);
  if (!scene.grid.is_free(ca)) throw ValidationError("geodesic_distance: start is not on a free cell");
  if (!scene.grid.is_free(cb)) throw ValidationError("geodesic_distance: end is not on a free cell");
  if (ca == cb) return 0.0;
  return DistanceField(scene.grid, scene.resolution, ca).at(cb);
}

bool free_space_connected(const Grid& grid) {
  std::vector<char> seen(grid.data().size(), 0);
  std::size_t free_count = 0;
  Cell start{-1, -1};
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c)
      if (grid.at({r, c}) == CellKind::kFree) {
        if (free_count++ == 0) start = {r, c};
      }
  if (free_count == 0) return true;
  std::vector<Cell> stack{start};
  seen[grid.index(start)] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    Cell c = stack.back();
    stack.pop_back();
    ++reached;
    for (const auto& m : kMoves8) {
      if (m.drow != 0 && m.dcol != 0) continue;
      Cell n{c.row + m.drow, c.col + m.dcol};
      if (grid.is_free(n) && !seen[grid.index(n)]) {
        seen[grid.index(n)] = 1;
        stack.push_back(n);
      }
    }
  }
  return reached == free_count;
}

}  // namespace primnav::gridworld
