#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "primnav/common.hpp"
#include "primnav/perception/embedding.hpp"

namespace primnav::explorer {

enum class Occupancy : std::uint8_t { kUnknown = 0, kFree = 1, kOccupied = 2 };

// Shared lattice geometry of the companion maps.
struct MapGeometry {
  int rows = 0;
  int cols = 0;
  double resolution = 0.25;
  Point origin;  // world position of cell (0, 0)'s corner

  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  bool in_bounds(const Cell& c) const { return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols; }
  std::size_t index(const Cell& c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c.col);
  }
  Cell cell_of(const Point& p) const {
    return {static_cast<int>(std::floor((p.y - origin.y) / resolution)),
            static_cast<int>(std::floor((p.x - origin.x) / resolution))};
  }
  Point center_of(const Cell& c) const {
    return {origin.x + (c.col + 0.5) * resolution, origin.y + (c.row + 0.5) * resolution};
  }
  friend bool operator==(const MapGeometry&, const MapGeometry&) = default;
};

class ObstacleMap {
 public:
  ObstacleMap() = default;
  explicit ObstacleMap(MapGeometry geometry)
      : geometry_(geometry), cells_(geometry.size(), Occupancy::kUnknown) {}

  const MapGeometry& geometry() const { return geometry_; }
  Occupancy at(const Cell& c) const {
    return geometry_.in_bounds(c) ? cells_[geometry_.index(c)] : Occupancy::kOccupied;
  }
  void set(const Cell& c, Occupancy o) { cells_[geometry_.index(c)] = o; }
  // Free marking never downgrades an occupied cell.
  void mark_free(const Cell& c) {
    auto& v = cells_[geometry_.index(c)];
    if (v != Occupancy::kOccupied) v = Occupancy::kFree;
  }
  void mark_occupied(const Cell& c) { cells_[geometry_.index(c)] = Occupancy::kOccupied; }

  const std::vector<Occupancy>& data() const { return cells_; }
  friend bool operator==(const ObstacleMap&, const ObstacleMap&) = default;

 private:
  MapGeometry geometry_;
  std::vector<Occupancy> cells_;
};

// Per-cell target relevance plus the confidence of the observations behind it.
struct ValueMap {
  MapGeometry geometry;
  std::vector<double> value;
  std::vector<double> confidence;

  ValueMap() = default;
  explicit ValueMap(MapGeometry g) : geometry(g), value(g.size(), 0.0), confidence(g.size(), 0.0) {}
  double value_at(const Cell& c) const { return geometry.in_bounds(c) ? value[geometry.index(c)] : 0.0; }
  friend bool operator==(const ValueMap&, const ValueMap&) = default;
};

// Per-cell unit feature vector (or empty) and its confidence. Vectors are stored
// contiguously, `dim` values per cell.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(MapGeometry g, int dim)
      : geometry_(g), dim_(dim), data_(g.size() * static_cast<std::size_t>(dim), 0.0),
        present_(g.size(), 0), confidence_(g.size(), 0.0) {}

  const MapGeometry& geometry() const { return geometry_; }
  int dim() const { return dim_; }
  bool has(std::size_t i) const { return present_[i] != 0; }
  std::span<const double> vector(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<double> vector(std::size_t i) {
    return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double confidence(std::size_t i) const { return confidence_[i]; }

  void set(std::size_t i, std::span<const double> v, double conf) {
    std::copy(v.begin(), v.end(), vector(i).begin());
    present_[i] = 1;
    confidence_[i] = conf;
  }
  void set_confidence(std::size_t i, double conf) { confidence_[i] = conf; }
  void mark_present(std::size_t i) { present_[i] = 1; }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  MapGeometry geometry_;
  int dim_ = 0;
  std::vector<double> data_;
  std::vector<std::uint8_t> present_;
  std::vector<double> confidence_;
};

class MemoryThreshold {
 public:
  MemoryThreshold() = default;
  explicit MemoryThreshold(double v) : value_(v) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("memory threshold must lie in [0, 1]");
  }
  double value() const { return value_; }

 private:
  double value_ = 0.4;
};

struct Frontier {
  std::vector<Cell> cells;
  Point midpoint;
  Cell midpoint_cell;
  double score = 0.0;
};

}  // namespace primnav::explorer
