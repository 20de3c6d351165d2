#pragma once

// Compact phase spaces (interval, circle, and products of the two) and the
// uniform box grids that discretize them.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace chainscope {

using BoxIndex = std::uint32_t;

/// A point with one or two coordinates. Circle coordinates live in [0,1).
struct Point {
  std::array<double, 2> coords{};
  std::size_t dim = 1;

  Point() = default;
  explicit Point(double x) : coords{x, 0.0}, dim(1) {}
  Point(double x, double y) : coords{x, y}, dim(2) {}

  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim != b.dim) return false;
    for (std::size_t i = 0; i < a.dim; ++i)
      if (a.coords[i] != b.coords[i]) return false;
    return true;
  }
};

std::string to_string(const Point& p);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Unit circle R/Z with the arc-length metric min(|x-y|, 1-|x-y|).
struct Circle {};

class SpaceKind;

/// Max-metric product of two one-dimensional spaces.
struct Product {
  std::shared_ptr<const SpaceKind> left;
  std::shared_ptr<const SpaceKind> right;
};

class SpaceKind {
 public:
  using Variant = std::variant<Interval, Circle, Product>;

  static SpaceKind interval(double lo, double hi);
  static SpaceKind circle();
  static SpaceKind product(SpaceKind left, SpaceKind right);

  const Variant& kind() const { return kind_; }
  bool is_interval() const { return std::holds_alternative<Interval>(kind_); }
  bool is_circle() const { return std::holds_alternative<Circle>(kind_); }
  bool is_product() const { return std::holds_alternative<Product>(kind_); }

  std::size_t dimension() const { return is_product() ? 2 : 1; }

  /// Component spaces of a product; throws DomainError otherwise.
  const SpaceKind& left() const;
  const SpaceKind& right() const;

  /// Length of the space along one axis (hi-lo for intervals, 1 for circles).
  double extent(std::size_t axis) const;

  /// Reduces circle coordinates mod 1; leaves interval coordinates untouched.
  Point reduce(Point p) const;

  /// True if p has the right dimension and lies in the space (after reduction).
  bool contains(const Point& p) const;

  std::string describe() const;

  friend bool operator==(const SpaceKind& a, const SpaceKind& b);

 private:
  explicit SpaceKind(Variant v) : kind_(std::move(v)) {}
  Variant kind_;
};

/// Circle coordinate reduction to [0,1).
double reduce_circle(double x);

/// Distance on a one-dimensional component space.
double dist1(const SpaceKind& space, double x, double y);

/// Metric of the space; max of component distances on products.
double dist(const SpaceKind& space, const Point& p, const Point& q);

/// Uniform partition of a space into equal half-open boxes. For products the
/// box index is row-major: index = left_index * right_resolution + right_index.
class BoxGrid {
 public:
  BoxGrid(SpaceKind space, std::vector<std::size_t> resolution);
  BoxGrid(SpaceKind space, std::size_t resolution);

  const SpaceKind& space() const { return space_; }
  const std::vector<std::size_t>& resolution() const { return resolution_; }
  std::size_t dimension() const { return resolution_.size(); }
  std::size_t size() const { return size_; }

  double width(std::size_t axis) const { return widths_[axis]; }
  /// Box diameter in the space metric: the max of the axis widths.
  double diameter() const;

  Point center(BoxIndex i) const;
  BoxIndex locate(const Point& p) const;

  /// Axis coordinate of a box center; axis_index is the per-axis box index.
  double axis_center(std::size_t axis, std::size_t axis_index) const;
  std::size_t axis_locate(std::size_t axis, double x) const;

  /// Per-axis indices of a box and back.
  std::array<std::size_t, 2> split(BoxIndex i) const;
  BoxIndex join(std::size_t a, std::size_t b = 0) const;

  /// Component space of one axis (the space itself for 1-D grids).
  const SpaceKind& axis_space(std::size_t axis) const;

  /// Indices along one axis whose centers lie strictly within `radius` of x.
  /// Sorted and free of duplicates.
  std::vector<std::size_t> axis_ball(std::size_t axis, double x, double radius) const;

  /// Boxes whose centers lie strictly within `radius` of p, in increasing order.
  std::vector<BoxIndex> ball(const Point& p, double radius) const;

  /// Boxes whose centers lie within distance <= radius of p, in increasing order.
  std::vector<BoxIndex> closed_ball(const Point& p, double radius) const;

  std::string describe() const;

 private:
  SpaceKind space_;
  std::vector<std::size_t> resolution_;
  std::vector<double> widths_;
  std::size_t size_ = 0;
};

/// True iff the undirected graph of geometrically adjacent boxes is connected.
bool grid_adjacency_connected(const BoxGrid& grid);

}  // namespace chainscope
