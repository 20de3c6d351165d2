#pragma once

// Iterated function systems: finite families of self-maps of a space, their
// composition words, iterate families F^n, products F x G, orbits and
// pseudo-orbits.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chainscope/odometer.hpp"
#include "chainscope/space.hpp"

namespace chainscope {

using Symbol = std::uint32_t;

/// Symbols in application order: the first symbol is applied first.
using Word = std::vector<Symbol>;

std::string format_word(const Word& w);
Word parse_word(const std::string& text);

struct Rotation {
  double angle = 0.0;
};

/// x -> clamp(a*x + b) on an interval.
struct Affine {
  double a = 1.0;
  double b = 0.0;
};

/// Linear interpolation through (x, y) breakpoints spanning the interval.
struct PiecewiseLinear {
  std::vector<std::pair<double, double>> points;
};

class MapSpec;

struct ProductMap {
  std::shared_ptr<const MapSpec> left;
  std::shared_ptr<const MapSpec> right;
};

/// Composition evaluated by folding; steps[0] is applied first.
struct Composed {
  std::vector<MapSpec> steps;
};

class MapSpec {
 public:
  using Variant = std::variant<Rotation, Affine, PiecewiseLinear, ProductMap, Composed>;

  static MapSpec rotation(double angle);
  static MapSpec affine(double a, double b);
  static MapSpec piecewise_linear(std::vector<std::pair<double, double>> points);
  static MapSpec product(MapSpec left, MapSpec right);
  static MapSpec composed(std::vector<MapSpec> steps);

  const Variant& kind() const { return kind_; }

  /// Lipschitz bound: 1 for rotations, |a| for affine maps, the largest
  /// slope magnitude for piecewise-linear maps, the max over product
  /// factors and the product over composition steps.
  double lipschitz() const;

  /// Throws DomainError if the map cannot act on `space` (wrong kind,
  /// breakpoints not spanning the interval, ...).
  void check_compatible(const SpaceKind& space) const;

  /// Image of p; p must already be reduced and inside the space.
  Point evaluate(const SpaceKind& space, const Point& p) const;

  std::string describe() const;

 private:
  explicit MapSpec(Variant v) : kind_(std::move(v)) {}
  double evaluate1(const SpaceKind& space, double x) const;
  Variant kind_;
};

/// Total angle if the map is a rotation or a composition of rotations.
std::optional<double> rotation_angle(const MapSpec& m);

inline constexpr std::size_t kDefaultMapCap = 4096;

class IFSystem {
 public:
  /// Validates every map against the space and samples it to confirm it is
  /// a self-map.
  IFSystem(SpaceKind space, std::vector<MapSpec> maps);

  const SpaceKind& space() const { return space_; }
  const std::vector<MapSpec>& maps() const { return maps_; }
  std::size_t symbol_count() const { return maps_.size(); }
  const MapSpec& map(Symbol s) const;

  /// Largest Lipschitz bound over the family.
  double lipschitz() const;

 private:
  SpaceKind space_;
  std::vector<MapSpec> maps_;
};

/// A finite sequence of points together with the tolerance its producer claims.
struct PseudoOrbit {
  std::vector<Point> points;
  double delta = 0.0;
};

struct ChainCheck {
  bool valid = false;
  std::optional<Word> witness;
  /// First step (index of the source point) that no symbol realizes.
  std::optional<std::size_t> failed_step;
};

Point apply(const IFSystem& sys, Symbol s, const Point& p);
Point apply_word(const IFSystem& sys, const Word& w, const Point& p);

/// The family of all length-n compositions. Symbol k of the result is the
/// word whose base-|L| digits, most significant first, are (l_1, ..., l_n).
IFSystem iterate_system(const IFSystem& sys, std::size_t n, std::size_t map_cap = kDefaultMapCap);

/// Word of the iterate family symbol `index` (inverse of the numbering above).
Word iterate_word(std::size_t symbol_count, std::size_t n, std::size_t index);

/// Maps (f_l, g_g) indexed l * |G| + g on the product space.
IFSystem product_system(const IFSystem& f, const IFSystem& g, std::size_t map_cap = kDefaultMapCap);

/// (x0, F_{s1}(x0), ..., F_{sn}(x0)).
std::vector<Point> orbit(const IFSystem& sys, const Word& sigma, const Point& x0);

/// Checks d(f_l(x_i), x_{i+1}) < delta for some l at every step; the witness
/// takes the lowest such symbol per step.
ChainCheck validate_chain(const IFSystem& sys, const PseudoOrbit& chain, double delta);

/// The truncated odometer seen as a finite metric space with the single map
/// g_alpha. Point i is the digit string with little-endian index i.
class OdoIFS {
 public:
  explicit OdoIFS(Odometer odometer);

  const Odometer& odometer() const { return odometer_; }
  std::size_t size() const { return odometer_.size(); }
  std::size_t symbol_count() const { return 1; }

  DigitString point(BoxIndex i) const;
  BoxIndex image(BoxIndex i) const;
  double dist(BoxIndex i, BoxIndex j) const;

  /// Points strictly within `radius` of point `center`, increasing.
  std::vector<BoxIndex> ball(BoxIndex center, double radius) const;

 private:
  Odometer odometer_;
};

inline constexpr std::size_t kDefaultOdometerCap = 100000;

OdoIFS as_finite_system(const Odometer& o, std::size_t point_cap = kDefaultOdometerCap);

}  // namespace chainscope
