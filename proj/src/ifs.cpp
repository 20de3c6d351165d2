#include "chainscope/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chainscope/error.hpp"

namespace chainscope {

std::string format_word(const Word& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  return os.str();
}

Word parse_word(const std::string& text) {
  Word w;
  for (auto d : parse_digits(text)) w.push_back(d);
  return w;
}

MapSpec MapSpec::rotation(double angle) {
  if (!std::isfinite(angle)) throw DomainError("rotation angle must be finite");
  return MapSpec(Rotation{angle});
}

MapSpec MapSpec::affine(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("affine coefficients must be finite");
  return MapSpec(Affine{a, b});
}

MapSpec MapSpec::piecewise_linear(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw DomainError("piecewise-linear map needs at least two breakpoints");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
      throw DomainError("piecewise-linear breakpoints must be finite");
    if (i > 0 && !(points[i - 1].first < points[i].first))
      throw DomainError("piecewise-linear breakpoints must be strictly increasing in x");
  }
  return MapSpec(PiecewiseLinear{std::move(points)});
}

MapSpec MapSpec::product(MapSpec left, MapSpec right) {
  return MapSpec(ProductMap{std::make_shared<const MapSpec>(std::move(left)),
                            std::make_shared<const MapSpec>(std::move(right))});
}

MapSpec MapSpec::composed(std::vector<MapSpec> steps) {
  if (steps.empty()) throw DomainError("composition needs at least one map");
  return MapSpec(Composed{std::move(steps)});
}

double MapSpec::lipschitz() const {
  return std::visit(
      [](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Rotation>) {
          return 1.0;
        } else if constexpr (std::is_same_v<M, Affine>) {
          return std::fabs(m.a);
        } else if constexpr (std::is_same_v<M, PiecewiseLinear>) {
          double l = 0.0;
          for (std::size_t i = 1; i < m.points.size(); ++i) {
            const auto [x0, y0] = m.points[i - 1];
            const auto [x1, y1] = m.points[i];
            l = std::max(l, std::fabs((y1 - y0) / (x1 - x0)));
          }
          return l;
        } else if constexpr (std::is_same_v<M, ProductMap>) {
          return std::max(m.left->lipschitz(), m.right->lipschitz());
        } else {
          double l = 1.0;
          for (const auto& s : m.steps) l *= s.lipschitz();
          return l;
        }
      },
      kind_);
}

void MapSpec::check_compatible(const SpaceKind& space) const {
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Rotation>) {
          if (!space.is_circle()) throw DomainError("rotation maps need a circle space");
        } else if constexpr (std::is_same_v<M, Affine>) {
          if (!space.is_interval()) throw DomainError("affine maps need an interval space");
        } else if constexpr (std::is_same_v<M, PiecewiseLinear>) {
          const auto* iv = std::get_if<Interval>(&space.kind());
          if (!iv) throw DomainError("piecewise-linear maps need an interval space");
          if (m.points.front().first != iv->lo || m.points.back().first != iv->hi)
            throw DomainError("piecewise-linear breakpoints must start at lo and end at hi");
          for (const auto& [x, y] : m.points)
            if (y < iv->lo || y > iv->hi) throw DomainError("piecewise-linear map leaves the interval");
        } else if constexpr (std::is_same_v<M, ProductMap>) {
          if (!space.is_product()) throw DomainError("product maps need a product space");
          m.left->check_compatible(space.left());
          m.right->check_compatible(space.right());
        } else {
          for (const auto& s : m.steps) s.check_compatible(space);
        }
      },
      kind_);
}

double MapSpec::evaluate1(const SpaceKind& space, double x) const {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Rotation>) {
          return reduce_circle(x + m.angle);
        } else if constexpr (std::is_same_v<M, Affine>) {
          const auto& iv = std::get<Interval>(space.kind());
          return std::clamp(m.a * x + m.b, iv.lo, iv.hi);
        } else if constexpr (std::is_same_v<M, PiecewiseLinear>) {
          const auto& iv = std::get<Interval>(space.kind());
          const auto& pts = m.points;
          auto it = std::upper_bound(pts.begin(), pts.end(), x,
                                     [](double v, const auto& pt) { return v < pt.first; });
          std::size_t k = it == pts.begin() ? 0 : static_cast<std::size_t>(it - pts.begin()) - 1;
          k = std::min(k, pts.size() - 2);
          const auto [x0, y0] = pts[k];
          const auto [x1, y1] = pts[k + 1];
          const double y = y0 + (y1 - y0) * ((x - x0) / (x1 - x0));
          return std::clamp(y, iv.lo, iv.hi);
        } else if constexpr (std::is_same_v<M, Composed>) {
          for (const auto& s : m.steps) x = s.evaluate1(space, x);
          return x;
        } else {
          throw DomainError("product map applied to a one-dimensional space");
        }
      },
      kind_);
}

Point MapSpec::evaluate(const SpaceKind& space, const Point& p) const {
  if (const auto* pm = std::get_if<ProductMap>(&kind_))
    return Point(pm->left->evaluate1(space.left(), p[0]), pm->right->evaluate1(space.right(), p[1]));
  if (const auto* c = std::get_if<Composed>(&kind_)) {
    Point q = p;
    for (const auto& s : c->steps) q = s.evaluate(space, q);
    return q;
  }
  return Point(evaluate1(space, p[0]));
}

std::string MapSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Rotation>) {
          os << "rotation(" << m.angle << ")";
        } else if constexpr (std::is_same_v<M, Affine>) {
          os << "affine(" << m.a << "," << m.b << ")";
        } else if constexpr (std::is_same_v<M, PiecewiseLinear>) {
          os << "pwl(";
          for (std::size_t i = 0; i < m.points.size(); ++i)
            os << (i ? ";" : "") << m.points[i].first << "," << m.points[i].second;
          os << ")";
        } else if constexpr (std::is_same_v<M, ProductMap>) {
          os << "product(" << m.left->describe() << "," << m.right->describe() << ")";
        } else {
          os << "compose(";
          for (std::size_t i = 0; i < m.steps.size(); ++i) os << (i ? "," : "") << m.steps[i].describe();
          os << ")";
        }
      },
      kind_);
  return os.str();
}

std::optional<double> rotation_angle(const MapSpec& m) {
  if (const auto* r = std::get_if<Rotation>(&m.kind())) return r->angle;
  if (const auto* c = std::get_if<Composed>(&m.kind())) {
    double total = 0.0;
    for (const auto& s : c->steps) {
      auto a = rotation_angle(s);
      if (!a) return std::nullopt;
      total += *a;
    }
    return total;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Point> sample_points(const SpaceKind& space) {
  std::vector<Point> out;
  if (space.is_product()) {
    BoxGrid g(space, 33);
    for (BoxIndex i = 0; i < g.size(); ++i) out.push_back(g.center(i));
  } else {
    BoxGrid g(space, 257);
    for (BoxIndex i = 0; i < g.size(); ++i) out.push_back(g.center(i));
  }
  if (const auto* iv = std::get_if<Interval>(&space.kind())) {
    out.emplace_back(iv->lo);
    out.emplace_back(iv->hi);
  }
  return out;
}

}  // namespace

IFSystem::IFSystem(SpaceKind space, std::vector<MapSpec> maps) : space_(std::move(space)), maps_(std::move(maps)) {
  if (maps_.empty()) throw DomainError("an IFS needs at least one map");
  const auto samples = sample_points(space_);
  for (std::size_t k = 0; k < maps_.size(); ++k) {
    maps_[k].check_compatible(space_);
    for (const auto& p : samples) {
      const Point q = maps_[k].evaluate(space_, p);
      if (!space_.contains(q))
        throw DomainError("map " + std::to_string(k) + " does not send the space into itself");
    }
  }
}

const MapSpec& IFSystem::map(Symbol s) const {
  if (s >= maps_.size())
    throw DomainError("symbol " + std::to_string(s) + " out of range (|L| = " + std::to_string(maps_.size()) + ")");
  return maps_[s];
}

double IFSystem::lipschitz() const {
  double l = 0.0;
  for (const auto& m : maps_) l = std::max(l, m.lipschitz());
  return l;
}

Point apply(const IFSystem& sys, Symbol s, const Point& p) {
  const auto& m = sys.map(s);
  const Point q = sys.space().reduce(p);
  if (!sys.space().contains(q)) throw DomainError("apply: point " + to_string(p) + " outside the space");
  return m.evaluate(sys.space(), q);
}

Point apply_word(const IFSystem& sys, const Word& w, const Point& p) {
  Point q = sys.space().reduce(p);
  if (!sys.space().contains(q)) throw DomainError("apply_word: point " + to_string(p) + " outside the space");
  for (auto s : w) q = sys.map(s).evaluate(sys.space(), q);
  return q;
}

namespace {

std::size_t checked_power(std::size_t base, std::size_t n, std::size_t cap) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (count > cap / base) throw ResourceError("iterate family exceeds the map cap of " + std::to_string(cap));
    count *= base;
  }
  if (count > cap) throw ResourceError("iterate family exceeds the map cap of " + std::to_string(cap));
  return count;
}

}  // namespace

Word iterate_word(std::size_t symbol_count, std::size_t n, std::size_t index) {
  Word w(n);
  for (std::size_t i = n; i-- > 0;) {
    w[i] = static_cast<Symbol>(index % symbol_count);
    index /= symbol_count;
  }
  return w;
}

IFSystem iterate_system(const IFSystem& sys, std::size_t n, std::size_t map_cap) {
  if (n == 0) throw DomainError("iterate_system needs n >= 1");
  const std::size_t base = sys.symbol_count();
  const std::size_t count = checked_power(base, n, map_cap);
  if (n == 1) return sys;
  std::vector<MapSpec> maps;
  maps.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<MapSpec> steps;
    for (auto s : iterate_word(base, n, k)) steps.push_back(sys.maps()[s]);
    maps.push_back(MapSpec::composed(std::move(steps)));
  }
  return IFSystem(sys.space(), std::move(maps));
}

IFSystem product_system(const IFSystem& f, const IFSystem& g, std::size_t map_cap) {
  if (f.symbol_count() > map_cap / g.symbol_count())
    throw ResourceError("product family exceeds the map cap of " + std::to_string(map_cap));
  std::vector<MapSpec> maps;
  maps.reserve(f.symbol_count() * g.symbol_count());
  for (const auto& a : f.maps())
    for (const auto& b : g.maps()) maps.push_back(MapSpec::product(a, b));
  return IFSystem(SpaceKind::product(f.space(), g.space()), std::move(maps));
}

std::vector<Point> orbit(const IFSystem& sys, const Word& sigma, const Point& x0) {
  std::vector<Point> out;
  out.reserve(sigma.size() + 1);
  Point x = sys.space().reduce(x0);
  if (!sys.space().contains(x)) throw DomainError("orbit: start point outside the space");
  out.push_back(x);
  for (auto s : sigma) {
    x = sys.map(s).evaluate(sys.space(), x);
    out.push_back(x);
  }
  return out;
}

ChainCheck validate_chain(const IFSystem& sys, const PseudoOrbit& chain, double delta) {
  ChainCheck result;
  if (chain.points.empty() || !(delta > 0.0)) return result;
  for (const auto& p : chain.points)
    if (!sys.space().contains(p)) throw DomainError("chain point " + to_string(p) + " outside the space");
  Word witness;
  for (std::size_t i = 0; i + 1 < chain.points.size(); ++i) {
    const Point x = sys.space().reduce(chain.points[i]);
    const Point y = sys.space().reduce(chain.points[i + 1]);
    bool found = false;
    for (Symbol s = 0; s < sys.symbol_count(); ++s) {
      if (dist(sys.space(), sys.maps()[s].evaluate(sys.space(), x), y) < delta) {
        witness.push_back(s);
        found = true;
        break;
      }
    }
    if (!found) {
      result.failed_step = i;
      return result;
    }
  }
  result.valid = true;
  result.witness = std::move(witness);
  return result;
}

}  // namespace chainscope
