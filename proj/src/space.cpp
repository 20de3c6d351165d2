#include "chainscope/space.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "chainscope/error.hpp"

namespace chainscope {

std::string to_string(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << p.coords[0];
  if (p.dim == 2) os << ':' << p.coords[1];
  return os.str();
}

SpaceKind SpaceKind::interval(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("interval requires finite lo < hi");
  return SpaceKind(Interval{lo, hi});
}

SpaceKind SpaceKind::circle() { return SpaceKind(Circle{}); }

SpaceKind SpaceKind::product(SpaceKind left, SpaceKind right) {
  if (left.is_product() || right.is_product())
    throw DomainError("products are limited to two one-dimensional factors");
  return SpaceKind(Product{std::make_shared<const SpaceKind>(std::move(left)),
                           std::make_shared<const SpaceKind>(std::move(right))});
}

const SpaceKind& SpaceKind::left() const {
  if (const auto* p = std::get_if<Product>(&kind_)) return *p->left;
  throw DomainError("left(): space is not a product");
}

const SpaceKind& SpaceKind::right() const {
  if (const auto* p = std::get_if<Product>(&kind_)) return *p->right;
  throw DomainError("right(): space is not a product");
}

double SpaceKind::extent(std::size_t axis) const {
  if (is_product()) return (axis == 0 ? left() : right()).extent(0);
  if (axis != 0) throw DomainError("axis out of range");
  if (const auto* iv = std::get_if<Interval>(&kind_)) return iv->hi - iv->lo;
  return 1.0;
}

double reduce_circle(double x) {
  double r = x - std::floor(x);
  // x slightly below an integer can round up to exactly 1.0
  return r >= 1.0 ? 0.0 : r;
}

Point SpaceKind::reduce(Point p) const {
  if (p.dim != dimension()) throw DomainError("point dimension does not match space");
  if (is_circle()) {
    p[0] = reduce_circle(p[0]);
  } else if (is_product()) {
    if (left().is_circle()) p[0] = reduce_circle(p[0]);
    if (right().is_circle()) p[1] = reduce_circle(p[1]);
  }
  return p;
}

namespace {

bool contains1(const SpaceKind& s, double x) {
  if (!std::isfinite(x)) return false;
  if (const auto* iv = std::get_if<Interval>(&s.kind())) return x >= iv->lo && x <= iv->hi;
  return true;
}

}  // namespace

bool SpaceKind::contains(const Point& p) const {
  if (p.dim != dimension()) return false;
  if (is_product()) return contains1(left(), p[0]) && contains1(right(), p[1]);
  return contains1(*this, p[0]);
}

std::string SpaceKind::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Interval>) {
          os << "interval[" << k.lo << "," << k.hi << "]";
        } else if constexpr (std::is_same_v<K, Circle>) {
          os << "circle";
        } else {
          os << "product(" << k.left->describe() << "," << k.right->describe() << ")";
        }
      },
      kind_);
  return os.str();
}

bool operator==(const SpaceKind& a, const SpaceKind& b) {
  if (a.kind_.index() != b.kind_.index()) return false;
  if (const auto* ia = std::get_if<Interval>(&a.kind_)) {
    const auto& ib = std::get<Interval>(b.kind_);
    return ia->lo == ib.lo && ia->hi == ib.hi;
  }
  if (a.is_circle()) return true;
  return a.left() == b.left() && a.right() == b.right();
}

double dist1(const SpaceKind& space, double x, double y) {
  double d = std::fabs(x - y);
  if (space.is_circle()) {
    if (d >= 1.0) d = std::fmod(d, 1.0);
    return std::min(d, 1.0 - d);
  }
  return d;
}

double dist(const SpaceKind& space, const Point& p, const Point& q) {
  if (p.dim != space.dimension() || q.dim != space.dimension())
    throw DomainError("dist: point dimension does not match space");
  if (space.is_product())
    return std::max(dist1(space.left(), p[0], q[0]), dist1(space.right(), p[1], q[1]));
  return dist1(space, p[0], q[0]);
}

// ---------------------------------------------------------------------------

BoxGrid::BoxGrid(SpaceKind space, std::vector<std::size_t> resolution)
    : space_(std::move(space)), resolution_(std::move(resolution)) {
  if (resolution_.size() != space_.dimension())
    throw DomainError("grid resolution needs one entry per axis");
  size_ = 1;
  for (std::size_t axis = 0; axis < resolution_.size(); ++axis) {
    if (resolution_[axis] == 0) throw DomainError("grid resolution must be positive");
    size_ *= resolution_[axis];
    widths_.push_back(space_.extent(axis) / static_cast<double>(resolution_[axis]));
  }
  if (size_ > std::size_t{1} << 31) throw ResourceError("grid has too many boxes");
}

BoxGrid::BoxGrid(SpaceKind space, std::size_t resolution)
    : BoxGrid(space, std::vector<std::size_t>(space.dimension(), resolution)) {}

double BoxGrid::diameter() const { return *std::max_element(widths_.begin(), widths_.end()); }

const SpaceKind& BoxGrid::axis_space(std::size_t axis) const {
  if (space_.is_product()) return axis == 0 ? space_.left() : space_.right();
  return space_;
}

double BoxGrid::axis_center(std::size_t axis, std::size_t k) const {
  const auto n = static_cast<double>(resolution_[axis]);
  const auto& s = axis_space(axis);
  if (const auto* iv = std::get_if<Interval>(&s.kind()))
    return iv->lo + (iv->hi - iv->lo) * (static_cast<double>(k) + 0.5) / n;
  return (static_cast<double>(k) + 0.5) / n;
}

std::size_t BoxGrid::axis_locate(std::size_t axis, double x) const {
  const std::size_t n = resolution_[axis];
  const auto& s = axis_space(axis);
  double t = 0.0;
  if (const auto* iv = std::get_if<Interval>(&s.kind())) {
    if (!(x >= iv->lo && x <= iv->hi)) throw DomainError("locate: point outside interval");
    t = (x - iv->lo) / (iv->hi - iv->lo);
  } else {
    if (!std::isfinite(x)) throw DomainError("locate: non-finite coordinate");
    t = reduce_circle(x);
  }
  auto k = static_cast<std::size_t>(std::floor(t * static_cast<double>(n)));
  return std::min(k, n - 1);
}

std::array<std::size_t, 2> BoxGrid::split(BoxIndex i) const {
  if (dimension() == 1) return {i, 0};
  return {i / resolution_[1], i % resolution_[1]};
}

BoxIndex BoxGrid::join(std::size_t a, std::size_t b) const {
  if (dimension() == 1) return static_cast<BoxIndex>(a);
  return static_cast<BoxIndex>(a * resolution_[1] + b);
}

Point BoxGrid::center(BoxIndex i) const {
  if (i >= size_) throw DomainError("box index out of range");
  auto [a, b] = split(i);
  if (dimension() == 1) return Point(axis_center(0, a));
  return Point(axis_center(0, a), axis_center(1, b));
}

BoxIndex BoxGrid::locate(const Point& p) const {
  if (p.dim != dimension()) throw DomainError("locate: point dimension does not match space");
  if (dimension() == 1) return join(axis_locate(0, p[0]));
  return join(axis_locate(0, p[0]), axis_locate(1, p[1]));
}

namespace {

template <typename Within>
std::vector<std::size_t> axis_candidates(const BoxGrid& g, std::size_t axis, double x, double radius,
                                         Within within) {
  std::vector<std::size_t> out;
  if (!(radius > 0.0) && radius != 0.0) return out;
  const std::size_t n = g.resolution()[axis];
  const auto& s = g.axis_space(axis);
  const double h = g.width(axis);
  if (const auto* iv = std::get_if<Interval>(&s.kind())) {
    const double lo_f = std::floor((x - iv->lo - radius) / h - 0.5) - 1.0;
    const double hi_f = std::ceil((x - iv->lo + radius) / h - 0.5) + 1.0;
    const auto first = static_cast<long long>(std::max(0.0, lo_f));
    const auto last = static_cast<long long>(std::min(static_cast<double>(n - 1), hi_f));
    for (long long k = first; k <= last; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      if (within(dist1(s, g.axis_center(axis, idx), x))) out.push_back(idx);
    }
    return out;
  }
  // circle
  if (radius * 2.0 >= 1.0) {
    for (std::size_t k = 0; k < n; ++k)
      if (within(dist1(s, g.axis_center(axis, k), x))) out.push_back(k);
    return out;
  }
  const auto nn = static_cast<long long>(n);
  const auto first = static_cast<long long>(std::floor((x - radius) / h - 0.5)) - 1;
  const auto last = static_cast<long long>(std::ceil((x + radius) / h - 0.5)) + 1;
  for (long long k = first; k <= last; ++k) {
    const auto idx = static_cast<std::size_t>(((k % nn) + nn) % nn);
    if (within(dist1(s, g.axis_center(axis, idx), x))) out.push_back(idx);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <typename Within>
std::vector<BoxIndex> ball_impl(const BoxGrid& g, const Point& p, double radius, Within within) {
  if (p.dim != g.dimension()) throw DomainError("ball: point dimension does not match space");
  std::vector<BoxIndex> out;
  auto first = axis_candidates(g, 0, p[0], radius, within);
  if (g.dimension() == 1) {
    out.assign(first.begin(), first.end());
    return out;
  }
  auto second = axis_candidates(g, 1, p[1], radius, within);
  out.reserve(first.size() * second.size());
  for (auto a : first)
    for (auto b : second) out.push_back(g.join(a, b));
  return out;
}

}  // namespace

std::vector<std::size_t> BoxGrid::axis_ball(std::size_t axis, double x, double radius) const {
  return axis_candidates(*this, axis, x, radius, [radius](double d) { return d < radius; });
}

std::vector<BoxIndex> BoxGrid::ball(const Point& p, double radius) const {
  return ball_impl(*this, p, radius, [radius](double d) { return d < radius; });
}

std::vector<BoxIndex> BoxGrid::closed_ball(const Point& p, double radius) const {
  return ball_impl(*this, p, radius, [radius](double d) { return d <= radius; });
}

std::string BoxGrid::describe() const {
  std::ostringstream os;
  os << space_.describe() << " res=";
  for (std::size_t i = 0; i < resolution_.size(); ++i) os << (i ? "x" : "") << resolution_[i];
  return os.str();
}

bool grid_adjacency_connected(const BoxGrid& grid) {
  const std::size_t n = grid.size();
  if (n == 0) return false;
  auto axis_neighbors = [&](std::size_t axis, std::size_t k, std::vector<std::size_t>& out) {
    out.clear();
    const std::size_t res = grid.resolution()[axis];
    if (k + 1 < res) out.push_back(k + 1);
    if (k > 0) out.push_back(k - 1);
    if (grid.axis_space(axis).is_circle() && res > 1) {
      if (k + 1 == res) out.push_back(0);
      if (k == 0) out.push_back(res - 1);
    }
  };
  std::vector<char> seen(n, 0);
  std::queue<BoxIndex> q;
  q.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  std::vector<std::size_t> nb;
  while (!q.empty()) {
    const BoxIndex v = q.front();
    q.pop();
    auto [a, b] = grid.split(v);
    auto visit = [&](BoxIndex w) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
    };
    axis_neighbors(0, a, nb);
    for (auto a2 : nb) visit(grid.join(a2, b));
    if (grid.dimension() == 2) {
      axis_neighbors(1, b, nb);
      for (auto b2 : nb) visit(grid.join(a, b2));
    }
  }
  return reached == n;
}

}  // namespace chainscope
