#include "chainscope/odometer.hpp"

#include <limits>
#include <sstream>

#include "chainscope/error.hpp"
#include "chainscope/ifs.hpp"

namespace chainscope {

Odometer::Odometer(std::vector<std::uint32_t> alpha, std::size_t depth, std::optional<std::uint32_t> tail)
    : alpha_(std::move(alpha)), tail_(tail) {
  if (alpha_.size() > depth) alpha_.resize(depth);
  if (alpha_.size() < depth) {
    if (!tail_) throw DomainError("odometer alpha shorter than depth and no tail value given");
    alpha_.resize(depth, *tail_);
  }
  if (tail_ && *tail_ < 2) throw DomainError("odometer tail radix must be >= 2");
  for (auto j : alpha_) {
    if (j < 2) throw DomainError("odometer radices must be >= 2");
    if (size_ > std::numeric_limits<std::size_t>::max() / j)
      size_ = std::numeric_limits<std::size_t>::max();
    else
      size_ *= j;
  }
}

bool Odometer::valid(const DigitString& x) const {
  if (x.size() != depth()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= alpha_[i]) return false;
  return true;
}

DigitString Odometer::one() const {
  DigitString x = zero();
  if (!x.empty()) x[0] = 1;
  return x;
}

std::size_t Odometer::index_of(const DigitString& x) const {
  if (!valid(x)) throw DomainError("digit string invalid for this odometer");
  std::size_t idx = 0;
  std::size_t weight = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    idx += x[i] * weight;
    weight *= alpha_[i];
  }
  return idx;
}

DigitString Odometer::digits_of(std::size_t index) const {
  if (index >= size_) throw DomainError("odometer index out of range");
  DigitString x(depth());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<std::uint32_t>(index % alpha_[i]);
    index /= alpha_[i];
  }
  return x;
}

double d_alpha(const Odometer& o, const DigitString& x, const DigitString& y) {
  if (x.size() != o.depth() || y.size() != o.depth()) throw DomainError("d_alpha: depth mismatch");
  double sum = 0.0;
  double w = 0.5;
  for (std::size_t i = 0; i < x.size(); ++i, w *= 0.5)
    if (x[i] != y[i]) sum += w;
  return sum;
}

DigitString add(const Odometer& o, const DigitString& x, const DigitString& y) {
  if (!o.valid(x) || !o.valid(y)) throw DomainError("add: digit string invalid for this odometer");
  DigitString z(o.depth());
  std::uint32_t carry = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const std::uint64_t s = std::uint64_t{x[i]} + y[i] + carry;
    const auto j = o.alpha()[i];
    carry = s >= j ? 1 : 0;
    z[i] = static_cast<std::uint32_t>(s - (carry ? j : 0));
  }
  return z;
}

DigitString g_alpha(const Odometer& o, const DigitString& x) { return add(o, x, o.one()); }

std::string format_digits(const DigitString& x) {
  std::ostringstream os;
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  return os.str();
}

DigitString parse_digits(const std::string& text) {
  DigitString out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw DomainError("empty digit in '" + text + "'");
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      throw DomainError("bad digit '" + item + "'");
    }
    if (used != item.size()) throw DomainError("bad digit '" + item + "'");
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

// ---------------------------------------------------------------------------

OdoIFS::OdoIFS(Odometer odometer) : odometer_(std::move(odometer)) {}

DigitString OdoIFS::point(BoxIndex i) const { return odometer_.digits_of(i); }

BoxIndex OdoIFS::image(BoxIndex i) const {
  // +1 with carry on the little-endian index is +1 mod size
  return static_cast<BoxIndex>((static_cast<std::size_t>(i) + 1) % size());
}

double OdoIFS::dist(BoxIndex i, BoxIndex j) const {
  return d_alpha(odometer_, point(i), point(j));
}

std::vector<BoxIndex> OdoIFS::ball(BoxIndex center, double radius) const {
  // Strings within radius < 2^-m of each other agree in the first m digits,
  // which on the little-endian index means congruence mod j_1*...*j_m.
  std::size_t m = 0;
  double w = 0.5;
  while (m < odometer_.depth() && radius <= w) {
    ++m;
    w *= 0.5;
  }
  std::size_t stride = 1;
  for (std::size_t i = 0; i < m; ++i) stride *= odometer_.alpha()[i];
  std::vector<BoxIndex> out;
  const DigitString c = point(center);
  for (std::size_t j = center % stride; j < size(); j += stride)
    if (d_alpha(odometer_, c, odometer_.digits_of(j)) < radius) out.push_back(static_cast<BoxIndex>(j));
  return out;
}

OdoIFS as_finite_system(const Odometer& o, std::size_t point_cap) {
  if (o.size() > point_cap)
    throw ResourceError("odometer has " + std::to_string(o.size()) + " points, cap is " + std::to_string(point_cap));
  return OdoIFS(o);
}

}  // namespace chainscope
