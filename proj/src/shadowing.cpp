#include "chainscope/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "chainscope/chaingraph.hpp"
#include "chainscope/error.hpp"

namespace chainscope {

namespace {

struct Transition {
  BoxIndex from;
  Symbol symbol;
  BoxIndex to;
};

bool contains_sorted(const std::vector<BoxIndex>& v, BoxIndex x) { return std::binary_search(v.begin(), v.end(), x); }

}  // namespace

ShadowResult shadow_search(const IFSystem& sys, const BoxGrid& grid, const ShadowQuery& q, std::size_t frontier_cap) {
  if (!(q.epsilon > 0.0)) throw DomainError("shadow_search needs epsilon > 0");
  if (q.chain.points.size() < 2) throw DomainError("shadow_search needs a chain with at least two points");
  if (!(sys.space() == grid.space())) throw DomainError("grid space does not match the system space");
  const auto& space = sys.space();
  std::vector<Point> xs;
  for (const auto& p : q.chain.points) {
    Point r = space.reduce(p);
    if (!space.contains(r)) throw DomainError("chain point " + to_string(p) + " outside the space");
    xs.push_back(r);
  }
  const std::size_t steps = xs.size() - 1;

  std::vector<std::vector<BoxIndex>> layers;
  std::vector<std::vector<Transition>> moves;
  layers.push_back(grid.closed_ball(xs[0], q.epsilon));

  ShadowResult result;
  if (layers[0].empty()) return result;
  for (std::size_t i = 0; i < steps; ++i) {
    const auto& cur = layers[i];
    if (cur.size() * sys.symbol_count() > frontier_cap)
      throw ResourceError("shadow search frontier exceeds the cap at depth " + std::to_string(i));
    std::vector<Transition> step;
    std::vector<BoxIndex> next;
    for (auto b : cur) {
      const Point c = grid.center(b);
      for (Symbol s = 0; s < sys.symbol_count(); ++s) {
        const BoxIndex to = grid.locate(sys.maps()[s].evaluate(space, c));
        if (dist(space, grid.center(to), xs[i + 1]) <= q.epsilon) {
          step.push_back({b, s, to});
          next.push_back(to);
        }
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.empty()) {
      result.depth_reached = i + 1;
      return result;
    }
    layers.push_back(std::move(next));
    moves.push_back(std::move(step));
  }
  result.depth_reached = steps + 1;

  // boxes at each step that can still reach the end
  std::vector<std::vector<BoxIndex>> good(steps + 1);
  good[steps] = layers[steps];
  for (std::size_t i = steps; i-- > 0;) {
    for (const auto& t : moves[i])
      if (contains_sorted(good[i + 1], t.to)) good[i].push_back(t.from);
    std::sort(good[i].begin(), good[i].end());
    good[i].erase(std::unique(good[i].begin(), good[i].end()), good[i].end());
  }

  // greedy least word; among boxes on it keep the least start box
  std::map<BoxIndex, BoxIndex> origin;  // box -> least start box reaching it
  for (auto b : good[0]) origin[b] = b;
  std::vector<std::map<BoxIndex, BoxIndex>> pred(steps);
  Word word;
  for (std::size_t i = 0; i < steps; ++i) {
    Symbol best = std::numeric_limits<Symbol>::max();
    for (const auto& t : moves[i])
      if (origin.count(t.from) && contains_sorted(good[i + 1], t.to)) best = std::min(best, t.symbol);
    std::map<BoxIndex, BoxIndex> next;
    for (const auto& t : moves[i]) {
      if (t.symbol != best || !origin.count(t.from) || !contains_sorted(good[i + 1], t.to)) continue;
      const BoxIndex o = origin[t.from];
      auto it = next.find(t.to);
      if (it == next.end() || o < it->second) {
        next[t.to] = o;
        pred[i][t.to] = t.from;
      }
    }
    word.push_back(best);
    origin = std::move(next);
  }
  auto last = std::min_element(origin.begin(), origin.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  std::vector<BoxIndex> path(steps + 1);
  path[steps] = last->first;
  for (std::size_t i = steps; i-- > 0;) path[i] = pred[i].at(path[i + 1]);

  result.found = true;
  result.word = word;
  result.start_box = path[0];
  result.box_path = path;
  const auto replay = orbit(sys, word, grid.center(path[0]));
  double worst = 0.0;
  for (std::size_t i = 0; i < replay.size(); ++i) worst = std::max(worst, dist(space, replay[i], xs[i]));
  result.exact_replay_deviation = worst;
  return result;
}

// ---------------------------------------------------------------------------

namespace {

double axis_shift(const SpaceKind& s, double x, double shift) {
  if (const auto* iv = std::get_if<Interval>(&s.kind())) return std::clamp(x + shift, iv->lo, iv->hi);
  return reduce_circle(x + shift);
}

Point shifted(const SpaceKind& space, Point p, double s0, double s1) {
  if (space.is_product()) {
    p[0] = axis_shift(space.left(), p[0], s0);
    p[1] = axis_shift(space.right(), p[1], s1);
    return p;
  }
  p[0] = axis_shift(space, p[0], s0);
  return p;
}

double axis_lo(const SpaceKind& s) {
  if (const auto* iv = std::get_if<Interval>(&s.kind())) return iv->lo;
  return 0.0;
}

const SpaceKind& axis_of(const SpaceKind& space, std::size_t axis) {
  if (space.is_product()) return axis == 0 ? space.left() : space.right();
  return space;
}

}  // namespace

PseudoOrbit random_chain(const IFSystem& sys, std::size_t steps, double delta, std::uint64_t seed) {
  const auto& space = sys.space();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_int_distribution<Symbol> pick(0, static_cast<Symbol>(sys.symbol_count() - 1));
  Point x;
  x.dim = space.dimension();
  for (std::size_t a = 0; a < x.dim; ++a) {
    const auto& s = axis_of(space, a);
    x[a] = s.is_circle() ? reduce_circle(unit(rng)) : axis_lo(s) + s.extent(0) * unit(rng);
  }
  PseudoOrbit chain;
  chain.delta = delta;
  chain.points.push_back(x);
  // keep perturbations strictly below delta
  const double size = delta * 0.999;
  for (std::size_t i = 0; i < steps; ++i) {
    const Symbol s = pick(rng);
    const double u0 = sym(rng) * size;
    const double u1 = sym(rng) * size;
    x = shifted(space, sys.maps()[s].evaluate(space, x), u0, u1);
    chain.points.push_back(x);
  }
  return chain;
}

PseudoOrbit drift_chain(const IFSystem& sys, const Point& x0, std::size_t steps, double shift) {
  const auto& space = sys.space();
  PseudoOrbit chain;
  chain.delta = std::fabs(shift);
  Point x = space.reduce(x0);
  chain.points.push_back(x);
  for (std::size_t i = 0; i < steps; ++i) {
    const auto s = static_cast<Symbol>(i % sys.symbol_count());
    x = shifted(space, sys.maps()[s].evaluate(space, x), shift, shift);
    chain.points.push_back(x);
  }
  return chain;
}

SpotCheckReport shadowing_spot_check(const IFSystem& sys, const BoxGrid& grid, double epsilon,
                                     const SpotCheckOptions& options) {
  if (!(epsilon > 0.0)) throw DomainError("spot check needs epsilon > 0");
  SpotCheckReport report;
  report.epsilon = epsilon;
  report.delta = options.delta > 0.0 ? options.delta : epsilon / 10.0;
  const double delta = report.delta;

  auto try_chain = [&](const PseudoOrbit& chain, const char* kind) {
    ShadowQuery q{chain, epsilon, delta};
    const bool ok = shadow_search(sys, grid, q).found;
    if (!ok && !report.failing_chain) {
      report.failing_chain = chain;
      report.failing_kind = kind;
    }
    return ok;
  };

  // A drift of delta/2 per step outruns the h/2 rounding of box-center
  // replays once delta > h, and separates from every isometric orbit after
  // enough steps to accumulate 2*epsilon of relative drift.
  const double h = grid.diameter();
  const double per_step = delta > h ? (delta - h) / 2.0 : delta / 2.0;
  const auto probe_steps = static_cast<std::size_t>(std::ceil(2.0 * epsilon / per_step)) + 1;
  for (std::size_t k = 0; k < options.drift_probes; ++k) {
    const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(options.drift_probes);
    Point x0;
    x0.dim = sys.space().dimension();
    for (std::size_t a = 0; a < x0.dim; ++a) {
      const auto& s = axis_of(sys.space(), a);
      x0[a] = axis_lo(s) + s.extent(0) * t;
    }
    ++report.drift_total;
    if (try_chain(drift_chain(sys, x0, probe_steps, delta / 2.0), "drift")) ++report.drift_shadowed;
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> length(1, std::max<std::size_t>(1, options.max_length));
  for (std::size_t k = 0; k < options.chains; ++k) {
    const std::size_t steps = length(rng);
    const std::uint64_t chain_seed = rng();
    ++report.random_total;
    if (try_chain(random_chain(sys, steps, delta, chain_seed), "random")) ++report.random_shadowed;
  }

  report.passed = report.random_shadowed == report.random_total && report.drift_shadowed == report.drift_total;
  return report;
}

// ---------------------------------------------------------------------------

std::vector<BoxIndex> boxes_in(const BoxGrid& grid, double lo, double hi) {
  if (grid.dimension() != 1) throw DomainError("boxes_in(lo, hi) needs a one-dimensional grid");
  std::vector<BoxIndex> out;
  for (BoxIndex b = 0; b < grid.size(); ++b) {
    const double c = grid.center(b)[0];
    if (c >= lo && c <= hi) out.push_back(b);
  }
  return out;
}

std::vector<BoxIndex> boxes_in(const BoxGrid& grid, double lo0, double hi0, double lo1, double hi1) {
  if (grid.dimension() != 2) throw DomainError("boxes_in(rectangle) needs a two-dimensional grid");
  std::vector<BoxIndex> out;
  for (BoxIndex b = 0; b < grid.size(); ++b) {
    const Point c = grid.center(b);
    if (c[0] >= lo0 && c[0] <= hi0 && c[1] >= lo1 && c[1] <= hi1) out.push_back(b);
  }
  return out;
}

namespace {

// One pass of the forward search with one exact representative per cell of
// `fine`, a refinement of `grid`; start points are the fine-cell centers
// that fall in U.
std::optional<TransferWitness> witness_on(const IFSystem& sys, const BoxGrid& grid, const BoxGrid& fine,
                                          const std::vector<BoxIndex>& from, const std::vector<BoxIndex>& to,
                                          std::size_t length) {
  const auto& space = sys.space();
  struct Node {
    Point point;
    BoxIndex cell;
    std::size_t parent;  // index into the previous layer
    Symbol symbol;
  };
  std::vector<std::vector<Node>> layers(1);
  for (BoxIndex c = 0; c < fine.size(); ++c) {
    const Point p = fine.center(c);
    if (contains_sorted(from, grid.locate(p))) layers[0].push_back({p, c, 0, 0});
  }
  if (layers[0].empty()) return std::nullopt;

  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> slot(fine.size(), none);
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<Node> next;
    // deterministic: sources in cell order, then symbols in order
    for (std::size_t k = 0; k < layers[i].size(); ++k) {
      const Node& n = layers[i][k];
      for (Symbol s = 0; s < sys.symbol_count(); ++s) {
        const Point y = sys.maps()[s].evaluate(space, n.point);
        const BoxIndex c = fine.locate(y);
        if (slot[c] != none) continue;
        slot[c] = next.size();
        next.push_back({y, c, k, s});
      }
    }
    for (const auto& n : next) slot[n.cell] = none;
    std::sort(next.begin(), next.end(), [](const Node& x, const Node& y) { return x.cell < y.cell; });
    // parents stay valid: they index the previous layer, which is not reordered
    layers.push_back(std::move(next));
  }

  std::optional<std::size_t> hit;
  BoxIndex hit_box = 0;
  for (std::size_t k = 0; k < layers[length].size(); ++k) {
    const BoxIndex b = grid.locate(layers[length][k].point);
    if (contains_sorted(to, b) && (!hit || b < hit_box)) {
      hit = k;
      hit_box = b;
    }
  }
  if (!hit) return std::nullopt;

  TransferWitness w;
  w.length = length;
  w.found = true;
  w.end_box = hit_box;
  w.word.resize(length);
  std::size_t k = *hit;
  for (std::size_t i = length; i > 0; --i) {
    w.word[i - 1] = layers[i][k].symbol;
    k = layers[i][k].parent;
  }
  w.start = layers[0][k].point;
  w.start_box = grid.locate(w.start);
  if (grid.locate(apply_word(sys, w.word, w.start)) != hit_box) return std::nullopt;
  return w;
}

}  // namespace

std::optional<TransferWitness> forward_image_witness(const IFSystem& sys, const BoxGrid& grid, const BoxSetPair& pair,
                                                     std::size_t length, std::size_t max_cells) {
  std::vector<BoxIndex> from = pair.from, to = pair.to;
  std::sort(from.begin(), from.end());
  from.erase(std::unique(from.begin(), from.end()), from.end());
  std::sort(to.begin(), to.end());
  if (from.empty() || to.empty()) return std::nullopt;
  // box centers first; expanding maps thin out one representative per box,
  // so retry on finer cells
  for (std::size_t sub = 1;; sub *= 2) {
    std::vector<std::size_t> res = grid.resolution();
    std::size_t cells = 1;
    for (auto& r : res) {
      r *= sub;
      cells *= r;
    }
    if (sub > 1 && cells > max_cells) return std::nullopt;
    if (auto w = witness_on(sys, grid, BoxGrid(sys.space(), res), from, to, length)) {
      w->refinement = sub;
      return w;
    }
    if (cells > max_cells / 2) return std::nullopt;
  }
}

TransferReport mixing_transfer_check(const IFSystem& sys, const BoxGrid& grid, double epsilon,
                                     const std::vector<BoxSetPair>& pairs, const TransferOptions& options) {
  TransferReport report;
  report.spot = shadowing_spot_check(sys, grid, epsilon, options.spot);
  if (!report.spot.passed) {
    report.refused = true;
    report.refusal = "shadowing spot-check failed on a " + report.spot.failing_kind + " chain with " +
                     std::to_string(report.spot.failing_chain->points.size()) + " points";
    return report;
  }
  AnalyzeOptions ao;
  ao.mixing_node_cap = options.mixing_node_cap;
  const ChainGraph g = build(sys, grid, epsilon, options.mode, options.threads);
  const ChainAnalysis a = analyze(g, ao);
  if (!a.mixing) {
    report.refused = true;
    report.refusal = "no chain-mixing certificate at this grid and epsilon";
    return report;
  }
  report.N = a.mixing->N;
  std::size_t total = 0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t n = *report.N + 1; n <= *report.N + options.window; ++n) {
      ++total;
      auto w = forward_image_witness(sys, grid, pairs[p], n);
      TransferWitness entry = w.value_or(TransferWitness{});
      entry.pair = p;
      entry.length = n;
      if (entry.found) ++report.found;
      report.witnesses.push_back(std::move(entry));
    }
  }
  report.success_rate = total ? static_cast<double>(report.found) / static_cast<double>(total) : 1.0;
  return report;
}

}  // namespace chainscope
