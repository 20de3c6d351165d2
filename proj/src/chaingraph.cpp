#include "chainscope/chaingraph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include "chainscope/error.hpp"

namespace chainscope {

std::string to_string(SlackKind k) { return k == SlackKind::Strict ? "strict" : "fattened"; }

double default_slack(const IFSystem& sys, const BoxGrid& grid) {
  const double h = grid.diameter();
  return h / 2.0 + sys.lipschitz() * h / 2.0;
}

std::size_t resolution_for(double extent, double eps, double factor) {
  if (!(eps > 0.0) || !(factor > 0.0)) throw DomainError("resolution_for needs eps > 0 and factor > 0");
  const double raw = extent * factor / eps;
  // absorb representation error in eps so that e.g. 4/0.1 gives 40, not 41
  auto n = static_cast<std::size_t>(std::ceil(raw * (1.0 - 1e-12)));
  return std::max<std::size_t>(n, 1);
}

BoxGrid grid_for(const SpaceKind& space, double eps, double factor) {
  std::vector<std::size_t> res;
  for (std::size_t axis = 0; axis < space.dimension(); ++axis)
    res.push_back(resolution_for(space.extent(axis), eps, factor));
  return BoxGrid(space, std::move(res));
}

// ---------------------------------------------------------------------------

void ChainGraph::assign(std::size_t node_count, std::vector<GraphEdge> edges) {
  std::sort(edges.begin(), edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) { return a.src != b.src ? a.src < b.src : a.dst < b.dst; });
  offsets_.assign(node_count + 1, 0);
  targets_.clear();
  label_offsets_.assign(1, 0);
  labels_.clear();
  std::size_t i = 0;
  while (i < edges.size()) {
    const auto src = edges[i].src;
    const auto dst = edges[i].dst;
    if (src >= node_count || dst >= node_count) throw DomainError("edge endpoint out of range");
    std::vector<Symbol> merged;
    for (; i < edges.size() && edges[i].src == src && edges[i].dst == dst; ++i)
      merged.insert(merged.end(), edges[i].labels.begin(), edges[i].labels.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    if (merged.empty()) throw DomainError("edge without realizing symbol");
    targets_.push_back(dst);
    labels_.insert(labels_.end(), merged.begin(), merged.end());
    label_offsets_.push_back(labels_.size());
    ++offsets_[src + 1];
  }
  for (std::size_t v = 0; v < node_count; ++v) offsets_[v + 1] += offsets_[v];
}

ChainGraph ChainGraph::from_edges(std::size_t node_count, std::vector<GraphEdge> edges, std::size_t symbol_count) {
  ChainGraph g;
  g.symbol_count_ = symbol_count;
  g.assign(node_count, std::move(edges));
  return g;
}

std::optional<std::size_t> ChainGraph::find_edge(BoxIndex u, BoxIndex v) const {
  if (u >= node_count()) return std::nullopt;
  auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[u]);
  auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[u + 1]);
  auto it = std::lower_bound(first, last, v);
  if (it == last || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - targets_.begin());
}

std::vector<GraphEdge> ChainGraph::edges() const {
  std::vector<GraphEdge> out;
  out.reserve(edge_count());
  for (BoxIndex v = 0; v < node_count(); ++v)
    for (std::size_t e = edge_begin(v); e < edge_end(v); ++e) {
      auto l = labels(e);
      out.push_back({v, target(e), {l.begin(), l.end()}});
    }
  return out;
}

std::string ChainGraph::node_label(BoxIndex v) const {
  std::string s = "b" + std::to_string(v) + "@";
  if (const auto* grid = std::get_if<BoxGrid>(&geometry_)) return s + to_string(grid->center(v));
  if (const auto* odo = std::get_if<Odometer>(&geometry_)) return s + format_digits(odo->digits_of(v));
  return s + std::to_string(v);
}

ChainGraph ChainGraph::induced(std::span<const BoxIndex> nodes) const {
  std::vector<BoxIndex> local(node_count(), static_cast<BoxIndex>(-1));
  for (std::size_t k = 0; k < nodes.size(); ++k) local[nodes[k]] = static_cast<BoxIndex>(k);
  std::vector<GraphEdge> kept;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const BoxIndex v = nodes[k];
    for (std::size_t e = edge_begin(v); e < edge_end(v); ++e) {
      const BoxIndex w = local[target(e)];
      if (w == static_cast<BoxIndex>(-1)) continue;
      auto l = labels(e);
      kept.push_back({static_cast<BoxIndex>(k), w, {l.begin(), l.end()}});
    }
  }
  ChainGraph g = from_edges(nodes.size(), std::move(kept), symbol_count_);
  g.epsilon_ = epsilon_;
  g.slack_ = slack_;
  g.mode_ = mode_;
  return g;
}

// ---------------------------------------------------------------------------

namespace {

template <typename PerSource>
std::vector<GraphEdge> collect_parallel(std::size_t n, std::size_t threads, PerSource per_source) {
  threads = std::max<std::size_t>(1, std::min(threads, n == 0 ? 1 : n));
  std::vector<std::vector<GraphEdge>> chunks(threads);
  auto work = [&](std::size_t t) {
    const std::size_t begin = n * t / threads;
    const std::size_t end = n * (t + 1) / threads;
    for (std::size_t v = begin; v < end; ++v) per_source(static_cast<BoxIndex>(v), chunks[t]);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  std::vector<GraphEdge> all;
  for (auto& c : chunks) {
    all.insert(all.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
  }
  return all;
}

}  // namespace

ChainGraph build(const IFSystem& sys, const BoxGrid& grid, double eps, SlackMode mode, std::size_t threads) {
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
  if (!(sys.space() == grid.space())) throw DomainError("grid space does not match the system space");
  double slack = 0.0;
  if (mode.kind == SlackKind::Fattened) {
    slack = mode.slack.value_or(default_slack(sys, grid));
    if (!(slack >= 0.0)) throw DomainError("slack must be nonnegative");
  }
  const double radius = eps + slack;
  const auto& space = sys.space();

  auto edges = collect_parallel(grid.size(), threads, [&](BoxIndex i, std::vector<GraphEdge>& out) {
    const Point c = grid.center(i);
    std::vector<std::pair<BoxIndex, Symbol>> hits;
    for (Symbol s = 0; s < sys.symbol_count(); ++s) {
      const Point y = sys.maps()[s].evaluate(space, c);
      for (auto j : grid.ball(y, radius)) hits.emplace_back(j, s);
    }
    std::sort(hits.begin(), hits.end());
    for (std::size_t k = 0; k < hits.size();) {
      GraphEdge e{i, hits[k].first, {}};
      for (; k < hits.size() && hits[k].first == e.dst; ++k) e.labels.push_back(hits[k].second);
      out.push_back(std::move(e));
    }
  });

  ChainGraph g;
  g.symbol_count_ = sys.symbol_count();
  g.epsilon_ = eps;
  g.slack_ = slack;
  g.mode_ = mode.kind;
  g.geometry_ = grid;
  g.assign(grid.size(), std::move(edges));
  if (mode.kind == SlackKind::Strict && eps < grid.diameter()) {
    std::ostringstream os;
    os.precision(17);
    os << "epsilon " << eps << " is below the box width " << grid.diameter()
       << "; the graph may be edge-free and conclusions vacuous";
    g.warnings_.push_back(os.str());
  }
  if (g.edge_count() == 0) g.warnings_.push_back("graph has no edges");
  return g;
}

ChainGraph build(const OdoIFS& sys, double eps, std::size_t power) {
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
  std::vector<GraphEdge> edges;
  for (BoxIndex i = 0; i < sys.size(); ++i) {
    BoxIndex y = i;
    for (std::size_t p = 0; p < power % sys.size(); ++p) y = sys.image(y);
    for (auto j : sys.ball(y, eps)) edges.push_back({i, j, {0}});
  }
  ChainGraph g;
  g.symbol_count_ = 1;
  g.epsilon_ = eps;
  g.geometry_ = sys.odometer();
  g.assign(sys.size(), std::move(edges));
  if (g.edge_count() == 0) g.warnings_.push_back("graph has no edges");
  return g;
}

ChainGraph tensor_product(const ChainGraph& f, const ChainGraph& g, std::size_t node_cap) {
  const std::size_t nf = f.node_count();
  const std::size_t ng = g.node_count();
  if (ng != 0 && nf > node_cap / ng)
    throw ResourceError("product graph would have " + std::to_string(nf * ng) + " nodes, cap is " +
                        std::to_string(node_cap));
  const std::size_t sg = g.symbol_count();
  ChainGraph p;
  // Sources in (i, i') order with both factor adjacency lists sorted give
  // targets already sorted, so the CSR arrays are filled directly.
  p.offsets_.assign(nf * ng + 1, 0);
  p.label_offsets_.assign(1, 0);
  p.targets_.reserve(f.edge_count() * g.edge_count());
  for (BoxIndex i = 0; i < nf; ++i)
    for (BoxIndex i2 = 0; i2 < ng; ++i2) {
      for (std::size_t e = f.edge_begin(i); e < f.edge_end(i); ++e)
        for (std::size_t e2 = g.edge_begin(i2); e2 < g.edge_end(i2); ++e2) {
          p.targets_.push_back(static_cast<BoxIndex>(f.target(e) * ng + g.target(e2)));
          for (auto a : f.labels(e))
            for (auto b : g.labels(e2)) p.labels_.push_back(static_cast<Symbol>(a * sg + b));
          p.label_offsets_.push_back(p.labels_.size());
        }
      p.offsets_[i * ng + i2 + 1] = p.targets_.size();
    }
  p.symbol_count_ = f.symbol_count() * sg;
  p.epsilon_ = std::max(f.epsilon(), g.epsilon());
  p.slack_ = std::max(f.slack(), g.slack());
  p.mode_ = f.mode();
  const auto* gf = f.grid();
  const auto* gg = g.grid();
  if (gf && gg && gf->dimension() == 1 && gg->dimension() == 1)
    p.geometry_ = BoxGrid(SpaceKind::product(gf->space(), gg->space()), {gf->size(), gg->size()});
  p.warnings_ = f.warnings();
  p.warnings_.insert(p.warnings_.end(), g.warnings().begin(), g.warnings().end());
  return p;
}

PseudoOrbit path_to_chain(const ChainGraph& g, std::span<const BoxIndex> path) {
  const auto* grid = g.grid();
  if (!grid) throw DomainError("path_to_chain needs a grid graph");
  PseudoOrbit chain;
  chain.delta = g.radius();
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path[k] >= g.node_count()) throw DomainError("path node out of range");
    if (k > 0 && !g.has_edge(path[k - 1], path[k]))
      throw DomainError("path step " + std::to_string(path[k - 1]) + " -> " + std::to_string(path[k]) +
                        " is not an edge");
    chain.points.push_back(grid->center(path[k]));
  }
  return chain;
}

Word path_word(const ChainGraph& g, std::span<const BoxIndex> path) {
  Word w;
  for (std::size_t k = 1; k < path.size(); ++k) {
    auto e = g.find_edge(path[k - 1], path[k]);
    if (!e) throw DomainError("path step is not an edge");
    w.push_back(g.labels(*e).front());
  }
  return w;
}

namespace {

std::string symbol_set(std::span<const Symbol> labels, char sep) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(labels[i]);
  }
  return s;
}

}  // namespace

void write_dot(const ChainGraph& g, std::ostream& os) {
  os << "digraph chaingraph {\n";
  std::ostringstream params;
  params.precision(17);
  params << "  // epsilon=" << g.epsilon() << " slack=" << g.slack() << " mode=" << to_string(g.mode())
         << " nodes=" << g.node_count() << " edges=" << g.edge_count() << "\n";
  os << params.str();
  for (const auto& w : g.warnings()) os << "  // warning: " << w << "\n";
  for (BoxIndex v = 0; v < g.node_count(); ++v) os << "  " << v << " [label=\"" << g.node_label(v) << "\"];\n";
  for (BoxIndex v = 0; v < g.node_count(); ++v)
    for (std::size_t e = g.edge_begin(v); e < g.edge_end(v); ++e)
      os << "  " << v << " -> " << g.target(e) << " [label=\"{" << symbol_set(g.labels(e), ',') << "}\"];\n";
  os << "}\n";
}

void write_csv(const ChainGraph& g, std::ostream& os) {
  os << "src,dst,symbols\n";
  for (BoxIndex v = 0; v < g.node_count(); ++v)
    for (std::size_t e = g.edge_begin(v); e < g.edge_end(v); ++e)
      os << v << "," << g.target(e) << "," << symbol_set(g.labels(e), ';') << "\n";
}

}  // namespace chainscope
