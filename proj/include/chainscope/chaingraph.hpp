#pragma once

// The epsilon-transition digraph of an IFS over a box grid. A directed path
// in this graph decodes to a chain of box centers in which every step lands
// within epsilon (+ slack) of the image of the previous center under some map.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chainscope/ifs.hpp"
#include "chainscope/odometer.hpp"
#include "chainscope/space.hpp"

namespace chainscope {

enum class SlackKind { Strict, Fattened };

struct SlackMode {
  SlackKind kind = SlackKind::Strict;
  /// Fattened only; when empty the slack defaults to h/2 + L*h/2.
  std::optional<double> slack;

  static SlackMode strict() { return {}; }
  static SlackMode fattened(std::optional<double> slack = {}) { return {SlackKind::Fattened, slack}; }
};

std::string to_string(SlackKind k);

/// h/2 + L*h/2 with h the grid diameter and L the family's Lipschitz bound.
double default_slack(const IFSystem& sys, const BoxGrid& grid);

/// Smallest resolution with box width <= eps / factor along an axis of the given extent.
std::size_t resolution_for(double extent, double eps, double factor = 4.0);

/// A grid on `space` whose box widths satisfy h <= eps / factor on every axis.
BoxGrid grid_for(const SpaceKind& space, double eps, double factor = 4.0);

struct GraphEdge {
  BoxIndex src = 0;
  BoxIndex dst = 0;
  std::vector<Symbol> labels;
};

class ChainGraph {
 public:
  using Geometry = std::variant<std::monostate, BoxGrid, Odometer>;

  ChainGraph() = default;

  /// An abstract graph; edges may come in any order, duplicate (src, dst)
  /// pairs have their label sets merged.
  static ChainGraph from_edges(std::size_t node_count, std::vector<GraphEdge> edges, std::size_t symbol_count = 1);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return targets_.size(); }
  std::size_t symbol_count() const { return symbol_count_; }

  std::size_t edge_begin(BoxIndex v) const { return offsets_[v]; }
  std::size_t edge_end(BoxIndex v) const { return offsets_[v + 1]; }
  BoxIndex target(std::size_t e) const { return targets_[e]; }
  std::span<const BoxIndex> successors(BoxIndex v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const Symbol> labels(std::size_t e) const {
    return {labels_.data() + label_offsets_[e], label_offsets_[e + 1] - label_offsets_[e]};
  }
  std::optional<std::size_t> find_edge(BoxIndex u, BoxIndex v) const;
  bool has_edge(BoxIndex u, BoxIndex v) const { return find_edge(u, v).has_value(); }

  /// All edges in (src, dst) order.
  std::vector<GraphEdge> edges() const;

  double epsilon() const { return epsilon_; }
  double slack() const { return slack_; }
  /// The admission radius: epsilon + slack.
  double radius() const { return epsilon_ + slack_; }
  SlackKind mode() const { return mode_; }

  const Geometry& geometry() const { return geometry_; }
  const BoxGrid* grid() const { return std::get_if<BoxGrid>(&geometry_); }

  /// `b<i>@<center>` for grid graphs, `b<i>@<digits>` for odometer graphs.
  std::string node_label(BoxIndex v) const;

  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Subgraph on `nodes` (renumbered in the given order) keeping internal edges.
  ChainGraph induced(std::span<const BoxIndex> nodes) const;

 private:
  friend ChainGraph build(const IFSystem&, const BoxGrid&, double, SlackMode, std::size_t);
  friend ChainGraph build(const OdoIFS&, double, std::size_t);
  friend ChainGraph tensor_product(const ChainGraph&, const ChainGraph&, std::size_t);

  void assign(std::size_t node_count, std::vector<GraphEdge> edges);

  std::vector<std::size_t> offsets_;
  std::vector<BoxIndex> targets_;
  std::vector<std::size_t> label_offsets_;
  std::vector<Symbol> labels_;
  std::size_t symbol_count_ = 1;
  double epsilon_ = 0.0;
  double slack_ = 0.0;
  SlackKind mode_ = SlackKind::Strict;
  Geometry geometry_;
  std::vector<std::string> warnings_;
};

/// Edge i -> j iff dist(f_l(center(i)), center(j)) < eps + slack for some l.
/// `threads` > 1 splits the source boxes across workers; the result does not
/// depend on the thread count.
ChainGraph build(const IFSystem& sys, const BoxGrid& grid, double eps, SlackMode mode = {}, std::size_t threads = 1);

/// Edge x -> y iff d_alpha(g_alpha^power(x), y) < eps; every point is its own box.
ChainGraph build(const OdoIFS& sys, double eps, std::size_t power = 1);

inline constexpr std::size_t kDefaultProductNodeCap = 1000000;

/// Graph of the product system read off the factor graphs: (i,i') -> (j,j')
/// iff i -> j and i' -> j'. Exact for the max metric in Strict mode.
ChainGraph tensor_product(const ChainGraph& f, const ChainGraph& g, std::size_t node_cap = kDefaultProductNodeCap);

/// Center sequence of a path, with delta = epsilon + slack.
PseudoOrbit path_to_chain(const ChainGraph& g, std::span<const BoxIndex> path);

/// Lowest realizing symbol of each path edge.
Word path_word(const ChainGraph& g, std::span<const BoxIndex> path);

void write_dot(const ChainGraph& g, std::ostream& os);
void write_csv(const ChainGraph& g, std::ostream& os);

}  // namespace chainscope
