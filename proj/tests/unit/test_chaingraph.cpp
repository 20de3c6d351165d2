#include <set>
#include <sstream>

#include "chainscope/chaingraph.hpp"
#include "chainscope/error.hpp"
#include "doctest.h"

using namespace chainscope;

namespace {

const SpaceKind unit = SpaceKind::interval(0, 1);
const SpaceKind circle = SpaceKind::circle();

IFSystem tent_pair() {
  return IFSystem(unit, {MapSpec::piecewise_linear({{0, 0}, {0.5, 1}, {1, 1}}),
                         MapSpec::piecewise_linear({{0, 1}, {0.5, 1}, {1, 0}})});
}

// every (i, j, l) with dist(f_l(c_i), c_j) < radius
std::set<std::tuple<BoxIndex, BoxIndex, Symbol>> brute_edges(const IFSystem& sys, const BoxGrid& g, double radius) {
  std::set<std::tuple<BoxIndex, BoxIndex, Symbol>> out;
  for (BoxIndex i = 0; i < g.size(); ++i)
    for (Symbol l = 0; l < sys.symbol_count(); ++l) {
      const Point y = sys.maps()[l].evaluate(sys.space(), g.center(i));
      for (BoxIndex j = 0; j < g.size(); ++j)
        if (dist(sys.space(), y, g.center(j)) < radius) out.insert({i, j, l});
    }
  return out;
}

std::set<std::tuple<BoxIndex, BoxIndex, Symbol>> graph_edges(const ChainGraph& g) {
  std::set<std::tuple<BoxIndex, BoxIndex, Symbol>> out;
  for (BoxIndex u = 0; u < g.node_count(); ++u)
    for (std::size_t e = g.edge_begin(u); e < g.edge_end(u); ++e)
      for (auto l : g.labels(e)) out.insert({u, g.target(e), l});
  return out;
}

}  // namespace

TEST_CASE("quarter rotation on four boxes") {
  IFSystem rot(circle, {MapSpec::rotation(0.25)});
  BoxGrid g(circle, 4);
  auto G = build(rot, g, 0.1);
  CHECK(G.node_count() == 4);
  CHECK(G.edge_count() == 4);
  for (BoxIndex i = 0; i < 4; ++i) {
    REQUIRE(G.successors(i).size() == 1);
    CHECK(G.successors(i)[0] == (i + 1) % 4);
  }
  auto wide = build(rot, g, 0.3);
  CHECK(graph_edges(wide) == brute_edges(rot, g, 0.3));
  for (BoxIndex i = 0; i < 4; ++i) {
    std::set<BoxIndex> succ(wide.successors(i).begin(), wide.successors(i).end());
    CHECK(succ == std::set<BoxIndex>{i, (i + 1) % 4, (i + 2) % 4});
  }
}

TEST_CASE("tent pair edge via the first map") {
  BoxGrid g(unit, 8);
  auto G = build(tent_pair(), g, 0.2);
  auto e = G.find_edge(6, 7);
  REQUIRE(e);
  auto labels = G.labels(*e);
  CHECK(std::find(labels.begin(), labels.end(), Symbol{0}) != labels.end());
}

TEST_CASE("build matches brute force in both modes and any thread count") {
  struct Case {
    IFSystem sys;
    BoxGrid grid;
    double eps;
  };
  std::vector<Case> cases = {
      {tent_pair(), BoxGrid(unit, 37), 0.07},
      {IFSystem(circle, {MapSpec::rotation(0.25), MapSpec::rotation(0.6319660113)}), BoxGrid(circle, 50), 0.05},
      {IFSystem(SpaceKind::product(circle, unit),
                {MapSpec::product(MapSpec::rotation(0.3), MapSpec::affine(0.5, 0.25)),
                 MapSpec::product(MapSpec::rotation(0.7), MapSpec::piecewise_linear({{0, 0}, {0.5, 1}, {1, 0}}))}),
       BoxGrid(SpaceKind::product(circle, unit), {9, 11}), 0.15},
  };
  for (const auto& c : cases) {
    auto strict = build(c.sys, c.grid, c.eps);
    CHECK(graph_edges(strict) == brute_edges(c.sys, c.grid, c.eps));
    CHECK(strict.slack() == 0.0);
    auto fat = build(c.sys, c.grid, c.eps, SlackMode::fattened(), 3);
    CHECK(fat.slack() == doctest::Approx(default_slack(c.sys, c.grid)));
    CHECK(graph_edges(fat) == brute_edges(c.sys, c.grid, c.eps + fat.slack()));
    auto threaded = build(c.sys, c.grid, c.eps, SlackMode::strict(), 4);
    CHECK(threaded.edges().size() == strict.edges().size());
    CHECK(graph_edges(threaded) == graph_edges(strict));
  }
}

TEST_CASE("fattened slack default") {
  BoxGrid g(unit, 64);
  CHECK(default_slack(tent_pair(), g) == doctest::Approx(1.0 / 128 + 2.0 / 128));
  CHECK(build(tent_pair(), g, 0.05, SlackMode::fattened(0.01)).slack() == 0.01);
}

TEST_CASE("edge-free graphs warn") {
  IFSystem rot(circle, {MapSpec::rotation(0.1)});
  BoxGrid g(circle, 4);
  auto G = build(rot, g, 0.01);
  CHECK(G.edge_count() == 0);
  CHECK_FALSE(G.warnings().empty());
  std::ostringstream dot;
  write_dot(G, dot);
  CHECK(dot.str().find("// warning") != std::string::npos);
  CHECK(dot.str().find("->") == std::string::npos);
  CHECK_THROWS_AS(build(rot, g, 0.0), DomainError);
}

TEST_CASE("resolution rule") {
  CHECK(resolution_for(1.0, 0.05) == 80);
  CHECK(resolution_for(1.0, 0.1) == 40);
  CHECK(resolution_for(2.0, 0.1) == 80);
  for (double eps : {0.3, 0.1, 0.07, 0.013}) {
    auto g = grid_for(unit, eps);
    CHECK(g.width(0) <= eps / 4 + 1e-15);
    CHECK(BoxGrid(unit, g.resolution()[0] - 1).width(0) > eps / 4);
  }
}

TEST_CASE("paths decode to chains") {
  IFSystem rot(circle, {MapSpec::rotation(0.25)});
  BoxGrid g(circle, 4);
  auto G = build(rot, g, 0.1);
  std::vector<BoxIndex> path{0, 1, 2};
  auto chain = path_to_chain(G, path);
  REQUIRE(chain.points.size() == 3);
  CHECK(chain.points[0][0] == 0.125);
  CHECK(chain.points[2][0] == 0.625);
  CHECK(validate_chain(rot, chain, 0.1).valid);
  CHECK(path_word(G, path) == Word{0, 0});
  std::vector<BoxIndex> single{3};
  CHECK(validate_chain(rot, path_to_chain(G, single), 0.1).valid);

  auto T = build(tent_pair(), BoxGrid(unit, 16), 0.1);
  for (const auto& e : T.edges()) {
    std::vector<BoxIndex> p{e.src, e.dst};
    REQUIRE(validate_chain(tent_pair(), path_to_chain(T, p), T.radius()).valid);
  }
  std::vector<BoxIndex> broken{0, 3};
  CHECK_THROWS_AS(path_to_chain(G, broken), DomainError);
}

TEST_CASE("from_edges merges duplicates") {
  auto G = ChainGraph::from_edges(3, {{0, 1, {1}}, {0, 1, {0}}, {2, 0, {0}}, {1, 2, {0}}}, 2);
  CHECK(G.edge_count() == 3);
  auto e = G.find_edge(0, 1);
  REQUIRE(e);
  CHECK(std::vector<Symbol>(G.labels(*e).begin(), G.labels(*e).end()) == std::vector<Symbol>{0, 1});
  CHECK_THROWS_AS(ChainGraph::from_edges(2, {{0, 5, {0}}}), DomainError);
}

TEST_CASE("tensor product equals the graph of the product system in strict mode") {
  auto F = tent_pair();
  BoxGrid g(unit, 12);
  auto G = build(F, g, 0.12);
  auto P = tensor_product(G, G);
  CHECK(P.node_count() == 144);
  auto direct = build(product_system(F, F), BoxGrid(SpaceKind::product(unit, unit), {12, 12}), 0.12);
  REQUIRE(direct.edge_count() == P.edge_count());
  for (BoxIndex u = 0; u < P.node_count(); ++u) {
    auto a = P.successors(u);
    auto b = direct.successors(u);
    REQUIRE(std::vector<BoxIndex>(a.begin(), a.end()) == std::vector<BoxIndex>(b.begin(), b.end()));
  }
  CHECK_THROWS_AS(tensor_product(G, G, 100), ResourceError);
}

TEST_CASE("odometer graphs") {
  OdoIFS four = as_finite_system(Odometer({2, 2}, 2));
  auto G = build(four, 0.2);
  CHECK(G.edge_count() == 4);
  for (BoxIndex i = 0; i < 4; ++i) CHECK(G.has_edge(i, (i + 1) % 4));
  CHECK(G.node_label(1) == "b1@1,0");
}

TEST_CASE("DOT and CSV exports agree and are stable") {
  auto G = build(tent_pair(), BoxGrid(unit, 8), 0.2);
  std::ostringstream dot1, dot2, csv;
  write_dot(G, dot1);
  write_dot(build(tent_pair(), BoxGrid(unit, 8), 0.2, SlackMode::strict(), 2), dot2);
  CHECK(dot1.str() == dot2.str());
  write_csv(G, csv);
  std::istringstream rows(csv.str());
  std::string line;
  std::getline(rows, line);
  CHECK(line == "src,dst,symbols");
  std::size_t count = 0;
  while (std::getline(rows, line)) ++count;
  CHECK(count == G.edge_count());
  std::size_t arrows = 0;
  for (std::size_t pos = 0; (pos = dot1.str().find("->", pos)) != std::string::npos; ++pos) ++arrows;
  CHECK(arrows == G.edge_count());
  CHECK(dot1.str().rfind("digraph", 0) == 0);
  CHECK(dot1.str().find("b0@0.0625") != std::string::npos);

  IFSystem rot(circle, {MapSpec::rotation(0.25)});
  auto R = build(rot, BoxGrid(circle, 4), 0.1);
  std::ostringstream rdot;
  write_dot(R, rdot);
  std::size_t n = 0;
  for (std::size_t pos = 0; (pos = rdot.str().find("->", pos)) != std::string::npos; ++pos) ++n;
  CHECK(n == 4);
}
