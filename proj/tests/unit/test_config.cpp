#include <fstream>
#include <string>

#include "chainscope/config.hpp"
#include "chainscope/error.hpp"
#include "doctest.h"

using namespace chainscope;

namespace {

// line and key of the error thrown while parsing `text`
std::pair<std::size_t, std::string> error_at(const std::string& text) {
  try {
    parse_config_text(text, "t.cfg");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind("t.cfg:" + std::to_string(e.line()) + ": key '" + e.key() + "'", 0) == 0);
    return {e.line(), e.key()};
  }
  FAIL("no parse error for: " << text);
  return {};
}

}  // namespace

TEST_CASE("tent pair config") {
  auto cfg = parse_config_text(R"(# two folds
space kind=interval lo=0 hi=1 res=256
map pwl points=0,0;0.5,1;1,1
map pwl points=0,1;0.5,1;1,0   # second map
analysis epsilon=0.05
scan eps0=0.05 ratio=0.5 levels=3
check equivalence=on product=off n_max=2
mode strict
run seed=7 threads=2
)");
  REQUIRE(cfg.space);
  CHECK(cfg.space->is_interval());
  CHECK(cfg.resolution == std::vector<std::size_t>{256});
  CHECK(cfg.maps.size() == 2);
  CHECK(*cfg.epsilon == 0.05);
  REQUIRE(cfg.scan);
  auto sched = cfg.scan->schedule();
  REQUIRE(sched.size() == 3);
  CHECK(sched[2] == doctest::Approx(0.0125));
  CHECK(cfg.check.equivalence);
  CHECK_FALSE(cfg.check.product);
  CHECK(cfg.seed == 7);
  CHECK(cfg.threads == 2);
  CHECK(cfg.mode.kind == SlackKind::Strict);
  CHECK_FALSE(cfg.is_odometer());
  CHECK(cfg.system().symbol_count() == 2);
  CHECK(cfg.grid(0.01).resolution()[0] == 256);
}

TEST_CASE("derived resolution and defaults") {
  auto cfg = parse_config_text("space kind=circle\nmap rotation angle=0.25\nanalysis epsilon=0.1\n");
  CHECK(cfg.resolution.empty());
  CHECK(cfg.grid(0.1).resolution()[0] == 40);
  CHECK(cfg.analysis_epsilon() == 0.1);
  CHECK(cfg.caps.mixing_nodes == 1024);
  CHECK(cfg.seed == 0);
  CHECK(cfg.shadow.chains == 100);

  auto scan_only = parse_config_text("space kind=circle\nmap rotation angle=0.25\nscan eps0=0.2 ratio=0.5 levels=2 res_factor=8\n");
  CHECK(scan_only.analysis_epsilon() == 0.2);
  CHECK(scan_only.grid(0.2).resolution()[0] == 40);
}

TEST_CASE("product and composed maps") {
  auto cfg = parse_config_text(R"(
space kind=product
left kind=circle res=10
right kind=interval lo=0 hi=1 res=12
map product
left rotation angle=0.3
right affine a=0.5 b=0.25
mode fattened slack=0.01
analysis epsilon=0.2
)");
  REQUIRE(cfg.space);
  CHECK(cfg.space->is_product());
  CHECK(cfg.resolution == std::vector<std::size_t>{10, 12});
  CHECK(cfg.maps.size() == 1);
  CHECK(cfg.mode.kind == SlackKind::Fattened);
  CHECK(*cfg.mode.slack == 0.01);
  Point q = apply(cfg.system(), 0, Point(0.8, 0.5));
  CHECK(q[0] == doctest::Approx(0.1));
  CHECK(q[1] == doctest::Approx(0.5));

  auto comp = parse_config_text(R"(
space kind=circle res=16
map composed
step rotation angle=0.1
step rotation angle=0.15
analysis epsilon=0.1
)");
  REQUIRE(comp.maps.size() == 1);
  CHECK(apply(comp.system(), 0, Point(0.0))[0] == doctest::Approx(0.25));
}

TEST_CASE("odometer config") {
  auto cfg = parse_config_text("odometer alpha=2,3 depth=4 tail=2\nscan epsilons=0.4,0.2\n");
  REQUIRE(cfg.is_odometer());
  CHECK(cfg.odometer->alpha == std::vector<std::uint32_t>{2, 3});
  CHECK(cfg.odometer->depth == 4);
  CHECK(*cfg.odometer->tail == 2);
  CHECK(cfg.scan->schedule() == std::vector<double>{0.4, 0.2});
  CHECK(cfg.analysis_epsilon() == 0.4);
  CHECK(cfg.make_odometer().depth() == 4);
  CHECK_THROWS_AS(cfg.system(), DomainError);
}

TEST_CASE("errors name the line and the key") {
  const std::string good_head = "space kind=interval lo=0 hi=1\nmap affine a=0.5 b=0\n";
  CHECK(error_at(good_head + "analysis epsilon=abc\n") == std::pair<std::size_t, std::string>{3, "epsilon"});
  CHECK(error_at(good_head + "analysis epsilon=-1\n") == std::pair<std::size_t, std::string>{3, "epsilon"});
  CHECK(error_at(good_head + "analysis epsilon=0.1 bogus=1\n") == std::pair<std::size_t, std::string>{3, "bogus"});
  CHECK(error_at(good_head + "frobnicate x=1\n") == std::pair<std::size_t, std::string>{3, "frobnicate"});
  CHECK(error_at("space kind=sphere\n").second == "kind");
  CHECK(error_at("space kind=interval lo=1 hi=0\n").second == "hi");
  CHECK(error_at("space kind=interval lo=0 hi=1\n\n# comment\nmap pwl points=0,0;0.5\n") ==
        std::pair<std::size_t, std::string>{4, "points"});
  CHECK(error_at("space kind=interval lo=0 hi=1\nmap pwl points=0,0;0.5,2;1,1\nanalysis epsilon=0.1\n") ==
        std::pair<std::size_t, std::string>{2, "map"});
  CHECK(error_at(good_head + "scan eps0=0.1 ratio=1.5 levels=3\n").second == "ratio");
  CHECK(error_at(good_head + "scan eps0=0.1 ratio=0.5 levels=0\n").second == "levels");
  CHECK(error_at(good_head + "scan epsilons=0.1,0.2\n").second == "epsilons");
  CHECK(error_at(good_head + "mode sloppy\nanalysis epsilon=0.1\n").second == "mode");
  CHECK(error_at(good_head + "mode strict slack=0.1\nanalysis epsilon=0.1\n").second == "slack");
  CHECK(error_at(good_head + "check product=maybe\nanalysis epsilon=0.1\n").second == "product");
  CHECK(error_at(good_head + "run seed=-3\nanalysis epsilon=0.1\n").second == "seed");
  CHECK(error_at(good_head + "analysis epsilon=0.1 epsilon=0.2\n").second == "epsilon");
  CHECK(error_at("left kind=circle\n").second == "left");
  CHECK(error_at("space kind=interval lo=0 hi=1\nstep rotation angle=0.1\n").second == "step");
  CHECK(error_at("odometer alpha=2,1\nanalysis epsilon=0.1\n").second == "alpha");
  CHECK(error_at("odometer alpha=2,2 depth=5\nanalysis epsilon=0.1\n").second == "depth");
  CHECK(error_at("odometer alpha=2,2\nspace kind=circle\nanalysis epsilon=0.1\n").second == "odometer");
  CHECK(error_at(good_head + "shadow chain=0.1,,0.2\nanalysis epsilon=0.1\n").second == "chain");
}

TEST_CASE("whole-file checks") {
  CHECK(error_at("map affine a=0.5 b=0\nanalysis epsilon=0.1\n") == std::pair<std::size_t, std::string>{2, "space"});
  CHECK(error_at("space kind=circle\nanalysis epsilon=0.1\n").second == "map");
  CHECK(error_at("space kind=circle\nmap rotation angle=0.1\n").second == "analysis");
  CHECK(error_at("space kind=circle\nmap affine a=1 b=0\nanalysis epsilon=0.1\n") ==
        std::pair<std::size_t, std::string>{2, "map"});
  CHECK(error_at("space kind=product\nleft kind=circle\nmap rotation angle=0.1\nanalysis epsilon=0.1\n").second ==
        "right");
}

TEST_CASE("points parser") {
  auto pts = parse_points("0.1,0.25,1");
  REQUIRE(pts.size() == 3);
  CHECK(pts[1][0] == 0.25);
  auto pairs = parse_points("0.1:0.2,0.3:0.4");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[1] == Point(0.3, 0.4));
  CHECK_THROWS_AS(parse_points(""), DomainError);
  CHECK_THROWS_AS(parse_points("0.1,x"), DomainError);
  CHECK_THROWS_AS(parse_points("0.1,,0.2"), DomainError);
  CHECK_THROWS_AS(parse_points("0.1:"), DomainError);
}

TEST_CASE("load_config reads files and reports the path") {
  const std::string path = "test_config_tmp.cfg";
  {
    std::ofstream out(path);
    out << "space kind=circle\nmap rotation angle=0.5\nanalysis epsilon=nope\n";
  }
  try {
    load_config(path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(path + ":3: key 'epsilon'") != std::string::npos);
  }
  std::remove(path.c_str());
  CHECK_THROWS(load_config("does/not/exist.cfg"));
}
