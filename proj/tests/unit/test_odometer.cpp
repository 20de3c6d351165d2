#include <set>

#include "chainscope/error.hpp"
#include "chainscope/ifs.hpp"
#include "chainscope/odometer.hpp"
#include "doctest.h"

using namespace chainscope;

TEST_CASE("d_alpha") {
  Odometer dyadic({2, 2, 2, 2}, 4);
  CHECK(d_alpha(dyadic, {0, 0, 0, 0}, {0, 0, 0, 0}) == 0.0);
  CHECK(d_alpha(dyadic, {0, 0, 0, 0}, {1, 0, 0, 0}) == 0.5);
  CHECK(d_alpha(dyadic, {0, 0, 0, 0}, {1, 1, 0, 1}) == 0.5 + 0.25 + 0.0625);
  Odometer mixed({2, 3}, 2);
  CHECK(d_alpha(mixed, {1, 2}, {0, 2}) == 0.5);
}

TEST_CASE("addition with carry") {
  Odometer o4({2, 2, 2, 2}, 4);
  CHECK(add(o4, {1, 0, 0, 0}, {1, 0, 0, 0}) == DigitString{0, 1, 0, 0});
  CHECK(add(o4, {1, 1, 0, 1}, o4.zero()) == DigitString{1, 1, 0, 1});
  Odometer o23({2, 3}, 2);
  CHECK(add(o23, {1, 2}, {1, 0}) == DigitString{0, 0});
  CHECK_THROWS_AS(add(o23, {2, 0}, {0, 0}), DomainError);
}

TEST_CASE("g_alpha") {
  Odometer o3({2, 2, 2}, 3);
  CHECK(g_alpha(o3, {1, 1, 1}) == DigitString{0, 0, 0});
  CHECK(g_alpha(o3, {0, 1, 0}) == DigitString{1, 1, 0});
  Odometer o32({3, 2}, 2);
  CHECK(g_alpha(o32, {2, 0}) == DigitString{0, 1});
}

TEST_CASE("tail fills missing radices") {
  Odometer o({3}, 4, 2u);
  CHECK(o.alpha() == std::vector<std::uint32_t>{3, 2, 2, 2});
  CHECK(o.size() == 24);
  CHECK_THROWS_AS(Odometer({2}, 3), DomainError);
  CHECK_THROWS_AS(Odometer({2, 1}, 2), DomainError);
}

TEST_CASE("index round trip and group axioms, exhaustively") {
  const std::vector<std::vector<std::uint32_t>> alphas = {{2, 2, 2}, {2, 3}, {3, 2}, {2, 2, 2, 2, 2}};
  for (const auto& alpha : alphas) {
    Odometer o(alpha, alpha.size());
    const std::size_t n = o.size();
    std::vector<DigitString> all;
    for (std::size_t i = 0; i < n; ++i) {
      all.push_back(o.digits_of(i));
      REQUIRE(o.index_of(all.back()) == i);
    }
    for (const auto& x : all) {
      REQUIRE(add(o, x, o.zero()) == x);
      bool has_inverse = false;
      for (const auto& y : all) {
        REQUIRE(add(o, x, y) == add(o, y, x));
        // the digit sum is index addition mod n
        REQUIRE(o.index_of(add(o, x, y)) == (o.index_of(x) + o.index_of(y)) % n);
        if (add(o, x, y) == o.zero()) has_inverse = true;
      }
      REQUIRE(has_inverse);
    }
    for (const auto& x : all)
      for (const auto& y : all)
        for (const auto& z : all) REQUIRE(add(o, add(o, x, y), z) == add(o, x, add(o, y, z)));
  }
}

TEST_CASE("g_alpha is a single cycle") {
  for (auto alpha : std::vector<std::vector<std::uint32_t>>{{2, 2}, {3, 2}, {2, 2, 2, 2, 2, 2}}) {
    Odometer o(alpha, alpha.size());
    std::set<DigitString> seen;
    DigitString x = o.zero();
    do {
      REQUIRE(seen.insert(x).second);
      x = g_alpha(o, x);
    } while (x != o.zero());
    CHECK(seen.size() == o.size());
  }
}

TEST_CASE("digit strings serialize little-endian") {
  CHECK(format_digits({1, 0, 2}) == "1,0,2");
  CHECK(parse_digits("1,0,2") == DigitString{1, 0, 2});
  CHECK_THROWS_AS(parse_digits("1,,2"), DomainError);
}

TEST_CASE("finite odometer system") {
  OdoIFS four = as_finite_system(Odometer({2, 2}, 2));
  CHECK(four.size() == 4);
  for (BoxIndex i = 0; i < 4; ++i) CHECK(four.image(i) == (i + 1) % 4);
  OdoIFS six = as_finite_system(Odometer({3, 2}, 2));
  CHECK(six.size() == 6);
  CHECK_THROWS_AS(as_finite_system(Odometer({2}, 20, 2u), 1000), ResourceError);

  OdoIFS big = as_finite_system(Odometer({2, 3, 2, 2}, 4));
  for (BoxIndex c = 0; c < big.size(); ++c) {
    for (double r : {0.1, 0.25, 0.3, 0.5, 0.6, 1.0}) {
      std::vector<BoxIndex> brute;
      for (BoxIndex j = 0; j < big.size(); ++j)
        if (big.dist(c, j) < r) brute.push_back(j);
      REQUIRE(big.ball(c, r) == brute);
    }
  }
}
