#pragma once

// Brute-force references for small graphs, independent of the library's
// BFS/Tarjan/bitset code paths.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "chainscope/chaingraph.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<char>>;

inline Matrix adjacency(const chainscope::ChainGraph& g) {
  const std::size_t n = g.node_count();
  Matrix a(n, std::vector<char>(n, 0));
  for (chainscope::BoxIndex u = 0; u < n; ++u)
    for (auto v : g.successors(u)) a[u][v] = 1;
  return a;
}

inline Matrix multiply(const Matrix& x, const Matrix& y) {
  const std::size_t n = x.size();
  Matrix z(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (x[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (y[k][j]) z[i][j] = 1;
  return z;
}

/// reach[u][v]: a path of length >= 1 from u to v.
inline Matrix closure(const Matrix& a) {
  Matrix r = a;
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = 1;
  return r;
}

/// Components as sets of mutually reachable nodes (a node is always with itself).
inline std::set<std::set<std::size_t>> components(const Matrix& a) {
  const auto r = closure(a);
  const std::size_t n = a.size();
  std::set<std::set<std::size_t>> out;
  for (std::size_t u = 0; u < n; ++u) {
    std::set<std::size_t> c{u};
    for (std::size_t v = 0; v < n; ++v)
      if (r[u][v] && r[v][u]) c.insert(v);
    out.insert(c);
  }
  return out;
}

inline std::vector<std::size_t> recurrent(const Matrix& a) {
  const auto r = closure(a);
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < a.size(); ++v)
    if (r[v][v]) out.push_back(v);
  return out;
}

/// gcd of the lengths of all closed walks of length <= n. Every simple cycle
/// has length <= n and closed walks decompose into simple cycles, so for a
/// strongly connected graph this is the period.
inline std::size_t closed_walk_gcd(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix p = a;
  std::size_t g = 0;
  for (std::size_t len = 1; len <= n; ++len) {
    for (std::size_t i = 0; i < n; ++i)
      if (p[i][i]) {
        g = std::gcd(g, len);
        break;
      }
    p = multiply(p, a);
  }
  return g;
}

/// First n0 with every ordered pair joined by paths of lengths n0 .. n0+k-1;
/// 0 when none is found up to `bound`.
inline std::size_t mixing_N(const Matrix& a, std::size_t k, std::size_t bound) {
  const std::size_t n = a.size();
  Matrix p = a;
  std::size_t run = 0;
  for (std::size_t len = 1; len <= bound; ++len) {
    bool full = true;
    for (std::size_t i = 0; i < n && full; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!p[i][j]) {
          full = false;
          break;
        }
    run = full ? run + 1 : 0;
    if (run == k) return len - k + 1;
    p = multiply(p, a);
  }
  return 0;
}

/// Random digraph; with `period` > 1 every edge goes from layer c to c+1 mod period.
inline chainscope::ChainGraph random_digraph(std::mt19937_64& rng, std::size_t n, double p, std::size_t period) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> layer_of(0, period - 1);
  std::vector<std::size_t> layer(n);
  for (auto& l : layer) l = layer_of(rng);
  std::vector<chainscope::GraphEdge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (period > 1 && layer[j] != (layer[i] + 1) % period) continue;
      if (u(rng) < p) edges.push_back({static_cast<chainscope::BoxIndex>(i), static_cast<chainscope::BoxIndex>(j), {0}});
    }
  return chainscope::ChainGraph::from_edges(n, std::move(edges));
}

/// Exact shadow test for piecewise-linear interval maps: propagates the set of
/// true orbit positions as a union of intervals, clipped to each epsilon-window.
/// Nonempty at the end iff some true orbit stays within eps of every point.
inline bool pwl_shadow_exists(const std::vector<std::vector<std::pair<double, double>>>& maps,
                              const std::vector<double>& chain, double eps, double lo = 0.0, double hi = 1.0) {
  using Iv = std::pair<double, double>;
  std::vector<Iv> S{{std::max(lo, chain[0] - eps), std::min(hi, chain[0] + eps)}};
  for (std::size_t i = 1; i < chain.size() && !S.empty(); ++i) {
    const double a = chain[i] - eps, b = chain[i] + eps;
    std::vector<Iv> next;
    for (const auto& iv : S)
      for (const auto& pts : maps)
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
          const double x0 = pts[k].first, x1 = pts[k + 1].first;
          const double l = std::max(iv.first, x0), r = std::min(iv.second, x1);
          if (l > r) continue;
          auto f = [&](double x) { return pts[k].second + (pts[k + 1].second - pts[k].second) * (x - x0) / (x1 - x0); };
          const double fl = std::min(f(l), f(r)), fr = std::max(f(l), f(r));
          if (std::max(fl, a) <= std::min(fr, b)) next.push_back({std::max(fl, a), std::min(fr, b)});
        }
    std::sort(next.begin(), next.end());
    S.clear();
    for (const auto& iv : next) {
      if (!S.empty() && iv.first <= S.back().second)
        S.back().second = std::max(S.back().second, iv.second);
      else
        S.push_back(iv);
    }
  }
  return !S.empty();
}

/// Exact forward reachability for piecewise-linear interval maps: does some
/// word of length n carry a point of [u0, u1] into [v0, v1]?
inline bool pwl_reachable(const std::vector<std::vector<std::pair<double, double>>>& maps, double u0, double u1,
                          double v0, double v1, std::size_t n) {
  using Iv = std::pair<double, double>;
  std::vector<Iv> S{{u0, u1}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Iv> next;
    for (const auto& iv : S)
      for (const auto& pts : maps)
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
          const double x0 = pts[k].first, x1 = pts[k + 1].first;
          const double l = std::max(iv.first, x0), r = std::min(iv.second, x1);
          if (l > r) continue;
          auto f = [&](double x) { return pts[k].second + (pts[k + 1].second - pts[k].second) * (x - x0) / (x1 - x0); };
          next.push_back({std::min(f(l), f(r)), std::max(f(l), f(r))});
        }
    std::sort(next.begin(), next.end());
    S.clear();
    for (const auto& iv : next) {
      if (!S.empty() && iv.first <= S.back().second)
        S.back().second = std::max(S.back().second, iv.second);
      else
        S.push_back(iv);
    }
  }
  for (const auto& iv : S)
    if (iv.first <= v1 && iv.second >= v0) return true;
  return false;
}

}  // namespace oracle
