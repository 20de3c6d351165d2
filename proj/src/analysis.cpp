#include "chainscope/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include "chainscope/error.hpp"

namespace chainscope {

std::string to_string(MixingMethod m) { return m == MixingMethod::DiameterBound ? "DiameterBound" : "ExplicitCheck"; }

std::string to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::ChainMixing: return "ChainMixing";
    case VerdictKind::CyclicFactor: return "CyclicFactor";
    case VerdictKind::OdometerLike: return "OdometerLike";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string Verdict::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == VerdictKind::CyclicFactor) os << "(" << k << ")";
  if (kind == VerdictKind::OdometerLike) {
    os << "(";
    for (std::size_t i = 0; i < alpha.size(); ++i) os << (i ? "," : "") << alpha[i];
    os << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

Partition strongly_connected_components(const ChainGraph& g) {
  const std::size_t n = g.node_count();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<BoxIndex> stack;
  std::vector<std::pair<BoxIndex, std::size_t>> calls;  // (node, next edge)
  Partition comps;
  std::size_t counter = 0;

  for (BoxIndex root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    calls.emplace_back(root, g.edge_begin(root));
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!calls.empty()) {
      auto& [v, e] = calls.back();
      if (e < g.edge_end(v)) {
        const BoxIndex w = g.target(e++);
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          calls.emplace_back(w, g.edge_begin(w));
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const BoxIndex done = v;
      calls.pop_back();
      if (!calls.empty()) {
        const BoxIndex parent = calls.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        std::vector<BoxIndex> comp;
        BoxIndex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

std::size_t graph_period(const ChainGraph& g, BoxIndex root, std::vector<std::size_t>* levels_out) {
  const std::size_t n = g.node_count();
  constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> level(n, kUnreached);
  if (root >= n) return 0;
  std::queue<BoxIndex> q;
  level[root] = 0;
  q.push(root);
  while (!q.empty()) {
    const BoxIndex v = q.front();
    q.pop();
    for (auto w : g.successors(v))
      if (level[w] == kUnreached) {
        level[w] = level[v] + 1;
        q.push(w);
      }
  }
  std::size_t period = 0;
  for (BoxIndex v = 0; v < n; ++v) {
    if (level[v] == kUnreached) continue;
    for (auto w : g.successors(v)) {
      if (level[w] == kUnreached) continue;
      const auto a = static_cast<long long>(level[v]) + 1;
      const auto b = static_cast<long long>(level[w]);
      period = std::gcd(period, static_cast<std::size_t>(a > b ? a - b : b - a));
    }
  }
  if (levels_out) *levels_out = std::move(level);
  return period;
}

ChainAnalysis analyze(const ChainGraph& g, const AnalyzeOptions& options) {
  ChainAnalysis a;
  const std::size_t n = g.node_count();
  a.node_count = n;
  if (n == 0) {
    a.warnings.push_back("empty graph: analysis is vacuous");
    return a;
  }
  if (g.edge_count() == 0) a.warnings.push_back("graph has no edges: no box is chain recurrent");

  a.sccs = strongly_connected_components(g);
  a.scc_of.assign(n, 0);
  for (std::size_t c = 0; c < a.sccs.size(); ++c)
    for (auto v : a.sccs[c]) a.scc_of[v] = static_cast<std::uint32_t>(c);

  std::vector<char> cyclic(a.sccs.size(), 0);
  for (std::size_t c = 0; c < a.sccs.size(); ++c) {
    if (a.sccs[c].size() > 1) {
      cyclic[c] = 1;
    } else {
      const auto v = a.sccs[c].front();
      cyclic[c] = g.has_edge(v, v) ? 1 : 0;
    }
  }
  for (BoxIndex v = 0; v < n; ++v)
    if (cyclic[a.scc_of[v]]) a.recurrent_boxes.push_back(v);
  a.is_chain_recurrent = a.recurrent_boxes.size() == n;
  a.is_chain_transitive = a.sccs.size() == 1 && a.is_chain_recurrent;

  if (a.is_chain_transitive) {
    std::vector<std::size_t> level;
    const std::size_t k = graph_period(g, 0, &level);
    a.k_epsilon = k;
    Partition classes(k);
    a.class_of.assign(n, 0);
    for (BoxIndex v = 0; v < n; ++v) {
      const auto c = static_cast<std::uint32_t>(level[v] % k);
      a.class_of[v] = c;
      classes[c].push_back(v);
    }
    a.cyclic_classes = std::move(classes);

    if (k == 1 && options.certify) {
      if (n > options.mixing_node_cap) {
        a.mixing_failure = "skipped: " + std::to_string(n) + " nodes exceed the certificate cap of " +
                           std::to_string(options.mixing_node_cap);
      } else {
        auto outcome = certify_mixing(g, a, options.k_check);
        a.mixing = outcome.certificate;
        a.mixing_failure = outcome.failure;
      }
    }
  }
  return a;
}

namespace {

class BitRows {
 public:
  BitRows(std::size_t rows, std::size_t cols) : cols_(cols), words_((cols + 63) / 64), bits_(rows * words_, 0) {}

  std::uint64_t* row(std::size_t r) { return bits_.data() + r * words_; }
  const std::uint64_t* row(std::size_t r) const { return bits_.data() + r * words_; }
  std::size_t words() const { return words_; }

  void set(std::size_t r, std::size_t c) { row(r)[c / 64] |= std::uint64_t{1} << (c % 64); }
  bool test(std::size_t r, std::size_t c) const { return (row(r)[c / 64] >> (c % 64)) & 1U; }

  bool full() const {
    const std::size_t rows = words_ ? bits_.size() / words_ : 0;
    const std::uint64_t tail = cols_ % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (cols_ % 64)) - 1;
    for (std::size_t r = 0; r < rows; ++r) {
      const auto* p = row(r);
      for (std::size_t w = 0; w + 1 < words_; ++w)
        if (p[w] != ~std::uint64_t{0}) return false;
      if (words_ && p[words_ - 1] != tail) return false;
    }
    return true;
  }

 private:
  std::size_t cols_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace

MixingOutcome certify_mixing(const ChainGraph& g, const ChainAnalysis& a, std::size_t k_check) {
  if (!a.is_chain_transitive || a.k_epsilon != std::size_t{1})
    throw DomainError("certify_mixing needs a chain transitive graph with k_eps = 1");
  if (k_check == 0) throw DomainError("k_check must be positive");
  const std::size_t n = g.node_count();
  BitRows adj(n, n);
  for (BoxIndex v = 0; v < n; ++v)
    for (auto w : g.successors(v)) adj.set(v, w);

  // reach holds the pairs joined by a path of length exactly `len`
  BitRows reach = adj;
  BitRows next(n, n);
  const std::size_t n_guess = n * n;
  const std::size_t limit = 2 * n_guess + k_check;
  std::size_t streak = 0;
  for (std::size_t len = 1; len <= limit; ++len) {
    if (reach.full()) {
      if (++streak == k_check) return {MixingCertificate{len - k_check + 1, MixingMethod::ExplicitCheck, k_check}, {}};
    } else {
      streak = 0;
    }
    for (std::size_t r = 0; r < n; ++r) {
      std::uint64_t* out = next.row(r);
      std::fill(out, out + next.words(), 0);
      const std::uint64_t* in = reach.row(r);
      for (std::size_t w = 0; w < reach.words(); ++w) {
        std::uint64_t bits = in[w];
        while (bits) {
          const std::size_t c = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
          bits &= bits - 1;
          const std::uint64_t* src = adj.row(c);
          for (std::size_t k = 0; k < next.words(); ++k) out[k] |= src[k];
        }
      }
    }
    std::swap(reach, next);
  }
  return {std::nullopt, "no mixing length found below the bound 2*|boxes|^2 = " + std::to_string(2 * n_guess)};
}

bool class_permutation_check(const ChainGraph& g, const ChainAnalysis& a) {
  if (!a.k_epsilon || a.class_of.size() != g.node_count())
    throw DomainError("class_permutation_check needs k_eps and cyclic classes");
  const std::size_t k = *a.k_epsilon;
  for (BoxIndex v = 0; v < g.node_count(); ++v)
    for (std::size_t e = g.edge_begin(v); e < g.edge_end(v); ++e) {
      if (g.labels(e).empty()) return false;
      if (a.class_of[g.target(e)] != (a.class_of[v] + 1) % k) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------

double ScanSchedule::epsilon(std::size_t level) const {
  return eps0 * std::pow(ratio, static_cast<double>(level));
}

std::vector<Partition> ScanResult::class_partitions() const {
  std::vector<Partition> out;
  for (const auto& l : levels) out.push_back(l.classes);
  return out;
}

namespace {

/// Box of the coarse level containing box b of the fine level.
BoxIndex project_box(const ScanLevel& fine, BoxIndex b, const ScanLevel& coarse) {
  const auto* fg = std::get_if<BoxGrid>(&fine.geometry);
  const auto* cg = std::get_if<BoxGrid>(&coarse.geometry);
  if (fg && cg) return cg->locate(fg->center(b));
  return b;
}

struct ScanHooks {
  std::function<ChainGraph(double)> build_level;
  std::function<ChainGraph(const ChainGraph&, std::size_t)> build_power;
};

ScanResult scan_core(const std::vector<double>& epsilons, const ScanHooks& hooks) {
  if (epsilons.empty()) throw DomainError("a scan needs at least one level");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw DomainError("scan epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw DomainError("scan epsilons must be strictly decreasing");
  }
  ScanResult result;
  AnalyzeOptions no_cert;
  no_cert.certify = false;
  ChainGraph last_graph;

  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    ChainGraph g = hooks.build_level(epsilons[i]);
    ChainAnalysis a = analyze(g, no_cert);
    if (!a.is_chain_transitive) {
      if (i == 0) throw NotTransitive("system is not chain transitive at the first scan level");
      throw DiscretizationBreakdown(i, "graph is no longer chain transitive");
    }
    ScanLevel level;
    level.epsilon = epsilons[i];
    if (const auto* grid = g.grid()) level.resolution = grid->resolution();
    level.boxes = g.node_count();
    level.edges = g.edge_count();
    level.k = *a.k_epsilon;
    level.classes = std::move(*a.cyclic_classes);
    level.class_of = std::move(a.class_of);
    level.geometry = g.geometry();

    if (i > 0) {
      const ScanLevel& coarse = result.levels.back();
      if (level.k % coarse.k != 0)
        throw DiscretizationBreakdown(i, "k = " + std::to_string(level.k) + " is not a multiple of the previous k = " +
                                             std::to_string(coarse.k));
      std::vector<std::int64_t> parent(level.k, -1);
      for (BoxIndex b = 0; b < level.boxes; ++b) {
        const auto fine_class = level.class_of[b];
        const auto coarse_class = static_cast<std::int64_t>(coarse.class_of[project_box(level, b, coarse)]);
        if (parent[fine_class] < 0) {
          parent[fine_class] = coarse_class;
        } else if (parent[fine_class] != coarse_class) {
          throw DiscretizationBreakdown(i, "class " + std::to_string(fine_class) +
                                               " is not contained in a single class of the previous level");
        }
      }
    }
    result.epsilons.push_back(level.epsilon);
    result.ks.push_back(level.k);
    result.levels.push_back(std::move(level));
    last_graph = std::move(g);
  }

  const auto& ks = result.ks;
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] > 1 && (i == 0 || ks[i] != ks[i - 1])) result.odometer_levels.push_back(i);

  const std::size_t m = ks.size();
  Verdict& v = result.verdict;
  if (std::all_of(ks.begin(), ks.end(), [](std::size_t k) { return k == 1; })) {
    v.kind = VerdictKind::ChainMixing;
  } else if (m >= 3 && ks[m - 1] == ks[m - 2] && ks[m - 2] == ks[m - 3]) {
    v.kind = VerdictKind::CyclicFactor;
    v.k = ks[m - 1];
  } else if (m >= 3 && ks[m - 3] < ks[m - 2] && ks[m - 2] < ks[m - 1]) {
    v.kind = VerdictKind::OdometerLike;
    std::size_t prev = 1;
    for (auto lvl : result.odometer_levels) {
      v.alpha.push_back(static_cast<std::uint32_t>(ks[lvl] / prev));
      prev = ks[lvl];
    }
  } else {
    v.kind = VerdictKind::Inconclusive;
  }

  if (v.kind == VerdictKind::CyclicFactor) {
    const ScanLevel& last = result.levels.back();
    ClassMixingCheck check;
    check.k = v.k;
    const ChainGraph power = hooks.build_power(last_graph, v.k);
    check.all_mixing = true;
    for (const auto& cls : last.classes) {
      const ChainGraph sub = power.induced(cls);
      const ChainAnalysis sa = analyze(sub, no_cert);
      check.class_transitive.push_back(sa.is_chain_transitive);
      check.class_period.push_back(sa.k_epsilon.value_or(0));
      if (!sa.is_chain_transitive || sa.k_epsilon != std::size_t{1}) check.all_mixing = false;
    }
    result.class_mixing = std::move(check);
  }
  return result;
}

std::vector<double> schedule_epsilons(const ScanSchedule& s) {
  if (!(s.eps0 > 0.0)) throw DomainError("scan eps0 must be positive");
  if (!(s.ratio > 0.0 && s.ratio < 1.0)) throw DomainError("scan ratio must lie in (0,1)");
  if (s.levels == 0) throw DomainError("scan needs at least one level");
  std::vector<double> eps;
  for (std::size_t i = 0; i < s.levels; ++i) eps.push_back(s.epsilon(i));
  return eps;
}

}  // namespace

ScanResult epsilon_scan(const IFSystem& sys, const ScanSchedule& schedule) {
  ScanHooks hooks;
  hooks.build_level = [&](double eps) {
    return build(sys, grid_for(sys.space(), eps, schedule.res_factor), eps, schedule.mode, schedule.threads);
  };
  hooks.build_power = [&](const ChainGraph& level_graph, std::size_t k) {
    return build(iterate_system(sys, k), *level_graph.grid(), level_graph.epsilon(), schedule.mode, schedule.threads);
  };
  return scan_core(schedule_epsilons(schedule), hooks);
}

ScanResult epsilon_scan(const OdoIFS& sys, const std::vector<double>& epsilons) {
  ScanHooks hooks;
  hooks.build_level = [&](double eps) { return build(sys, eps); };
  hooks.build_power = [&](const ChainGraph& level_graph, std::size_t k) {
    return build(sys, level_graph.epsilon(), k);
  };
  return scan_core(epsilons, hooks);
}

ScanResult epsilon_scan(const OdoIFS& sys, const ScanSchedule& schedule) {
  return epsilon_scan(sys, schedule_epsilons(schedule));
}

// ---------------------------------------------------------------------------

Odometer FactorCoding::odometer() const { return Odometer(alpha, depth); }

FactorCoding build_factor_coding(const ScanResult& scan) {
  if (scan.verdict.kind != VerdictKind::OdometerLike)
    throw DomainError("factor coding needs an OdometerLike scan verdict");
  FactorCoding coding;
  coding.depth = scan.odometer_levels.size();
  coding.alpha = scan.verdict.alpha;
  const ScanLevel& finest = scan.levels.back();
  coding.geometry = finest.geometry;
  coding.codes.assign(finest.boxes, DigitString(coding.depth, 0));
  for (BoxIndex b = 0; b < finest.boxes; ++b) {
    std::size_t prev_label = 0;
    std::size_t prev_k = 1;
    for (std::size_t d = 0; d < coding.depth; ++d) {
      const std::size_t lvl = scan.odometer_levels[d];
      const ScanLevel& level = scan.levels[lvl];
      const std::size_t label = level.class_of[project_box(finest, b, level)];
      if (label % prev_k != prev_label)
        throw DiscretizationBreakdown(lvl, "class labels are not refinements of the previous level");
      coding.codes[b][d] = static_cast<std::uint32_t>((label - prev_label) / prev_k);
      prev_label = label;
      prev_k = level.k;
    }
  }
  return coding;
}

namespace {

SemiconjugacyReport semiconjugacy_core(std::size_t boxes, std::size_t symbols,
                                       const std::function<BoxIndex(BoxIndex, Symbol)>& image,
                                       const FactorCoding& coding, const Odometer& odo, std::size_t samples,
                                       std::uint64_t seed) {
  if (odo.depth() != coding.depth) throw DomainError("odometer depth does not match the coding depth");
  if (coding.codes.size() != boxes) throw DomainError("coding does not cover the system's boxes");
  std::vector<BoxIndex> chosen;
  if (samples >= boxes) {
    chosen.resize(boxes);
    std::iota(chosen.begin(), chosen.end(), BoxIndex{0});
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, boxes - 1);
    for (std::size_t s = 0; s < samples; ++s) chosen.push_back(static_cast<BoxIndex>(pick(rng)));
  }
  SemiconjugacyReport report;
  for (auto b : chosen) {
    const DigitString expected = g_alpha(odo, coding.codes[b]);
    for (Symbol s = 0; s < symbols; ++s) {
      ++report.checked;
      const BoxIndex img = image(b, s);
      if (coding.codes[img] != expected) {
        ++report.violations;
        if (report.examples.size() < 5)
          report.examples.push_back("box " + std::to_string(b) + " symbol " + std::to_string(s) + ": code(image) = (" +
                                    format_digits(coding.codes[img]) + "), g(code) = (" + format_digits(expected) +
                                    ")");
      }
    }
  }
  return report;
}

}  // namespace

SemiconjugacyReport check_semiconjugacy(const IFSystem& sys, const FactorCoding& coding, const Odometer& odo,
                                        std::size_t samples, std::uint64_t seed) {
  const auto* grid = std::get_if<BoxGrid>(&coding.geometry);
  if (!grid) throw DomainError("coding was not built on a box grid");
  auto image = [&](BoxIndex b, Symbol s) { return grid->locate(apply(sys, s, grid->center(b))); };
  return semiconjugacy_core(grid->size(), sys.symbol_count(), image, coding, odo, samples, seed);
}

SemiconjugacyReport check_semiconjugacy(const OdoIFS& sys, const FactorCoding& coding, const Odometer& odo,
                                        std::size_t samples, std::uint64_t seed) {
  auto image = [&](BoxIndex b, Symbol) { return sys.image(b); };
  return semiconjugacy_core(sys.size(), 1, image, coding, odo, samples, seed);
}

// ---------------------------------------------------------------------------

EquivalenceReport verify_equivalence_theorem(const IFSystem& sys, const BoxGrid& grid, double eps,
                                             const CheckOptions& options) {
  if (!grid_adjacency_connected(grid)) throw HypothesisError("grid is not connected");
  AnalyzeOptions ao;
  ao.k_check = options.k_check;
  ao.mixing_node_cap = options.mixing_node_cap;
  const ChainGraph g = build(sys, grid, eps, options.mode, options.threads);
  const ChainAnalysis a = analyze(g, ao);

  EquivalenceReport r;
  r.recurrent = a.is_chain_recurrent;
  r.transitive = a.is_chain_transitive;
  r.k = a.k_epsilon;
  if (a.mixing) r.mixing_N = a.mixing->N;
  r.mixing = a.k_epsilon == std::size_t{1} && a.mixing.has_value();

  AnalyzeOptions no_cert;
  no_cert.certify = false;
  for (std::size_t n : {2, 3}) {
    const ChainGraph gn = build(iterate_system(sys, n, options.map_cap), grid, eps, options.mode, options.threads);
    r.power_transitive.push_back(analyze(gn, no_cert).is_chain_transitive);
  }
  r.totally_transitive = r.transitive && a.k_epsilon == std::size_t{1} &&
                         std::all_of(r.power_transitive.begin(), r.power_transitive.end(), [](bool b) { return b; });
  r.all_agree = r.recurrent == r.transitive && r.transitive == r.totally_transitive && r.totally_transitive == r.mixing;
  return r;
}

ProductReport product_transitivity_check(const IFSystem& sys, std::size_t n_max, const BoxGrid& grid, double eps,
                                         const CheckOptions& options) {
  if (n_max == 0) throw DomainError("n_max must be at least 1");
  AnalyzeOptions no_cert;
  no_cert.certify = false;
  ProductReport r;
  std::optional<ChainGraph> base;
  for (std::size_t n = 1; n <= n_max; ++n) {
    ChainGraph gn = build(iterate_system(sys, n, options.map_cap), grid, eps, options.mode, options.threads);
    r.power_transitive.push_back(analyze(gn, no_cert).is_chain_transitive);
    if (n == 1) base = std::move(gn);
  }
  r.premise_holds = std::all_of(r.power_transitive.begin(), r.power_transitive.end(), [](bool b) { return b; });
  if (!r.premise_holds) return r;

  const ChainGraph p = tensor_product(*base, *base, options.product_node_cap);
  r.product_built = true;
  r.product_nodes = p.node_count();
  r.product_edges = p.edge_count();
  const ChainAnalysis pa = analyze(p, no_cert);
  r.product_transitive = pa.is_chain_transitive;
  r.product_k = pa.k_epsilon;
  return r;
}

}  // namespace chainscope
