#pragma once

// Chain-level analysis of transition graphs: strongly connected components,
// chain recurrence and transitivity, the period k_eps with its cyclic
// classes, mixing certificates, epsilon scans with their verdict, the factor
// coding onto an adding machine, and the equivalence checks built on them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chainscope/chaingraph.hpp"
#include "chainscope/ifs.hpp"
#include "chainscope/odometer.hpp"

namespace chainscope {

enum class MixingMethod { DiameterBound, ExplicitCheck };
std::string to_string(MixingMethod m);

/// Every ordered pair of nodes is joined by a path of each length
/// N, N+1, ..., N+k_check-1 (and, the graph being primitive, every longer one).
struct MixingCertificate {
  std::size_t N = 0;
  MixingMethod method = MixingMethod::ExplicitCheck;
  std::size_t k_check = 3;
};

struct MixingOutcome {
  std::optional<MixingCertificate> certificate;
  std::string failure;
};

using Partition = std::vector<std::vector<BoxIndex>>;

struct ChainAnalysis {
  std::size_t node_count = 0;
  /// Components ordered by their smallest node; members increasing.
  Partition sccs;
  std::vector<std::uint32_t> scc_of;
  std::vector<BoxIndex> recurrent_boxes;
  bool is_chain_recurrent = false;
  bool is_chain_transitive = false;
  std::optional<std::size_t> k_epsilon;
  /// Class c holds the nodes at BFS depth = c (mod k) from node 0.
  std::optional<Partition> cyclic_classes;
  std::vector<std::uint32_t> class_of;
  std::optional<MixingCertificate> mixing;
  std::string mixing_failure;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kDefaultMixingNodeCap = 1024;

struct AnalyzeOptions {
  bool certify = true;
  std::size_t k_check = 3;
  /// Mixing certificates cost O(n^3 / 64) per length; larger graphs skip them.
  std::size_t mixing_node_cap = kDefaultMixingNodeCap;
};

/// Tarjan's algorithm, iterative. Components ordered by smallest node.
Partition strongly_connected_components(const ChainGraph& g);

/// Period of a strongly connected graph: gcd over edges u->v of
/// level(u) + 1 - level(v) for a BFS layering from `root`. Returns the levels
/// through `levels_out` when given.
std::size_t graph_period(const ChainGraph& g, BoxIndex root = 0, std::vector<std::size_t>* levels_out = nullptr);

ChainAnalysis analyze(const ChainGraph& g, const AnalyzeOptions& options = {});

/// Length-indexed boolean reachability. Throws DomainError unless the
/// analysis is transitive with k_eps = 1.
MixingOutcome certify_mixing(const ChainGraph& g, const ChainAnalysis& a, std::size_t k_check = 3);

/// True iff every edge, whatever its labels, goes from class c to c+1 mod k.
/// Throws DomainError when k_eps is undefined.
bool class_permutation_check(const ChainGraph& g, const ChainAnalysis& a);

// --- epsilon scans ----------------------------------------------------------

enum class VerdictKind { ChainMixing, CyclicFactor, OdometerLike, Inconclusive };
std::string to_string(VerdictKind v);

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  /// CyclicFactor only.
  std::size_t k = 0;
  /// OdometerLike only: k at the first level, then successive ratios.
  std::vector<std::uint32_t> alpha;

  std::string describe() const;
};

struct ScanSchedule {
  double eps0 = 0.1;
  double ratio = 0.5;
  std::size_t levels = 3;
  /// Grid rule h <= eps / res_factor at every level.
  double res_factor = 4.0;
  SlackMode mode{};
  std::size_t threads = 1;

  double epsilon(std::size_t level) const;
};

struct ScanLevel {
  double epsilon = 0.0;
  std::vector<std::size_t> resolution;  // empty for odometer scans
  std::size_t boxes = 0;
  std::size_t edges = 0;
  std::size_t k = 0;
  Partition classes;
  std::vector<std::uint32_t> class_of;
  ChainGraph::Geometry geometry;
};

/// Theorem (a)-side confirmation: F^k restricted to each class.
struct ClassMixingCheck {
  std::size_t k = 0;
  std::vector<bool> class_transitive;
  std::vector<std::size_t> class_period;  // 0 when not transitive
  bool all_mixing = false;
};

struct ScanResult {
  std::vector<double> epsilons;
  std::vector<std::size_t> ks;
  Verdict verdict;
  std::vector<ScanLevel> levels;
  /// Levels whose k is new and > 1; the odometer digits come from these.
  std::vector<std::size_t> odometer_levels;
  std::optional<ClassMixingCheck> class_mixing;

  std::vector<Partition> class_partitions() const;
};

/// Re-grids at every level, builds and analyzes the graph, asserts
/// divisibility and nesting across levels, and classifies the k sequence.
/// Throws NotTransitive if level 0 is not chain transitive and
/// DiscretizationBreakdown on any cross-level inconsistency.
ScanResult epsilon_scan(const IFSystem& sys, const ScanSchedule& schedule);
ScanResult epsilon_scan(const OdoIFS& sys, const ScanSchedule& schedule);

/// Scan over an explicit decreasing epsilon list.
ScanResult epsilon_scan(const OdoIFS& sys, const std::vector<double>& epsilons);

// --- adding-machine factor --------------------------------------------------

struct FactorCoding {
  std::size_t depth = 0;
  std::vector<std::uint32_t> alpha;
  /// One digit string per box of the finest scan level.
  std::vector<DigitString> codes;
  ChainGraph::Geometry geometry;

  Odometer odometer() const;
};

/// Digit strings from nested cyclic classes. Throws DomainError unless the
/// verdict is OdometerLike, DiscretizationBreakdown on a nesting violation.
FactorCoding build_factor_coding(const ScanResult& scan);

struct SemiconjugacyReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::vector<std::string> examples;  // first few violations
};

/// code(box of f_l(center(b))) == g_alpha(code(b)) for sampled boxes b and all l.
SemiconjugacyReport check_semiconjugacy(const IFSystem& sys, const FactorCoding& coding, const Odometer& odo,
                                        std::size_t samples, std::uint64_t seed = 0);
SemiconjugacyReport check_semiconjugacy(const OdoIFS& sys, const FactorCoding& coding, const Odometer& odo,
                                        std::size_t samples, std::uint64_t seed = 0);

// --- theorem-level checks ---------------------------------------------------

struct EquivalenceReport {
  bool recurrent = false;
  bool transitive = false;
  bool totally_transitive = false;
  bool mixing = false;
  bool all_agree = false;
  std::optional<std::size_t> k;
  std::optional<std::size_t> mixing_N;
  /// Transitivity of F^2 and F^3 on the same grid and epsilon.
  std::vector<bool> power_transitive;
};

struct CheckOptions {
  SlackMode mode{};
  std::size_t threads = 1;
  std::size_t k_check = 3;
  std::size_t mixing_node_cap = kDefaultMixingNodeCap;
  std::size_t product_node_cap = kDefaultProductNodeCap;
  std::size_t map_cap = kDefaultMapCap;
};

/// Recurrent, transitive, totally transitive (k = 1 and F^2, F^3 transitive)
/// and mixing (k = 1 with certificate). Throws HypothesisError when the grid
/// is not connected.
EquivalenceReport verify_equivalence_theorem(const IFSystem& sys, const BoxGrid& grid, double eps,
                                             const CheckOptions& options = {});

struct ProductReport {
  std::vector<bool> power_transitive;  // n = 1..n_max
  bool premise_holds = false;
  bool product_built = false;
  std::size_t product_nodes = 0;
  std::size_t product_edges = 0;
  bool product_transitive = false;
  std::optional<std::size_t> product_k;
};

/// Checks F^n transitive for n = 1..n_max, then analyzes the graph of F x F
/// assembled from the F graph.
ProductReport product_transitivity_check(const IFSystem& sys, std::size_t n_max, const BoxGrid& grid, double eps,
                                         const CheckOptions& options = {});

}  // namespace chainscope
