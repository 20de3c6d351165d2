#pragma once

// Empirical shadowing: searches for true-orbit witnesses near pseudo-orbits,
// a randomized spot-check of the shadowing property, and the transfer from a
// chain-mixing certificate to topological-mixing witnesses.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chainscope/analysis.hpp"
#include "chainscope/ifs.hpp"
#include "chainscope/space.hpp"

namespace chainscope {

struct ShadowQuery {
  PseudoOrbit chain;
  /// Target shadowing distance.
  double epsilon = 0.0;
  /// Tolerance of the chain, echoed into reports.
  double delta = 0.0;
};

struct ShadowResult {
  bool found = false;
  std::optional<Word> word;
  std::optional<BoxIndex> start_box;
  /// Boxes visited by the witness, one per chain point.
  std::vector<BoxIndex> box_path;
  /// Number of chain points matched before the search ran dry.
  std::size_t depth_reached = 0;
  /// max_i dist(orbit(word, center(start_box))_i, x_i).
  std::optional<double> exact_replay_deviation;
};

inline constexpr std::size_t kDefaultFrontierCap = std::size_t{1} << 24;

/// Layered search over (box, step): start from the boxes within epsilon of
/// x_0; from box b admit (l, b') with b' the box of f_l(center(b)) when
/// center(b') is within epsilon of the next chain point. The witness is the
/// lexicographically least word, then the least start box.
ShadowResult shadow_search(const IFSystem& sys, const BoxGrid& grid, const ShadowQuery& q,
                           std::size_t frontier_cap = kDefaultFrontierCap);

struct SpotCheckOptions {
  std::size_t chains = 100;
  std::size_t max_length = 20;
  /// Chain tolerance; 0 means epsilon / 10.
  double delta = 0.0;
  /// Deterministic chains drifting by delta/2 per step, long enough that an
  /// isometry cannot shadow them.
  std::size_t drift_probes = 4;
  std::uint64_t seed = 1;
};

struct SpotCheckReport {
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t random_total = 0;
  std::size_t random_shadowed = 0;
  std::size_t drift_total = 0;
  std::size_t drift_shadowed = 0;
  bool passed = false;
  std::optional<PseudoOrbit> failing_chain;
  std::string failing_kind;
};

/// Random delta-chain of `steps` steps: uniform start, uniform symbols,
/// uniform perturbations of size < delta.
PseudoOrbit random_chain(const IFSystem& sys, std::size_t steps, double delta, std::uint64_t seed);

/// Chain from x0 following symbols 0,1,2,... cyclically with a constant
/// +shift added to every coordinate after each step.
PseudoOrbit drift_chain(const IFSystem& sys, const Point& x0, std::size_t steps, double shift);

SpotCheckReport shadowing_spot_check(const IFSystem& sys, const BoxGrid& grid, double epsilon,
                                     const SpotCheckOptions& options = {});

struct BoxSetPair {
  std::vector<BoxIndex> from;  // U
  std::vector<BoxIndex> to;    // V
};

/// Boxes whose centers lie in [lo, hi] (1-D grids) or in the rectangle.
std::vector<BoxIndex> boxes_in(const BoxGrid& grid, double lo, double hi);
std::vector<BoxIndex> boxes_in(const BoxGrid& grid, double lo0, double hi0, double lo1, double hi1);

struct TransferWitness {
  std::size_t pair = 0;
  std::size_t length = 0;
  bool found = false;
  Word word;
  /// Exact start point in U; its exact image under `word` lies in end_box.
  Point start;
  BoxIndex start_box = 0;
  BoxIndex end_box = 0;
  /// Sub-cells per box axis used by the search (1: box centers only).
  std::size_t refinement = 1;
};

struct TransferOptions {
  SpotCheckOptions spot{};
  std::size_t window = 3;
  SlackMode mode{};
  std::size_t threads = 1;
  std::size_t mixing_node_cap = kDefaultMixingNodeCap;
};

struct TransferReport {
  bool refused = false;
  std::string refusal;
  SpotCheckReport spot;
  std::optional<std::size_t> N;
  std::vector<TransferWitness> witnesses;
  std::size_t found = 0;
  double success_rate = 0.0;
};

inline constexpr std::size_t kDefaultWitnessCells = std::size_t{1} << 20;

/// Word of exact length n and a point of U carried exactly into a box of V,
/// by forward search over exact images with one representative per cell.
/// Cells start as the boxes and are halved per axis until a witness is found
/// or the cell count would pass `max_cells`.
std::optional<TransferWitness> forward_image_witness(const IFSystem& sys, const BoxGrid& grid, const BoxSetPair& pair,
                                                     std::size_t length, std::size_t max_cells = kDefaultWitnessCells);

/// Gated on the shadowing spot-check and a mixing certificate at (grid, eps);
/// for each pair and each n in N+1 .. N+window exhibits a witness word.
TransferReport mixing_transfer_check(const IFSystem& sys, const BoxGrid& grid, double epsilon,
                                     const std::vector<BoxSetPair>& pairs, const TransferOptions& options = {});

}  // namespace chainscope
