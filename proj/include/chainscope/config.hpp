#pragma once

// Plain-text run configuration: one directive per line followed by
// key=value pairs, '#' starts a comment. See docs/config.md for the grammar.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainscope/chaingraph.hpp"
#include "chainscope/ifs.hpp"
#include "chainscope/space.hpp"

namespace chainscope {

/// Malformed configuration; the message names the source line and key.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::size_t line, std::string key, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

struct OdometerConfig {
  std::vector<std::uint32_t> alpha;
  std::size_t depth = 0;
  std::optional<std::uint32_t> tail;
};

struct ScanConfig {
  double eps0 = 0.1;
  double ratio = 0.5;
  std::size_t levels = 3;
  double res_factor = 4.0;
  /// Explicit decreasing list; overrides eps0/ratio/levels when non-empty.
  std::vector<double> epsilons;
  /// Boxes sampled by the semiconjugacy check.
  std::size_t samples = 256;

  std::vector<double> schedule() const;
};

struct Caps {
  std::size_t maps = kDefaultMapCap;
  std::size_t product_nodes = kDefaultProductNodeCap;
  std::size_t mixing_nodes = 1024;
  std::size_t frontier = std::size_t{1} << 24;
  std::size_t odometer_points = kDefaultOdometerCap;
};

struct ShadowConfig {
  std::vector<Point> chain;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::size_t chains = 100;
  std::size_t max_length = 20;
};

struct CheckConfig {
  bool equivalence = true;
  bool product = false;
  std::size_t n_max = 2;
};

struct OutputConfig {
  std::string out;
  std::string dot;
  std::string csv;
};

struct RunConfig {
  std::string source;
  std::optional<SpaceKind> space;
  /// Per-axis resolution from `res=`; empty means derived from epsilon.
  std::vector<std::size_t> resolution;
  std::vector<MapSpec> maps;
  std::optional<OdometerConfig> odometer;
  std::optional<double> epsilon;
  std::optional<ScanConfig> scan;
  SlackMode mode{};
  Caps caps{};
  ShadowConfig shadow{};
  CheckConfig check{};
  OutputConfig output{};
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  bool is_odometer() const { return odometer.has_value(); }

  /// The epsilon for single-level work: `analysis epsilon`, else the first scan level.
  double analysis_epsilon() const;

  IFSystem system() const;
  /// Grid at `eps`: the configured resolution if any, else h <= eps / res_factor.
  BoxGrid grid(double eps) const;
  Odometer make_odometer() const;
};

RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Points separated by ',' with product coordinates joined by ':'.
std::vector<Point> parse_points(const std::string& text);

}  // namespace chainscope
