#pragma once

// Pipelines behind the CLI subcommands. Each returns a JSON report that
// embeds the effective configuration, the seed and the version string.

#include <string>

#include "chainscope/analysis.hpp"
#include "chainscope/chaingraph.hpp"
#include "chainscope/config.hpp"
#include "json.hpp"

namespace chainscope {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "chainscope 0.1.0";

/// The configuration with every default expanded.
Json config_json(const RunConfig& cfg);

Json analysis_json(const ChainAnalysis& a);
Json scan_json(const ScanResult& scan);

/// The transition graph at `eps` (the analysis epsilon when omitted).
ChainGraph build_graph(const RunConfig& cfg);
ChainGraph build_graph(const RunConfig& cfg, double eps);

struct AnalyzeRun {
  Json report;
  ChainGraph graph;
};

AnalyzeRun run_analyze(const RunConfig& cfg);
Json run_scan(const RunConfig& cfg);
/// Searches the configured chain, or runs the shadowing spot-check when no chain is given.
Json run_shadow(const RunConfig& cfg);
Json run_odometer(const RunConfig& cfg);
/// Writes the configured DOT/CSV files and reports what was written.
Json run_export(const RunConfig& cfg);

/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& j);

}  // namespace chainscope
