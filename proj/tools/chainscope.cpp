// chainscope: command-line driver.
//
// Exit codes: 0 success, 1 parse or internal error, 2 hypothesis error,
// 3 resource cap exceeded.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "chainscope/config.hpp"
#include "chainscope/error.hpp"
#include "chainscope/report.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string dot;
  std::string csv;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  // shadow only
  std::string chain;
  std::optional<double> eps;
  std::optional<double> delta;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "run configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "write the JSON report here instead of stdout");
  cmd->add_option("--seed", f.seed, "override the configured seed");
  cmd->add_option("--threads", f.threads, "worker threads for graph construction")->check(CLI::PositiveNumber);
}

void add_graph_outputs(CLI::App* cmd, Flags& f) {
  cmd->add_option("--dot", f.dot, "write the transition graph as DOT");
  cmd->add_option("--csv", f.csv, "write the transition graph as an edge list");
}

chainscope::RunConfig effective(const Flags& f) {
  auto cfg = chainscope::load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  if (!f.out.empty()) cfg.output.out = f.out;
  if (!f.dot.empty()) cfg.output.dot = f.dot;
  if (!f.csv.empty()) cfg.output.csv = f.csv;
  if (!f.chain.empty()) cfg.shadow.chain = chainscope::parse_points(f.chain);
  if (f.eps) {
    if (!(*f.eps > 0.0)) throw chainscope::DomainError("--eps must be positive");
    cfg.shadow.epsilon = f.eps;
  }
  if (f.delta) {
    if (!(*f.delta > 0.0)) throw chainscope::DomainError("--delta must be positive");
    cfg.shadow.delta = f.delta;
  }
  return cfg;
}

void emit(const chainscope::RunConfig& cfg, const chainscope::Json& report) {
  const std::string text = chainscope::dump(report);
  if (cfg.output.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(cfg.output.out, std::ios::binary);
  if (!os || !(os << text)) throw std::runtime_error("cannot write '" + cfg.output.out + "'");
}

template <class Writer>
void write_graph(const std::string& path, Writer writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  writer(os);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chain-level dynamics of iterated function systems on box grids"};
  app.require_subcommand(1);
  app.set_version_flag("--version", chainscope::kVersion);

  Flags f;
  auto* analyze = app.add_subcommand("analyze", "build, analyze and check the transition graph");
  add_common(analyze, f);
  add_graph_outputs(analyze, f);
  auto* scan = app.add_subcommand("scan", "epsilon scan with verdict and factor coding");
  add_common(scan, f);
  auto* shadow = app.add_subcommand("shadow", "shadow a chain, or spot-check shadowing");
  add_common(shadow, f);
  shadow->add_option("--chain", f.chain, "points separated by ',' (x:y on products)");
  shadow->add_option("--eps", f.eps, "shadowing distance");
  shadow->add_option("--delta", f.delta, "chain tolerance");
  auto* odometer = app.add_subcommand("odometer", "adding-machine checks and scan");
  add_common(odometer, f);
  auto* exporter = app.add_subcommand("export", "write the transition graph as DOT/CSV");
  add_common(exporter, f);
  add_graph_outputs(exporter, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const auto cfg = effective(f);
    chainscope::Json report;
    if (analyze->parsed()) {
      auto run = chainscope::run_analyze(cfg);
      if (!cfg.output.dot.empty()) {
        write_graph(cfg.output.dot, [&](std::ostream& os) { chainscope::write_dot(run.graph, os); });
        run.report["dot"] = cfg.output.dot;
      }
      if (!cfg.output.csv.empty()) {
        write_graph(cfg.output.csv, [&](std::ostream& os) { chainscope::write_csv(run.graph, os); });
        run.report["csv"] = cfg.output.csv;
      }
      report = std::move(run.report);
    } else if (scan->parsed()) {
      report = chainscope::run_scan(cfg);
    } else if (shadow->parsed()) {
      report = chainscope::run_shadow(cfg);
    } else if (odometer->parsed()) {
      report = chainscope::run_odometer(cfg);
    } else {
      report = chainscope::run_export(cfg);
    }
    emit(cfg, report);
    return 0;
  } catch (const chainscope::HypothesisError& e) {
    std::cerr << "hypothesis error: " << e.what() << "\n";
    return 2;
  } catch (const chainscope::DiscretizationBreakdown& e) {
    std::cerr << "hypothesis error: " << e.what() << "\n";
    return 2;
  } catch (const chainscope::ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const chainscope::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
