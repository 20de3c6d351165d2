#include "chainscope/report.hpp"

#include <fstream>

#include "chainscope/error.hpp"
#include "chainscope/shadowing.hpp"

namespace chainscope {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Json space_json(const SpaceKind& s) {
  return std::visit(overloaded{[](const Interval& iv) { return Json{{"kind", "interval"}, {"lo", iv.lo}, {"hi", iv.hi}}; },
                               [](const Circle&) { return Json{{"kind", "circle"}}; },
                               [](const Product& p) {
                                 return Json{{"kind", "product"},
                                             {"left", space_json(*p.left)},
                                             {"right", space_json(*p.right)}};
                               }},
                    s.kind());
}

Json map_json(const MapSpec& m) {
  return std::visit(
      overloaded{[](const Rotation& r) { return Json{{"type", "rotation"}, {"angle", r.angle}}; },
                 [](const Affine& a) { return Json{{"type", "affine"}, {"a", a.a}, {"b", a.b}}; },
                 [](const PiecewiseLinear& p) {
                   Json pts = Json::array();
                   for (auto [x, y] : p.points) pts.push_back({x, y});
                   return Json{{"type", "pwl"}, {"points", pts}};
                 },
                 [](const ProductMap& p) {
                   return Json{{"type", "product"}, {"left", map_json(*p.left)}, {"right", map_json(*p.right)}};
                 },
                 [](const Composed& c) {
                   Json steps = Json::array();
                   for (const auto& s : c.steps) steps.push_back(map_json(s));
                   return Json{{"type", "composed"}, {"steps", steps}};
                 }},
      m.kind());
}

Json verdict_json(const Verdict& v) {
  Json j{{"kind", to_string(v.kind)}, {"text", v.describe()}};
  if (v.kind == VerdictKind::CyclicFactor) j["k"] = v.k;
  if (v.kind == VerdictKind::OdometerLike) j["alpha"] = v.alpha;
  return j;
}

Json optional_json(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }

Json header(const RunConfig& cfg, const char* command) {
  return Json{{"version", kVersion}, {"command", command}, {"seed", cfg.seed}};
}

AnalyzeOptions analyze_options(const RunConfig& cfg) {
  AnalyzeOptions o;
  o.mixing_node_cap = cfg.caps.mixing_nodes;
  return o;
}

CheckOptions check_options(const RunConfig& cfg) {
  CheckOptions o;
  o.mode = cfg.mode;
  o.threads = cfg.threads;
  o.mixing_node_cap = cfg.caps.mixing_nodes;
  o.product_node_cap = cfg.caps.product_nodes;
  o.map_cap = cfg.caps.maps;
  return o;
}

ScanSchedule schedule_of(const RunConfig& cfg) {
  ScanSchedule s;
  s.eps0 = cfg.scan->eps0;
  s.ratio = cfg.scan->ratio;
  s.levels = cfg.scan->levels;
  s.res_factor = cfg.scan->res_factor;
  s.mode = cfg.mode;
  s.threads = cfg.threads;
  return s;
}

OdoIFS odometer_system(const RunConfig& cfg) { return as_finite_system(cfg.make_odometer(), cfg.caps.odometer_points); }

// Scan plus, for odometer-like verdicts, the factor coding and its semiconjugacy check.
template <class System>
Json scan_with_factor(const RunConfig& cfg, const System& sys, const ScanResult& scan) {
  Json j = scan_json(scan);
  if (scan.verdict.kind != VerdictKind::OdometerLike) return j;
  const FactorCoding coding = build_factor_coding(scan);
  const auto sc = check_semiconjugacy(sys, coding, coding.odometer(), cfg.scan->samples, cfg.seed);
  Json codes = Json::array();
  for (const auto& c : coding.codes) codes.push_back(format_digits(c));
  j["factor"] = {{"depth", coding.depth}, {"alpha", coding.alpha}, {"codes", codes}};
  j["semiconjugacy"] = {{"checked", sc.checked}, {"violations", sc.violations}, {"examples", sc.examples}};
  return j;
}

Json scan_section(const RunConfig& cfg) {
  if (!cfg.scan) throw DomainError("config has no scan block");
  if (cfg.is_odometer()) {
    const OdoIFS sys = odometer_system(cfg);
    return scan_with_factor(cfg, sys, epsilon_scan(sys, cfg.scan->schedule()));
  }
  const IFSystem sys = cfg.system();
  return scan_with_factor(cfg, sys, epsilon_scan(sys, schedule_of(cfg)));
}

Verdict single_level_verdict(const ChainAnalysis& a) {
  Verdict v;
  if (a.is_chain_transitive && a.k_epsilon == 1u && a.mixing) v.kind = VerdictKind::ChainMixing;
  return v;
}

}  // namespace

Json config_json(const RunConfig& cfg) {
  Json j;
  j["source"] = cfg.source;
  if (cfg.odometer) {
    j["odometer"] = {{"alpha", cfg.odometer->alpha},
                     {"depth", cfg.odometer->depth},
                     {"tail", cfg.odometer->tail ? Json(*cfg.odometer->tail) : Json(nullptr)}};
  } else {
    j["space"] = space_json(*cfg.space);
    j["resolution"] = cfg.resolution.empty() ? Json("auto") : Json(cfg.resolution);
    Json maps = Json::array();
    for (const auto& m : cfg.maps) maps.push_back(map_json(m));
    j["maps"] = maps;
  }
  j["epsilon"] = cfg.epsilon ? Json(*cfg.epsilon) : Json(nullptr);
  if (cfg.scan) {
    j["scan"] = {{"eps0", cfg.scan->eps0},
                 {"ratio", cfg.scan->ratio},
                 {"levels", cfg.scan->levels},
                 {"res_factor", cfg.scan->res_factor},
                 {"epsilons", cfg.scan->schedule()},
                 {"samples", cfg.scan->samples}};
  } else {
    j["scan"] = nullptr;
  }
  j["mode"] = {{"kind", to_string(cfg.mode.kind)},
               {"slack", cfg.mode.slack ? Json(*cfg.mode.slack) : Json("default")}};
  j["caps"] = {{"maps", cfg.caps.maps},
               {"product_nodes", cfg.caps.product_nodes},
               {"mixing_nodes", cfg.caps.mixing_nodes},
               {"frontier", cfg.caps.frontier},
               {"odometer_points", cfg.caps.odometer_points}};
  Json chain = Json::array();
  for (const auto& p : cfg.shadow.chain) chain.push_back(to_string(p));
  j["shadow"] = {{"chain", chain},
                 {"epsilon", cfg.shadow.epsilon ? Json(*cfg.shadow.epsilon) : Json(nullptr)},
                 {"delta", cfg.shadow.delta ? Json(*cfg.shadow.delta) : Json(nullptr)},
                 {"chains", cfg.shadow.chains},
                 {"max_length", cfg.shadow.max_length}};
  j["check"] = {{"equivalence", cfg.check.equivalence}, {"product", cfg.check.product}, {"n_max", cfg.check.n_max}};
  j["output"] = {{"out", cfg.output.out}, {"dot", cfg.output.dot}, {"csv", cfg.output.csv}};
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  return j;
}

Json analysis_json(const ChainAnalysis& a) {
  Json j;
  j["nodes"] = a.node_count;
  j["scc_count"] = a.sccs.size();
  j["recurrent"] = a.is_chain_recurrent;
  j["recurrent_boxes"] = a.recurrent_boxes.size();
  j["transitive"] = a.is_chain_transitive;
  j["k"] = optional_json(a.k_epsilon);
  j["classes"] = a.cyclic_classes ? Json(*a.cyclic_classes) : Json(nullptr);
  j["mixing_N"] = a.mixing ? Json(a.mixing->N) : Json(nullptr);
  if (a.mixing) {
    j["mixing_method"] = to_string(a.mixing->method);
  } else if (!a.mixing_failure.empty()) {
    j["mixing_failure"] = a.mixing_failure;
  }
  j["warnings"] = a.warnings;
  return j;
}

Json scan_json(const ScanResult& scan) {
  Json j;
  j["epsilons"] = scan.epsilons;
  j["ks"] = scan.ks;
  j["verdict"] = verdict_json(scan.verdict);
  Json levels = Json::array();
  for (const auto& l : scan.levels) {
    levels.push_back({{"epsilon", l.epsilon},
                      {"resolution", l.resolution},
                      {"boxes", l.boxes},
                      {"edges", l.edges},
                      {"k", l.k},
                      {"classes", l.classes}});
  }
  j["levels"] = levels;
  j["odometer_levels"] = scan.odometer_levels;
  if (scan.class_mixing) {
    const auto& c = *scan.class_mixing;
    Json transitive = Json::array();
    for (bool b : c.class_transitive) transitive.push_back(b);
    j["class_mixing"] = {{"k", c.k},
                         {"class_transitive", transitive},
                         {"class_period", c.class_period},
                         {"all_mixing", c.all_mixing}};
  }
  return j;
}

ChainGraph build_graph(const RunConfig& cfg) { return build_graph(cfg, cfg.analysis_epsilon()); }

ChainGraph build_graph(const RunConfig& cfg, double eps) {
  if (cfg.is_odometer()) return build(odometer_system(cfg), eps);
  return build(cfg.system(), cfg.grid(eps), eps, cfg.mode, cfg.threads);
}

AnalyzeRun run_analyze(const RunConfig& cfg) {
  AnalyzeRun run;
  Json j = header(cfg, "analyze");
  j["config"] = config_json(cfg);
  const double eps = cfg.analysis_epsilon();
  run.graph = build_graph(cfg, eps);
  const ChainAnalysis a = analyze(run.graph, analyze_options(cfg));

  j["epsilon"] = eps;
  if (const auto* grid = run.graph.grid()) {
    j["resolution"] = grid->resolution();
  } else {
    j["resolution"] = Json::array({run.graph.node_count()});
  }
  j["boxes"] = run.graph.node_count();
  j["edges"] = run.graph.edge_count();
  j["mode"] = to_string(run.graph.mode());
  j["slack"] = run.graph.slack();
  j["transitive"] = a.is_chain_transitive;
  j["recurrent"] = a.is_chain_recurrent;
  j["k"] = optional_json(a.k_epsilon);
  j["classes"] = a.cyclic_classes ? Json(*a.cyclic_classes) : Json(nullptr);
  j["mixing_N"] = a.mixing ? Json(a.mixing->N) : Json(nullptr);
  j["analysis"] = analysis_json(a);
  Json warnings = run.graph.warnings();
  for (const auto& w : a.warnings) warnings.push_back(w);
  j["warnings"] = warnings;

  if (!cfg.is_odometer() && cfg.check.equivalence) {
    const IFSystem sys = cfg.system();
    const auto* grid = run.graph.grid();
    const auto e = verify_equivalence_theorem(sys, *grid, eps, check_options(cfg));
    Json powers = Json::array();
    for (bool b : e.power_transitive) powers.push_back(b);
    j["equivalence"] = {{"recurrent", e.recurrent},
                        {"transitive", e.transitive},
                        {"totally_transitive", e.totally_transitive},
                        {"mixing", e.mixing},
                        {"all_agree", e.all_agree},
                        {"power_transitive", powers}};
  }
  if (!cfg.is_odometer() && cfg.check.product) {
    const IFSystem sys = cfg.system();
    const auto p = product_transitivity_check(sys, cfg.check.n_max, *run.graph.grid(), eps, check_options(cfg));
    Json powers = Json::array();
    for (bool b : p.power_transitive) powers.push_back(b);
    j["product"] = {{"power_transitive", powers},
                    {"premise_holds", p.premise_holds},
                    {"built", p.product_built},
                    {"nodes", p.product_nodes},
                    {"edges", p.product_edges},
                    {"transitive", p.product_transitive},
                    {"k", optional_json(p.product_k)}};
  }
  if (cfg.scan) {
    j["scan"] = scan_section(cfg);
    j["verdict"] = j["scan"]["verdict"];
  } else {
    j["verdict"] = verdict_json(single_level_verdict(a));
  }
  run.report = std::move(j);
  return run;
}

Json run_scan(const RunConfig& cfg) {
  Json j = header(cfg, "scan");
  j["config"] = config_json(cfg);
  Json s = scan_section(cfg);
  for (auto& [k, v] : s.items()) j[k] = v;
  return j;
}

Json run_shadow(const RunConfig& cfg) {
  if (cfg.is_odometer()) throw DomainError("shadow needs an IFS config, not an odometer");
  const IFSystem sys = cfg.system();
  const double eps = cfg.shadow.epsilon.value_or(cfg.analysis_epsilon());
  const double delta = cfg.shadow.delta.value_or(eps / 10.0);
  const BoxGrid grid = cfg.grid(eps);
  Json j = header(cfg, "shadow");
  j["config"] = config_json(cfg);
  j["epsilon"] = eps;
  j["delta"] = delta;
  j["resolution"] = grid.resolution();
  j["note"] = "empirical check on a box grid, not a proof of shadowing";

  if (!cfg.shadow.chain.empty()) {
    PseudoOrbit chain{cfg.shadow.chain, delta};
    const ChainCheck valid = validate_chain(sys, chain, delta);
    const ShadowResult r = shadow_search(sys, grid, ShadowQuery{chain, eps, delta}, cfg.caps.frontier);
    j["mode"] = "search";
    j["chain_valid"] = valid.valid;
    j["found"] = r.found;
    j["word"] = r.word ? Json(format_word(*r.word)) : Json(nullptr);
    j["start_box"] = r.start_box ? Json(*r.start_box) : Json(nullptr);
    j["box_path"] = r.box_path;
    j["depth_reached"] = r.depth_reached;
    j["exact_replay_deviation"] = r.exact_replay_deviation ? Json(*r.exact_replay_deviation) : Json(nullptr);
    // box centers are re-seeded every step, so a hit is only a true orbit
    // when its exact replay stays within eps + h
    j["replay_within_bound"] =
        r.exact_replay_deviation ? Json(*r.exact_replay_deviation <= eps + grid.diameter() + 1e-12) : Json(nullptr);
    return j;
  }
  SpotCheckOptions opts;
  opts.chains = cfg.shadow.chains;
  opts.max_length = cfg.shadow.max_length;
  opts.delta = delta;
  opts.seed = cfg.seed;
  const SpotCheckReport r = shadowing_spot_check(sys, grid, eps, opts);
  j["mode"] = "spot_check";
  j["random"] = {{"total", r.random_total}, {"shadowed", r.random_shadowed}};
  j["drift"] = {{"total", r.drift_total}, {"shadowed", r.drift_shadowed}};
  j["passed"] = r.passed;
  if (r.failing_chain) {
    Json pts = Json::array();
    for (const auto& p : r.failing_chain->points) pts.push_back(to_string(p));
    j["failing_chain"] = {{"kind", r.failing_kind}, {"points", pts}};
  }
  return j;
}

Json run_odometer(const RunConfig& cfg) {
  if (!cfg.is_odometer()) throw DomainError("odometer needs an 'odometer' block in the config");
  const Odometer odo = cfg.make_odometer();
  const OdoIFS sys = odometer_system(cfg);
  Json j = header(cfg, "odometer");
  j["config"] = config_json(cfg);
  j["alpha"] = odo.alpha();
  j["depth"] = odo.depth();
  j["size"] = odo.size();

  // the truncated adding machine is one cycle through every digit string
  std::vector<char> seen(odo.size(), 0);
  DigitString x = odo.zero();
  std::size_t steps = 0;
  bool single_cycle = true;
  do {
    const std::size_t i = odo.index_of(x);
    if (seen[i]) {
      single_cycle = false;
      break;
    }
    seen[i] = 1;
    x = g_alpha(odo, x);
    ++steps;
  } while (x != odo.zero());
  single_cycle = single_cycle && steps == odo.size();
  j["single_cycle"] = single_cycle;
  j["orbit_length"] = steps;

  if (cfg.epsilon) {
    const ChainGraph g = build(sys, *cfg.epsilon);
    const ChainAnalysis a = analyze(g, analyze_options(cfg));
    j["analysis"] = analysis_json(a);
    j["analysis"]["epsilon"] = *cfg.epsilon;
  }
  if (cfg.scan) j["scan"] = scan_section(cfg);
  return j;
}

Json run_export(const RunConfig& cfg) {
  const double eps = cfg.analysis_epsilon();
  const ChainGraph g = build_graph(cfg, eps);
  Json j = header(cfg, "export");
  j["config"] = config_json(cfg);
  j["epsilon"] = eps;
  j["nodes"] = g.node_count();
  j["edges"] = g.edge_count();
  j["warnings"] = g.warnings();
  auto write = [&](const std::string& path, auto writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + path + "'");
    writer(g, os);
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
  };
  if (!cfg.output.dot.empty()) write(cfg.output.dot, [](const ChainGraph& g, std::ostream& os) { write_dot(g, os); });
  if (!cfg.output.csv.empty()) write(cfg.output.csv, [](const ChainGraph& g, std::ostream& os) { write_csv(g, os); });
  j["dot"] = cfg.output.dot.empty() ? Json(nullptr) : Json(cfg.output.dot);
  j["csv"] = cfg.output.csv.empty() ? Json(nullptr) : Json(cfg.output.csv);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace chainscope
