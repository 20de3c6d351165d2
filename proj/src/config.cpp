#include "chainscope/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chainscope/error.hpp"

namespace chainscope {

ParseError::ParseError(std::string source, std::size_t line, std::string key, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": key '" + key + "': " + message),
      line_(line),
      key_(std::move(key)) {}

std::vector<double> ScanConfig::schedule() const {
  if (!epsilons.empty()) return epsilons;
  std::vector<double> out;
  for (std::size_t i = 0; i < levels; ++i) out.push_back(eps0 * std::pow(ratio, static_cast<double>(i)));
  return out;
}

namespace {

struct Line {
  std::size_t number = 0;
  std::string directive;
  std::vector<std::string> bare;
  std::map<std::string, std::string> kv;
  std::vector<std::string> kv_order;
};

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const Line& l, const std::string& key, const std::string& msg) const {
    throw ParseError(source_, l.number, key, msg);
  }

  Line tokenize(std::size_t number, const std::string& raw) const {
    Line l;
    l.number = number;
    std::istringstream ss(raw);
    std::string tok;
    ss >> l.directive;
    while (ss >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) {
        l.bare.push_back(tok);
        continue;
      }
      std::string key = tok.substr(0, eq);
      if (key.empty()) fail(l, tok, "missing key before '='");
      if (l.kv.count(key)) fail(l, key, "given twice");
      l.kv[key] = tok.substr(eq + 1);
      l.kv_order.push_back(key);
    }
    return l;
  }

  void allow(const Line& l, std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& k : l.kv_order)
      if (!ok.count(k)) fail(l, k, "unknown key for '" + l.directive + "'");
  }

  const std::string& need(const Line& l, const std::string& key) const {
    auto it = l.kv.find(key);
    if (it == l.kv.end()) fail(l, key, "required by '" + l.directive + "'");
    if (it->second.empty()) fail(l, key, "empty value");
    return it->second;
  }

  double number(const Line& l, const std::string& key, const std::string& text) const {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v))
      fail(l, key, "not a number: '" + text + "'");
    return v;
  }

  std::uint64_t integer(const Line& l, const std::string& key, const std::string& text) const {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) fail(l, key, "not a non-negative integer: '" + text + "'");
    return v;
  }

  std::size_t positive(const Line& l, const std::string& key, const std::string& text) const {
    auto v = integer(l, key, text);
    if (v == 0) fail(l, key, "must be positive");
    return static_cast<std::size_t>(v);
  }

  std::vector<std::string> split(const std::string& text, char sep) const {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
      if (c == sep) {
        out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    out.push_back(cur);
    return out;
  }

  bool flag(const Line& l, const std::string& key, const std::string& text) const {
    if (text == "on" || text == "true" || text == "1") return true;
    if (text == "off" || text == "false" || text == "0") return false;
    fail(l, key, "expected on/off, got '" + text + "'");
  }

  // --- spaces and maps ----------------------------------------------------

  std::pair<SpaceKind, std::optional<std::size_t>> simple_space(const Line& l) const {
    allow(l, {"kind", "lo", "hi", "res"});
    const auto& kind = need(l, "kind");
    std::optional<std::size_t> res;
    if (l.kv.count("res")) res = positive(l, "res", l.kv.at("res"));
    if (kind == "interval") {
      const double lo = number(l, "lo", need(l, "lo"));
      const double hi = number(l, "hi", need(l, "hi"));
      if (!(lo < hi)) fail(l, "hi", "interval needs lo < hi");
      return {SpaceKind::interval(lo, hi), res};
    }
    if (kind == "circle") {
      if (l.kv.count("lo") || l.kv.count("hi")) fail(l, l.kv.count("lo") ? "lo" : "hi", "circles take no bounds");
      return {SpaceKind::circle(), res};
    }
    if (kind == "product") fail(l, "kind", "a product factor must be an interval or a circle");
    fail(l, "kind", "unknown space kind '" + kind + "'");
  }

  MapSpec simple_map(const Line& l, std::size_t type_at) const {
    if (l.bare.size() <= type_at) fail(l, "type", "map type missing");
    if (l.bare.size() > type_at + 1) fail(l, l.bare[type_at + 1], "unexpected token");
    const auto& type = l.bare[type_at];
    if (type == "rotation") {
      allow(l, {"angle"});
      return MapSpec::rotation(number(l, "angle", need(l, "angle")));
    }
    if (type == "affine") {
      allow(l, {"a", "b"});
      return MapSpec::affine(number(l, "a", need(l, "a")), number(l, "b", need(l, "b")));
    }
    if (type == "pwl") {
      allow(l, {"points"});
      std::vector<std::pair<double, double>> pts;
      for (const auto& pair : split(need(l, "points"), ';')) {
        auto xy = split(pair, ',');
        if (xy.size() != 2) fail(l, "points", "breakpoint '" + pair + "' is not x,y");
        pts.emplace_back(number(l, "points", xy[0]), number(l, "points", xy[1]));
      }
      if (pts.size() < 2) fail(l, "points", "need at least two breakpoints");
      try {
        return MapSpec::piecewise_linear(std::move(pts));
      } catch (const DomainError& e) {
        fail(l, "points", e.what());
      }
    }
    fail(l, "type", "unknown map type '" + type + "'");
  }

  // --- blocks ---------------------------------------------------------------

  enum class Block { None, SpaceProduct, MapProduct, MapComposed };

  void close_block() {
    switch (block_) {
      case Block::None:
        return;
      case Block::SpaceProduct: {
        if (!left_space_ || !right_space_) fail(block_line_, left_space_ ? "right" : "left", "product space incomplete");
        cfg_.space = SpaceKind::product(left_space_->first, right_space_->first);
        if (left_space_->second.has_value() != right_space_->second.has_value())
          fail(block_line_, "res", "give res on both factors or neither");
        if (left_space_->second) cfg_.resolution = {*left_space_->second, *right_space_->second};
        break;
      }
      case Block::MapProduct:
        if (!left_map_ || !right_map_) fail(block_line_, left_map_ ? "right" : "left", "product map incomplete");
        cfg_.maps.push_back(MapSpec::product(*left_map_, *right_map_));
        map_lines_.push_back(block_line_.number);
        break;
      case Block::MapComposed:
        if (steps_.empty()) fail(block_line_, "step", "composed map without steps");
        cfg_.maps.push_back(MapSpec::composed(steps_));
        map_lines_.push_back(block_line_.number);
        break;
    }
    block_ = Block::None;
    left_space_.reset();
    right_space_.reset();
    left_map_.reset();
    right_map_.reset();
    steps_.clear();
  }

  void open_block(Block b, const Line& l) {
    block_ = b;
    block_line_ = l;
  }

  void handle(const Line& l) {
    const auto& d = l.directive;
    if (d == "left" || d == "right") {
      const bool left = d == "left";
      if (block_ == Block::SpaceProduct) {
        auto& slot = left ? left_space_ : right_space_;
        if (slot) fail(l, d, "given twice");
        if (!l.bare.empty()) fail(l, l.bare[0], "unexpected token");
        slot = simple_space(l);
        return;
      }
      if (block_ == Block::MapProduct) {
        auto& slot = left ? left_map_ : right_map_;
        if (slot) fail(l, d, "given twice");
        slot = simple_map(l, 0);
        return;
      }
      fail(l, d, "only valid after 'space kind=product' or 'map product'");
    }
    if (d == "step") {
      if (block_ != Block::MapComposed) fail(l, d, "only valid after 'map composed'");
      steps_.push_back(simple_map(l, 0));
      return;
    }
    close_block();

    if (d == "space") {
      if (seen_space_) fail(l, d, "given twice");
      seen_space_ = true;
      if (!l.bare.empty()) fail(l, l.bare[0], "unexpected token");
      if (need(l, "kind") == "product") {
        allow(l, {"kind"});
        open_block(Block::SpaceProduct, l);
        return;
      }
      auto [space, res] = simple_space(l);
      cfg_.space = space;
      if (res) cfg_.resolution = {*res};
    } else if (d == "map") {
      if (l.bare.empty()) fail(l, "type", "map type missing");
      if (l.bare[0] == "product" || l.bare[0] == "composed") {
        if (l.bare.size() > 1) fail(l, l.bare[1], "unexpected token");
        allow(l, {});
        open_block(l.bare[0] == "product" ? Block::MapProduct : Block::MapComposed, l);
        return;
      }
      cfg_.maps.push_back(simple_map(l, 0));
      map_lines_.push_back(l.number);
    } else if (d == "odometer") {
      if (cfg_.odometer) fail(l, d, "given twice");
      allow(l, {"alpha", "depth", "tail"});
      OdometerConfig o;
      for (const auto& part : split(need(l, "alpha"), ',')) {
        auto j = integer(l, "alpha", part);
        if (j < 2 || j > 0xffffffffu) fail(l, "alpha", "radix must be at least 2");
        o.alpha.push_back(static_cast<std::uint32_t>(j));
      }
      o.depth = l.kv.count("depth") ? positive(l, "depth", l.kv.at("depth")) : o.alpha.size();
      if (l.kv.count("tail")) {
        auto t = integer(l, "tail", l.kv.at("tail"));
        if (t < 2 || t > 0xffffffffu) fail(l, "tail", "radix must be at least 2");
        o.tail = static_cast<std::uint32_t>(t);
      }
      if (o.depth > o.alpha.size() && !o.tail) fail(l, "depth", "exceeds the alpha list and no tail is given");
      cfg_.odometer = o;
    } else if (d == "analysis") {
      allow(l, {"epsilon"});
      double e = number(l, "epsilon", need(l, "epsilon"));
      if (!(e > 0.0)) fail(l, "epsilon", "must be positive");
      cfg_.epsilon = e;
    } else if (d == "scan") {
      if (cfg_.scan) fail(l, d, "given twice");
      allow(l, {"eps0", "ratio", "levels", "res_factor", "epsilons", "samples"});
      ScanConfig s;
      if (l.kv.count("epsilons")) {
        for (const auto& part : split(l.kv.at("epsilons"), ',')) s.epsilons.push_back(number(l, "epsilons", part));
        for (std::size_t i = 0; i < s.epsilons.size(); ++i) {
          if (!(s.epsilons[i] > 0.0)) fail(l, "epsilons", "must be positive");
          if (i && !(s.epsilons[i] < s.epsilons[i - 1])) fail(l, "epsilons", "must be strictly decreasing");
        }
        for (const char* k : {"eps0", "ratio", "levels"})
          if (l.kv.count(k)) fail(l, k, "conflicts with epsilons");
      } else {
        s.eps0 = number(l, "eps0", need(l, "eps0"));
        s.ratio = number(l, "ratio", need(l, "ratio"));
        s.levels = positive(l, "levels", need(l, "levels"));
        if (!(s.eps0 > 0.0)) fail(l, "eps0", "must be positive");
        if (!(s.ratio > 0.0 && s.ratio < 1.0)) fail(l, "ratio", "must lie in (0,1) so the schedule decreases");
      }
      if (l.kv.count("res_factor")) {
        s.res_factor = number(l, "res_factor", l.kv.at("res_factor"));
        if (!(s.res_factor > 0.0)) fail(l, "res_factor", "must be positive");
      }
      if (l.kv.count("samples")) s.samples = positive(l, "samples", l.kv.at("samples"));
      cfg_.scan = s;
    } else if (d == "mode") {
      allow(l, {"slack"});
      if (l.bare.size() != 1) fail(l, "mode", "expected 'strict' or 'fattened'");
      if (l.bare[0] == "strict") {
        if (l.kv.count("slack")) fail(l, "slack", "only valid in fattened mode");
        cfg_.mode = SlackMode::strict();
      } else if (l.bare[0] == "fattened") {
        std::optional<double> slack;
        if (l.kv.count("slack")) {
          slack = number(l, "slack", l.kv.at("slack"));
          if (*slack < 0.0) fail(l, "slack", "must be non-negative");
        }
        cfg_.mode = SlackMode::fattened(slack);
      } else {
        fail(l, "mode", "expected 'strict' or 'fattened'");
      }
    } else if (d == "caps") {
      allow(l, {"maps", "product_nodes", "mixing_nodes", "frontier", "odometer_points"});
      auto& c = cfg_.caps;
      if (l.kv.count("maps")) c.maps = positive(l, "maps", l.kv.at("maps"));
      if (l.kv.count("product_nodes")) c.product_nodes = positive(l, "product_nodes", l.kv.at("product_nodes"));
      if (l.kv.count("mixing_nodes")) c.mixing_nodes = positive(l, "mixing_nodes", l.kv.at("mixing_nodes"));
      if (l.kv.count("frontier")) c.frontier = positive(l, "frontier", l.kv.at("frontier"));
      if (l.kv.count("odometer_points")) c.odometer_points = positive(l, "odometer_points", l.kv.at("odometer_points"));
    } else if (d == "shadow") {
      allow(l, {"chain", "epsilon", "delta", "chains", "max_length"});
      auto& s = cfg_.shadow;
      if (l.kv.count("chain")) {
        try {
          s.chain = parse_points(l.kv.at("chain"));
        } catch (const DomainError& e) {
          fail(l, "chain", e.what());
        }
      }
      if (l.kv.count("epsilon")) s.epsilon = number(l, "epsilon", l.kv.at("epsilon"));
      if (l.kv.count("delta")) s.delta = number(l, "delta", l.kv.at("delta"));
      if (s.epsilon && !(*s.epsilon > 0.0)) fail(l, "epsilon", "must be positive");
      if (s.delta && !(*s.delta > 0.0)) fail(l, "delta", "must be positive");
      if (l.kv.count("chains")) s.chains = positive(l, "chains", l.kv.at("chains"));
      if (l.kv.count("max_length")) s.max_length = positive(l, "max_length", l.kv.at("max_length"));
    } else if (d == "check") {
      allow(l, {"equivalence", "product", "n_max"});
      auto& c = cfg_.check;
      if (l.kv.count("equivalence")) c.equivalence = flag(l, "equivalence", l.kv.at("equivalence"));
      if (l.kv.count("product")) c.product = flag(l, "product", l.kv.at("product"));
      if (l.kv.count("n_max")) c.n_max = positive(l, "n_max", l.kv.at("n_max"));
    } else if (d == "output") {
      allow(l, {"out", "dot", "csv"});
      if (l.kv.count("out")) cfg_.output.out = l.kv.at("out");
      if (l.kv.count("dot")) cfg_.output.dot = l.kv.at("dot");
      if (l.kv.count("csv")) cfg_.output.csv = l.kv.at("csv");
    } else if (d == "run") {
      allow(l, {"seed", "threads"});
      if (l.kv.count("seed")) cfg_.seed = integer(l, "seed", l.kv.at("seed"));
      if (l.kv.count("threads")) cfg_.threads = positive(l, "threads", l.kv.at("threads"));
    } else {
      fail(l, d, "unknown directive");
    }
    if (d != "map" && d != "space" && !l.bare.empty() && d != "mode") fail(l, l.bare[0], "unexpected token");
  }

  void finish(std::size_t last_line) {
    close_block();
    Line end;
    end.number = last_line;
    if (cfg_.odometer) {
      if (cfg_.space || !cfg_.maps.empty()) fail(end, "odometer", "an odometer config takes no space or maps");
    } else {
      if (!cfg_.space) fail(end, "space", "missing");
      if (cfg_.maps.empty()) fail(end, "map", "at least one map is required");
      for (std::size_t i = 0; i < cfg_.maps.size(); ++i) {
        try {
          cfg_.maps[i].check_compatible(*cfg_.space);
        } catch (const DomainError& e) {
          Line at;
          at.number = map_lines_[i];
          fail(at, "map", "map " + std::to_string(i) + ": " + e.what());
        }
      }
    }
    if (!cfg_.epsilon && !cfg_.scan) fail(end, "analysis", "give 'analysis epsilon=' or a 'scan' schedule");
    if (!cfg_.odometer && cfg_.scan && !cfg_.scan->epsilons.empty())
      fail(end, "epsilons", "explicit epsilon lists apply to odometer scans only");
  }

  RunConfig run(std::istream& in) {
    cfg_.source = source_;
    std::string raw;
    std::size_t n = 0;
    while (std::getline(in, raw)) {
      ++n;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
      handle(tokenize(n, raw));
    }
    finish(n);
    return cfg_;
  }

 private:
  std::string source_;
  RunConfig cfg_;
  bool seen_space_ = false;
  Block block_ = Block::None;
  Line block_line_;
  std::optional<std::pair<SpaceKind, std::optional<std::size_t>>> left_space_, right_space_;
  std::optional<MapSpec> left_map_, right_map_;
  std::vector<MapSpec> steps_;
  std::vector<std::size_t> map_lines_;
};

}  // namespace

double RunConfig::analysis_epsilon() const {
  if (epsilon) return *epsilon;
  if (scan) return scan->schedule().front();
  throw DomainError("config has neither an analysis epsilon nor a scan");
}

IFSystem RunConfig::system() const {
  if (!space) throw DomainError("config has no space");
  return IFSystem(*space, maps);
}

BoxGrid RunConfig::grid(double eps) const {
  if (!space) throw DomainError("config has no space");
  if (!resolution.empty()) return BoxGrid(*space, resolution);
  return grid_for(*space, eps, scan ? scan->res_factor : 4.0);
}

Odometer RunConfig::make_odometer() const {
  if (!odometer) throw DomainError("config has no odometer");
  return Odometer(odometer->alpha, odometer->depth, odometer->tail);
}

RunConfig parse_config(std::istream& in, const std::string& source) { return Parser(source).run(in); }

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse_config(in, source);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_config(in, path);
}

std::vector<Point> parse_points(const std::string& text) {
  std::vector<Point> out;
  auto num = [&](const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
      throw DomainError("not a number: '" + s + "'");
    return v;
  };
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.emplace_back(num(item));
    } else {
      out.emplace_back(num(item.substr(0, colon)), num(item.substr(colon + 1)));
    }
  }
  if (out.empty()) throw DomainError("empty point list");
  return out;
}

}  // namespace chainscope
