#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CHAINSCOPE_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(CHAINSCOPE_CONFIGS) + "/" + name; }

fs::path scratch() {
  auto dir = fs::temp_directory_path() / "chainscope_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  auto path = scratch() / name;
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// report with the echoed config fields that flags override removed
nlohmann::json without_overrides(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  j["config"].erase("threads");
  j["config"].erase("output");
  return j;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = 0; (pos = text.find(needle, pos)) != std::string::npos; pos += needle.size()) ++n;
  return n;
}

}  // namespace

TEST_CASE("analyze the bundled configs") {
  auto rot = run("analyze --config " + config("rotations.cfg"));
  REQUIRE(rot.code == 0);
  auto j = nlohmann::json::parse(rot.out);
  CHECK(j["command"] == "analyze");
  CHECK(j["transitive"] == true);
  CHECK(j["k"] == 1);
  CHECK(j["verdict"]["kind"] == "ChainMixing");

  auto tent = run("analyze --config " + config("tent_pair.cfg"));
  REQUIRE(tent.code == 0);
  auto t = nlohmann::json::parse(tent.out);
  CHECK(t["k"] == 1);
  CHECK(t["equivalence"]["all_agree"] == true);

  auto odo = run("odometer --config " + config("dyadic_odometer.cfg"));
  REQUIRE(odo.code == 0);
  auto o = nlohmann::json::parse(odo.out);
  CHECK(o["single_cycle"] == true);
  CHECK(o["scan"]["verdict"]["kind"] == "OdometerLike");
  CHECK(o["scan"]["verdict"]["alpha"] == nlohmann::json::array({2, 2, 2, 2, 2}));
}

TEST_CASE("repeated runs are byte-identical") {
  for (const char* name : {"rotations.cfg", "tent_pair.cfg"}) {
    auto a = run("analyze --config " + config(name));
    auto b = run("analyze --config " + config(name) + " --threads 3");
    REQUIRE(a.code == 0);
    CHECK(a.out == run("analyze --config " + config(name)).out);
    CHECK(without_overrides(a.out) == without_overrides(b.out));
  }
  auto a = run("scan --config " + config("dyadic_odometer.cfg"));
  auto b = run("scan --config " + config("dyadic_odometer.cfg"));
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("--out writes the same report") {
  auto path = scratch() / "rot.json";
  fs::remove(path);
  auto to_stdout = run("analyze --config " + config("rotations.cfg"));
  auto to_file = run("analyze --config " + config("rotations.cfg") + " --out " + path.string());
  REQUIRE(to_file.code == 0);
  CHECK(to_file.out.empty());
  CHECK(without_overrides(slurp(path)) == without_overrides(to_stdout.out));
}

TEST_CASE("export: DOT arrows match CSV rows") {
  auto dot = scratch() / "tent.dot";
  auto csv = scratch() / "tent.csv";
  auto r = run("export --config " + config("tent_pair.cfg") + " --dot " + dot.string() + " --csv " + csv.string());
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  const std::string d = slurp(dot);
  const std::string c = slurp(csv);
  const std::size_t rows = count(c, "\n") - 1;
  CHECK(count(d, "->") == rows);
  CHECK(rows == j["edges"].get<std::size_t>());
}

TEST_CASE("export: quarter rotation on four boxes is a 4-cycle") {
  auto cfg = write_file("quarter.cfg", "space kind=circle res=4\nmap rotation angle=0.25\nanalysis epsilon=0.1\n");
  auto dot = scratch() / "quarter.dot";
  REQUIRE(run("export --config " + cfg.string() + " --dot " + dot.string()).code == 0);
  const std::string d = slurp(dot);
  CHECK(count(d, "->") == 4);
  for (int i = 0; i < 4; ++i) CHECK(d.find("  " + std::to_string(i) + " -> " + std::to_string((i + 1) % 4) + " ") != std::string::npos);
  auto j = nlohmann::json::parse(run("analyze --config " + cfg.string()).out);
  CHECK(j["k"] == 4);
}

TEST_CASE("shadow subcommand") {
  auto r = run("shadow --config " + config("rotations.cfg") + " --chain 0,0.25,0.5 --eps 0.05 --delta 0.01");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["mode"] == "search");
  CHECK(j["found"] == true);
  CHECK(j["word"] == "0,0");
  CHECK(j["replay_within_bound"] == true);

  auto spot = nlohmann::json::parse(run("shadow --config " + config("rotations.cfg")).out);
  CHECK(spot["mode"] == "spot_check");
  CHECK(spot["passed"] == false);
  CHECK(spot["failing_chain"]["kind"] == "drift");
}

TEST_CASE("exit codes") {
  auto bad = write_file("bad.cfg", "space kind=circle\nmap rotation angle=zero\nanalysis epsilon=0.1\n");
  CHECK(run("analyze --config " + bad.string()).code == 1);
  CHECK(run("analyze --config " + (scratch() / "missing.cfg").string()).code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("").code == 1);
  CHECK(run("--version").code == 0);
  CHECK(run("odometer --config " + config("rotations.cfg")).code == 1);
  CHECK(run("shadow --config " + config("rotations.cfg") + " --chain 0,0.5 --eps -1").code == 1);

  auto flat = write_file("contract.cfg", "space kind=interval lo=0 hi=1 res=64\nmap affine a=0.5 b=0\nscan eps0=0.05 ratio=0.5 levels=2\n");
  CHECK(run("scan --config " + flat.string()).code == 2);

  auto capped = write_file("capped.cfg", "space kind=circle res=64\nmap rotation angle=0.25\nanalysis epsilon=0.1\ncaps frontier=2\n");
  CHECK(run("shadow --config " + capped.string() + " --chain 0,0.25").code == 3);
}
