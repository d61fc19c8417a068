#include "doctest.h"

#include "json.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string output;
};

// Runs the CLI with stdout and stderr captured.
Run binn(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" BINN_CLI_PATH "\" " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p) != nullptr) r.output += buf;
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t lines(const fs::path& p) {
  std::ifstream is(p);
  std::size_t n = 0;
  for (std::string l; std::getline(is, l);) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("binn_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("verify passes and is deterministic") {
  const Run a = binn("verify");
  CHECK(a.status == 0);
  CHECK(a.output.find("FAIL") == std::string::npos);
  CHECK(a.output.find("PASS") != std::string::npos);
  const Run b = binn("verify");
  CHECK(a.output == b.output);
}

TEST_CASE("verify catches a corrupted log constant") {
  const Run r = binn("verify --perturb-log-constant 1.5");
  CHECK(r.status != 0);
  CHECK(r.output.find("FAIL") != std::string::npos);
}

TEST_CASE("solve with zero iterations writes the initial-network artifacts") {
  const fs::path d = scratch("zero");
  const Run r = binn("solve --problem flow --iters 0 --out " + d.string());
  REQUIRE(r.status == 0);
  for (const char* f : {"checkpoint.txt", "loss.csv", "boundary.csv", "interior.csv", "metrics.json"}) {
    CHECK(fs::exists(d / f));
  }
  CHECK(lines(d / "loss.csv") == 2);
  CHECK(slurp(d / "loss.csv").rfind("iteration,loss\n", 0) == 0);
  const auto m = nlohmann::json::parse(slurp(d / "metrics.json"));
  for (const char* k : {"problem", "iterations", "final_loss", "boundary_rel_l2", "interior_rel_l2", "runtime_s"}) {
    CHECK(m.contains(k));
  }
  CHECK(m["problem"] == "flow");
  CHECK(m["iterations"] == 0);
  CHECK(m["boundary_rel_l2"].is_number());
  CHECK(lines(d / "boundary.csv") == 1001);
}

TEST_CASE("configuration errors exit with code 2") {
  const fs::path d = scratch("bad");
  Run r = binn("solve --problem flow --iters 0 --ng 9 --out " + d.string());
  CHECK(r.status == 2);
  CHECK(r.output.find("quadrature.ng") != std::string::npos);
  CHECK(r.output.find("even") != std::string::npos);
  r = binn("solve --problem nowhere --out " + d.string());
  CHECK(r.status == 2);
  CHECK(r.output.find("problem") != std::string::npos);
  r = binn("solve --problem flow --lr -1 --out " + d.string());
  CHECK(r.status == 2);
  CHECK(r.output.find("train.lr") != std::string::npos);
  std::ofstream(d / "bad.json") << "{\"train\": {\"iterations\": \"many\"}}";
  r = binn("solve --config " + (d / "bad.json").string());
  CHECK(r.status == 2);
  CHECK(r.output.find("train.iterations") != std::string::npos);
}

TEST_CASE("flags override the config file; BINN_OUT_DIR is the fallback") {
  const fs::path d = scratch("cfg");
  std::ofstream(d / "run.json") << R"({"problem": "flow", "train": {"iterations": 3, "seed": 4},
                                       "network": {"width": 6}})";
  const Run r = binn("solve --config " + (d / "run.json").string() + " --iters 2", "BINN_OUT_DIR=" + d.string());
  REQUIRE(r.status == 0);
  const auto m = nlohmann::json::parse(slurp(d / "metrics.json"));
  CHECK(m["iterations"] == 2);
  CHECK(slurp(d / "checkpoint.txt").find("arch 2 6 2 1") != std::string::npos);
}

TEST_CASE("identical runs give identical artifacts") {
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  REQUIRE(binn("solve --problem flow --iters 5 --width 8 --out " + a.string()).status == 0);
  REQUIRE(binn("solve --problem flow --iters 5 --width 8 --out " + b.string()).status == 0);
  for (const char* f : {"checkpoint.txt", "loss.csv", "boundary.csv", "interior.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("inline problem") {
  const fs::path d = scratch("inline");
  std::ofstream(d / "run.json") << R"({
    "problem": {"physics": "potential", "loops": [{"pieces": [
      {"circle": {"center": [0, 0], "radius": 0.5}, "segments": 16, "bc": {"type": "dirichlet", "value": 2.0}}]}]},
    "train": {"iterations": 2}, "network": {"width": 4}})";
  const Run r = binn("solve --config " + (d / "run.json").string() + " --out " + d.string());
  REQUIRE(r.status == 0);
  const auto m = nlohmann::json::parse(slurp(d / "metrics.json"));
  CHECK(m["problem"] == "inline");
  CHECK(m["boundary_rel_l2"].is_null());
  std::ofstream(d / "pts.txt") << "0 0\n";
  const Run e = binn("eval " + (d / "checkpoint.txt").string() + " " + (d / "pts.txt").string());
  CHECK(e.status == 0);
  CHECK(e.output.find("x1,x2,value0,warning") != std::string::npos);
}

TEST_CASE("eval") {
  const fs::path d = scratch("eval");
  REQUIRE(binn("solve --problem flow --iters 0 --out " + d.string()).status == 0);
  const std::string ck = (d / "checkpoint.txt").string();

  std::ofstream(d / "empty.txt") << "";
  Run r = binn("eval " + ck + " " + (d / "empty.txt").string() + " --out " + (d / "empty.csv").string());
  CHECK(r.status == 0);
  CHECK(lines(d / "empty.csv") <= 1);

  std::ofstream(d / "pts.txt") << "# x1 x2\n3 0\n1.51, 0\n";
  r = binn("eval " + ck + " " + (d / "pts.txt").string() + " --refine 2 --out " + (d / "out.csv").string());
  CHECK(r.status == 0);
  const std::string csv = slurp(d / "out.csv");
  CHECK(lines(d / "out.csv") == 3);
  CHECK(csv.find("inside_margin") != std::string::npos);

  r = binn("eval " + ck + " " + (d / "missing.txt").string());
  CHECK(r.status != 0);
}
