// binn: train, verify and evaluate boundary-integral networks.
//
// Settings precedence for `solve`: built-in defaults, then the --config JSON
// document, then command-line flags. The output directory falls back to
// $BINN_OUT_DIR and then to ./binn_out.

#include "run_config.hpp"
#include "verify.hpp"

#include "binn/benchmarks.hpp"
#include "binn/bie_potential.hpp"
#include "binn/quadrature.hpp"
#include "binn/training.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using namespace binn;
using namespace binn::cli;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct SolveFlags {
  std::string config;
  std::optional<std::string> problem;
  std::optional<int> iters;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr;
  std::optional<int> width;
  std::optional<int> ng;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<int> refine;
};

void write_loss_csv(const std::string& path, const std::vector<double>& history) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.precision(17);
  os << "iteration,loss\n";
  for (std::size_t i = 0; i < history.size(); ++i) os << i << ',' << history[i] << '\n';
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

int cmd_solve(const SolveFlags& f) {
  RunConfig cfg;
  Benchmark bench;
  try {
    if (!f.config.empty()) cfg = load_run_config(f.config);
    if (f.problem) cfg.problem = *f.problem;
    if (f.iters) {
      cfg.train.iterations = *f.iters;
      cfg.iterations_set = true;
    }
    if (f.seed) cfg.train.seed = *f.seed;
    if (f.lr) {
      cfg.train.lr = *f.lr;
      cfg.lr_set = true;
    }
    if (f.width) cfg.width = *f.width;
    if (f.ng) cfg.ng = *f.ng;
    if (f.out) cfg.outputs = *f.out;
    if (f.threads) cfg.train.threads = *f.threads;
    if (f.refine) cfg.refine = *f.refine;
    cfg.validate();
    bench = build_benchmark(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "binn: invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  }
  if (!cfg.iterations_set) cfg.train.iterations = bench.default_iterations;
  if (!cfg.lr_set) cfg.train.lr = bench.default_lr;

  const fs::path dir = resolve_output_dir(cfg.outputs);
  fs::create_directories(dir);
  const auto start = std::chrono::steady_clock::now();

  const ResidualOperator op = assemble(bench.model());
  TrainConfig tc = cfg.train;
  tc.checkpoint_path = (dir / "checkpoint.txt").string();
  tc.checkpoint_every = std::max(tc.checkpoint_every, 1);
  tc.checkpoint_metadata = {{"problem", cfg.problem},
                            {"ng", std::to_string(cfg.ng)},
                            {"iterations", std::to_string(tc.iterations)},
                            {"seed", std::to_string(tc.seed)}};
  if (cfg.problem == "inline") tc.checkpoint_metadata["inline"] = cfg.inline_problem.dump();

  std::cout << "binn: " << bench.name << ", " << op.rows() << " residual rows, " << tc.iterations
            << " iterations\n";
  const TrainResult res = train(op, bench.architecture(cfg.width, cfg.blocks), tc);
  if (res.aborted) std::cerr << "binn: training stopped early: " << res.message << '\n';
  write_loss_csv((dir / "loss.csv").string(), res.loss_history);

  const Evaluation ev = evaluate(bench, res.params, cfg.refine);
  write_boundary_csv((dir / "boundary.csv").string(), ev);
  write_interior_csv((dir / "interior.csv").string(), bench, ev);
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const bool has_reference = static_cast<bool>(bench.reference.boundary);
  nlohmann::json metrics;
  metrics["problem"] = cfg.problem;
  metrics["iterations"] = static_cast<int>(res.loss_history.size()) - 1;
  metrics["final_loss"] = res.loss_history.empty() ? nlohmann::json() : number_or_null(res.loss_history.back());
  metrics["boundary_rel_l2"] = has_reference ? number_or_null(ev.boundary.rel_l2) : nlohmann::json();
  metrics["interior_rel_l2"] =
      bench.reference.interior ? number_or_null(ev.interior.rel_l2) : nlohmann::json();
  metrics["runtime_s"] = runtime;
  std::ofstream((dir / "metrics.json").string()) << metrics.dump(2) << '\n';

  std::cout << "binn: final loss " << metrics["final_loss"] << ", boundary rel L2 " << metrics["boundary_rel_l2"]
            << ", interior rel L2 " << metrics["interior_rel_l2"] << "\nbinn: artifacts in " << dir.string()
            << '\n';
  return res.aborted ? kExitFailure : 0;
}

int cmd_verify(double log_scale) {
  binn::testing::set_log_constant_scale(log_scale);
  const auto results = run_verify_suite();
  binn::testing::set_log_constant_scale(1.0);
  print_table(std::cout, results);
  for (const auto& r : results) {
    if (!r.pass) return kExitFailure;
  }
  return 0;
}

std::vector<Vec2> read_points(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read points file " + path);
  std::vector<Vec2> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (auto& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ls(line);
    double x1 = 0.0, x2 = 0.0;
    if (!(ls >> x1)) continue;  // blank or header
    if (!(ls >> x2)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two coordinates");
    pts.emplace_back(x1, x2);
  }
  return pts;
}

// Region whose signed boundary encloses y; region 0 when none does.
std::size_t region_of(const BieModel& model, const Vec2& y) {
  if (model.regions.size() == 1) return 0;
  for (std::size_t r = 0; r < model.regions.size(); ++r) {
    double total = 0.0;
    for (const auto& rs : model.regions[r].segments) {
      const Segment& seg = model.boundary.segments[rs.segment];
      constexpr int kSub = 32;
      Vec2 prev = seg.point(-1.0) - y;
      for (int j = 1; j <= kSub; ++j) {
        const Vec2 cur = seg.point(-1.0 + 2.0 * j / kSub) - y;
        total += rs.sign * std::atan2(prev.x() * cur.y() - prev.y() * cur.x(), prev.dot(cur));
        prev = cur;
      }
    }
    if (std::abs(total) > std::numbers::pi) return r;
  }
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& points, const std::string& out_path,
             int refine) {
  if (refine < 1) {
    std::cerr << "binn: invalid configuration: refine: must be >= 1\n";
    return kExitConfig;
  }
  Checkpoint ck;
  std::vector<Vec2> ys;
  Benchmark bench;
  try {
    ck = load_checkpoint(checkpoint);
    ys = read_points(points);
    const auto get = [&](const char* k) -> std::string {
      const auto it = ck.metadata.find(k);
      if (it == ck.metadata.end()) throw std::runtime_error(std::string("checkpoint lacks '") + k + "' metadata");
      return it->second;
    };
    RunConfig cfg;
    cfg.problem = get("problem");
    cfg.ng = std::stoi(get("ng"));
    if (cfg.problem == "inline") {
      cfg.inline_problem = nlohmann::json::parse(get("inline"));
    } else if (cfg.problem == "inclusion") {
      bench = make_inclusion(cfg.ng, false);
    }
    if (bench.name.empty()) bench = build_benchmark(cfg);
  } catch (const std::exception& e) {
    std::cerr << "binn: " << e.what() << '\n';
    return kExitFailure;
  }
  const BieModel model = bench.model();
  if (ck.params.arch.outputs != model.outputs()) {
    std::cerr << "binn: checkpoint has " << ck.params.arch.outputs << " outputs, problem needs " << model.outputs()
              << '\n';
    return kExitFailure;
  }

  std::ofstream os;
  std::ostream* sink = &std::cout;
  if (!out_path.empty()) {
    os.open(out_path);
    if (!os) {
      std::cerr << "binn: cannot open " << out_path << " for writing\n";
      return kExitFailure;
    }
    sink = &os;
  }
  sink->precision(17);
  *sink << "x1,x2";
  for (int k = 0; k < model.outputs(); ++k) *sink << ",value" << k;
  *sink << ",warning\n";
  const ChannelSource net = [&](const EvalPoints& pts) { return network_channels(ck.params, pts); };
  for (const Vec2& y : ys) {
    const Eigen::MatrixXd u = interior_direct(model, region_of(model, y), {y}, net, refine);
    *sink << y.x() << ',' << y.y();
    for (Eigen::Index k = 0; k < u.rows(); ++k) *sink << ',' << u(k, 0);
    *sink << ',' << (model.boundary.distance_to(y) < kDefaultMargin ? "inside_margin" : "") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-integral neural network solver for 2D potential and elastostatic problems"};
  app.require_subcommand(1);

  SolveFlags sf;
  auto* solve = app.add_subcommand("solve", "train a network on a problem and export artifacts");
  solve->add_option("--config", sf.config, "JSON run configuration")->check(CLI::ExistingFile);
  solve->add_option("--problem", sf.problem, "benchmark: flower, flow, beam, hertz, inclusion");
  solve->add_option("--iters", sf.iters, "training iterations (default: the benchmark's count)");
  solve->add_option("--seed", sf.seed, "initialization seed");
  solve->add_option("--lr", sf.lr, "Adam learning rate (default: the benchmark's rate)");
  solve->add_option("--width", sf.width, "hidden layer width");
  solve->add_option("--ng", sf.ng, "Gauss points per segment (even)");
  solve->add_option("--out", sf.out, "output directory");
  solve->add_option("--threads", sf.threads, "worker threads for the residual");
  solve->add_option("--refine", sf.refine, "segment refinement for interior evaluation");

  double log_scale = 1.0;
  auto* verify = app.add_subcommand("verify", "run the deterministic oracle suite");
  verify->add_option("--perturb-log-constant", log_scale,
                     "fault injection: scale the analytic weak-log term (1 = unperturbed)");

  std::string ckpt, points, out;
  int refine = 1;
  auto* eval = app.add_subcommand("eval", "interior values of a trained checkpoint at given points");
  eval->add_option("checkpoint", ckpt, "checkpoint file written by solve")->required();
  eval->add_option("points", points, "text file with one 'x1 x2' pair per line")->required();
  eval->add_option("--out", out, "CSV output path (default: stdout)");
  eval->add_option("--refine", refine, "split every segment into k pieces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }
  try {
    if (*solve) return cmd_solve(sf);
    if (*verify) return cmd_verify(log_scale);
    if (*eval) return cmd_eval(ckpt, points, out, refine);
  } catch (const std::exception& e) {
    std::cerr << "binn: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
