#pragma once

#include "binn/benchmarks.hpp"
#include "binn/training.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace binn::cli {

// Validation failure; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string problem = "flower";  // benchmark name, or "inline"
  nlohmann::json inline_problem;   // geometry and boundary data when problem == "inline"
  TrainConfig train;
  bool iterations_set = false;     // otherwise the benchmark's default count is used
  bool lr_set = false;             // likewise for the learning rate
  int width = 20;
  int blocks = 2;
  int ng = 10;
  int refine = 1;
  std::string outputs;

  void validate() const;
};

// Reads the JSON document; missing fields keep their defaults.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json(const nlohmann::json& doc);

// Output directory: explicit value, else $BINN_OUT_DIR, else "binn_out".
std::string resolve_output_dir(const std::string& configured);

// Benchmark for the config. Inline problems carry no reference solution.
Benchmark build_benchmark(const RunConfig& cfg);
Benchmark inline_benchmark(const nlohmann::json& problem, int ng);

}  // namespace binn::cli
