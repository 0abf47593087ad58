#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dsc/core/process_model.hpp"
#include "dsc/surrogate/mlp.hpp"
#include "run_config.hpp"

namespace dsc::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitStalled = 3;
inline constexpr int kExitMaxIterations = 4;

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<bool> accelerate;
  std::optional<std::filesystem::path> out;
};

/// Resolves a model from the registry or the external-command bridge.
std::unique_ptr<ProcessModelBase> make_model(const ModelSpec& spec);

/// Runs a configuration and writes samples.csv, stats.json and (nested
/// sampling only) trace.csv into the output directory.
int run(const RunConfig& cfg, std::ostream& log);

RunConfig apply_overrides(RunConfig cfg, const RunOverrides& overrides);

struct FitOptions {
  std::filesystem::path samples;
  std::filesystem::path out_dir;
  std::optional<Vector> lower;
  std::optional<Vector> upper;
  surrogate::MLPConfig mlp;
};

int surrogate_fit(const FitOptions& opts, std::ostream& log);

int surrogate_eval(const std::filesystem::path& model, const std::vector<Vector>& points, std::ostream& out);

struct GridOptions {
  std::optional<std::filesystem::path> model;
  std::optional<std::string> oracle;  // "illustrative"
  double mu = 0.0;
  double sigma = 1.0;
  Vector band{0.20, 0.75};
  std::size_t resolution = 101;
  std::filesystem::path out = "grid.csv";
};

int surrogate_grid(const GridOptions& opts, std::ostream& log);

}  // namespace dsc::cli
