#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "dsc/io/number_format.hpp"
#include "dsc/io/uncertainty_csv.hpp"

namespace {

using namespace dsc;
using namespace dsc::cli;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("dsc");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("DSC_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour "off" when asked for
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

Vector parse_point(const std::string& text) {
  Vector out;
  for (auto token : io::split_commas(text)) {
    const auto v = io::parse_double(token);
    if (!v) throw std::invalid_argument("cannot parse point '" + text + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<Vector> read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<Vector> points;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (io::trim(line).empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("d_", 0) == 0) continue;
    }
    points.push_back(parse_point(std::string(io::trim(line))));
  }
  return points;
}

std::optional<bool> parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Probabilistic design-space characterization"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a sampler from a YAML configuration");
  std::string config_path;
  std::uint64_t seed = 0;
  std::string accelerate = "true";
  std::string out_dir;
  run_cmd->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the configured seed");
  auto* accel_opt = run_cmd->add_option("--accelerate", accelerate, "Early-interrupted feasibility checks (true|false)")
                        ->expected(0, 1)
                        ->default_str("true");
  auto* out_opt = run_cmd->add_option("--out", out_dir, "Override the output directory");

  // surrogate
  auto* sur_cmd = app.add_subcommand("surrogate", "Fit and evaluate the feasibility-map surrogate");
  sur_cmd->require_subcommand(1);

  FitOptions fit;
  std::string fit_samples;
  std::string fit_out = "surrogate";
  std::vector<double> fit_lower;
  std::vector<double> fit_upper;
  std::string activation = "tanh";
  std::string optimizer = "adam";
  auto* fit_cmd = sur_cmd->add_subcommand("fit", "Train an MLP on samples.csv");
  fit_cmd->add_option("samples", fit_samples, "samples.csv from a run")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", fit_out, "Output directory for mlp.json and parity.csv");
  fit_cmd->add_option("--lower", fit_lower, "Knowledge-space lower bounds")->delimiter(',');
  fit_cmd->add_option("--upper", fit_upper, "Knowledge-space upper bounds")->delimiter(',');
  fit_cmd->add_option("--hidden", fit.mlp.hidden_layers, "Hidden layer widths")->delimiter(',');
  fit_cmd->add_option("--activation", activation, "tanh or relu");
  fit_cmd->add_option("--optimizer", optimizer, "adam or sgd");
  fit_cmd->add_option("--epochs", fit.mlp.epochs);
  fit_cmd->add_option("--batch", fit.mlp.batch_size);
  fit_cmd->add_option("--lr", fit.mlp.learning_rate);
  fit_cmd->add_option("--validation-fraction", fit.mlp.validation_fraction);
  fit_cmd->add_option("--patience", fit.mlp.patience);
  fit_cmd->add_option("--seed", fit.mlp.seed);

  std::string eval_model;
  std::vector<std::string> eval_points;
  std::string eval_file;
  auto* eval_cmd = sur_cmd->add_subcommand("eval", "Predict feasibility probability at points");
  eval_cmd->add_option("--model", eval_model, "mlp.json")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--point", eval_points, "Comma-separated design point (repeatable)");
  eval_cmd->add_option("--points", eval_file, "CSV file of design points")->check(CLI::ExistingFile);

  GridOptions grid;
  std::string grid_model;
  std::string grid_oracle;
  std::vector<double> grid_band;
  std::string grid_out = "grid.csv";
  auto* grid_cmd = sur_cmd->add_subcommand("grid", "Write a regular lattice of probabilities over K");
  auto* gm = grid_cmd->add_option("--model", grid_model, "mlp.json")->check(CLI::ExistingFile);
  auto* go = grid_cmd->add_option("--oracle", grid_oracle, "Analytic oracle name (illustrative)");
  gm->excludes(go);
  grid_cmd->add_option("--mu", grid.mu, "Oracle prior mean");
  grid_cmd->add_option("--sigma", grid.sigma, "Oracle prior standard deviation");
  grid_cmd->add_option("--band", grid_band, "Oracle CQA band lower,upper")->delimiter(',');
  grid_cmd->add_option("--res", grid.resolution, "Points per axis");
  grid_cmd->add_option("--out", grid_out, "Output CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      RunOverrides overrides;
      if (*seed_opt) overrides.seed = seed;
      if (*accel_opt) {
        const auto flag = parse_bool(accelerate.empty() ? "true" : accelerate);
        if (!flag) throw std::invalid_argument("--accelerate expects true or false, got '" + accelerate + "'");
        overrides.accelerate = flag;
      }
      if (*out_opt) overrides.out = out_dir;
      const RunConfig cfg = apply_overrides(load_run_config(config_path), overrides);
      return run(cfg, std::cout);
    }
    if (*fit_cmd) {
      fit.samples = fit_samples;
      fit.out_dir = fit_out;
      if (!fit_lower.empty()) fit.lower = fit_lower;
      if (!fit_upper.empty()) fit.upper = fit_upper;
      fit.mlp.hidden_activation = surrogate::activation_from_string(activation);
      fit.mlp.optimizer = surrogate::optimizer_from_string(optimizer);
      return surrogate_fit(fit, std::cout);
    }
    if (*eval_cmd) {
      std::vector<Vector> points;
      for (const auto& p : eval_points) points.push_back(parse_point(p));
      if (!eval_file.empty()) {
        auto more = read_points_csv(eval_file);
        points.insert(points.end(), more.begin(), more.end());
      }
      if (points.empty()) throw std::invalid_argument("give --point or --points");
      return surrogate_eval(eval_model, points, std::cout);
    }
    if (*grid_cmd) {
      if (!grid_model.empty()) grid.model = grid_model;
      if (!grid_oracle.empty()) grid.oracle = grid_oracle;
      if (!grid_band.empty()) grid.band = grid_band;
      grid.out = grid_out;
      return surrogate_grid(grid, std::cout);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitError;
  }
  return kExitError;
}
