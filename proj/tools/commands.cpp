#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "dsc/benchmark/illustrative.hpp"
#include "dsc/bridge/external_model.hpp"
#include "dsc/core/normal_generator.hpp"
#include "dsc/io/number_format.hpp"
#include "dsc/io/samples_csv.hpp"
#include "dsc/io/uncertainty_csv.hpp"
#include "dsc/mc/monte_carlo.hpp"
#include "dsc/ns/nested_sampler.hpp"
#include "dsc/surrogate/mlp_json.hpp"

namespace dsc::cli {

namespace fs = std::filesystem;

std::unique_ptr<ProcessModelBase> make_model(const ModelSpec& spec) {
  if (spec.command) return std::make_unique<bridge::ExternalModel>(*spec.command);
  if (spec.name == "illustrative") {
    return std::make_unique<ModelAdapter<illustrative::Model>>(illustrative::Model(spec.band));
  }
  throw std::invalid_argument("unknown model '" + spec.name + "'");
}

RunConfig apply_overrides(RunConfig cfg, const RunOverrides& overrides) {
  if (overrides.seed) {
    cfg.seed = *overrides.seed;
    cfg.mc.seed = cfg.seed;
    cfg.ns.seed = cfg.seed;
  }
  if (overrides.accelerate) cfg.ns.accelerate = *overrides.accelerate;
  if (overrides.out) cfg.output = *overrides.out;
  return cfg;
}

namespace {

UncertaintySet load_uncertainty(const RunConfig& cfg) {
  if (cfg.uncertainty.file) return io::read_uncertainty_csv(cfg.uncertainty.file->string());
  if (cfg.uncertainty.normal) return sample_normal(*cfg.uncertainty.normal, cfg.seed);
  throw ConfigError("no uncertainty source configured");
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
  const KnowledgeSpace& space = cfg.space();
  const auto model = make_model(cfg.model);

  std::vector<DesignSample> samples;
  RunStats stats;
  std::optional<std::vector<TraceRow>> trace;
  std::size_t n_theta = 1;
  switch (cfg.method) {
    case Method::mc: {
      const UncertaintySet uncertainty = load_uncertainty(cfg);
      n_theta = uncertainty.size();
      auto result = run_mc(*model, space, uncertainty, cfg.mc);
      samples = std::move(result.samples);
      stats = result.stats;
      break;
    }
    case Method::ns: {
      const UncertaintySet uncertainty = load_uncertainty(cfg);
      n_theta = uncertainty.size();
      auto result = run_ns(*model, space, uncertainty, cfg.ns);
      samples = std::move(result.samples);
      stats = result.stats;
      trace = std::move(result.trace);
      break;
    }
    case Method::nominal: {
      auto result = run_nominal(*model, space, cfg.nominal_theta, cfg.ns);
      samples = std::move(result.samples);
      stats = result.stats;
      trace = std::move(result.trace);
      break;
    }
  }

  fs::create_directories(cfg.output);
  {
    auto out = open_output(cfg.output / "samples.csv");
    io::write_samples_csv(out, samples, space.dim());
  }
  if (trace) {
    auto out = open_output(cfg.output / "trace.csv");
    io::write_trace_csv(out, *trace);
  }

  const double alpha_star = cfg.method == Method::nominal ? 1.0 : cfg.ns.alpha_star;
  std::size_t at_target = 0;
  for (const auto& s : samples) at_target += (s.prob && *s.prob >= alpha_star) ? 1 : 0;

  nlohmann::json j;
  j["schema"] = "dsc.run_stats";
  j["schema_version"] = 1;
  j["method"] = to_string(cfg.method);
  j["model"] = cfg.model.name;
  j["seed"] = cfg.seed;
  j["knowledge_space"] = {{"lower", space.lower()}, {"upper", space.upper()}};
  j["n_theta"] = n_theta;
  j["n_samples"] = samples.size();
  j["model_evals"] = stats.model_evals;
  j["iterations"] = stats.iterations;
  j["proposals_generated"] = stats.proposals_generated;
  j["proposals_accepted"] = stats.proposals_accepted;
  j["proposals_rejected"] = stats.proposals_rejected;
  j["termination"] = std::string(to_string(stats.termination));
  if (cfg.method != Method::mc) {
    j["alpha_star"] = alpha_star;
    j["accelerate"] = cfg.ns.accelerate;
    j["samples_at_or_above_alpha_star"] = at_target;
  }
  {
    auto out = open_output(cfg.output / "stats.json");
    out << j.dump(2) << '\n';
  }

  log << to_string(cfg.method) << ": " << samples.size() << " samples, " << stats.model_evals << " model evaluations, "
      << "termination " << to_string(stats.termination) << "; results in " << cfg.output.string() << '\n';

  switch (stats.termination) {
    case Termination::completed:
    case Termination::reached_alpha: return kExitOk;
    case Termination::stalled_empty_ds: return kExitStalled;
    case Termination::max_iterations: return kExitMaxIterations;
  }
  return kExitError;
}

int surrogate_fit(const FitOptions& opts, std::ostream& log) {
  const auto samples = io::read_samples_csv(opts.samples.string());
  if (samples.empty()) throw std::runtime_error("samples file '" + opts.samples.string() + "' has no rows");

  std::optional<KnowledgeSpace> domain;
  if (opts.lower || opts.upper) {
    if (!opts.lower || !opts.upper) throw std::invalid_argument("give both --lower and --upper");
    domain.emplace(*opts.lower, *opts.upper);
  } else {
    const fs::path stats_path = opts.samples.parent_path() / "stats.json";
    std::ifstream in(stats_path);
    if (!in) {
      throw std::runtime_error("knowledge space unknown: pass --lower/--upper or keep stats.json next to the samples");
    }
    const auto j = nlohmann::json::parse(in);
    domain.emplace(j.at("knowledge_space").at("lower").get<Vector>(), j.at("knowledge_space").at("upper").get<Vector>());
  }

  std::vector<surrogate::LabelledPoint> data;
  for (const auto& s : samples) {
    if (s.prob) data.push_back({s.d, *s.prob});
  }
  const auto net = surrogate::fit(data, *domain, opts.mlp);

  fs::create_directories(opts.out_dir);
  surrogate::save_mlp(net, (opts.out_dir / "mlp.json").string());
  {
    auto out = open_output(opts.out_dir / "parity.csv");
    for (std::size_t i = 0; i < domain->dim(); ++i) out << "d_" << i + 1 << ',';
    out << "label,prediction\n";
    for (const auto& p : data) {
      for (double v : p.d) out << io::format_double(v) << ',';
      out << io::format_double(p.prob) << ',' << io::format_double(net.predict(p.d)) << '\n';
    }
  }
  log << "fit: " << data.size() << " samples (" << net.training.train_size << " train, "
      << net.training.validation_size << " validation), " << net.training.epochs_run << " epochs (best "
      << net.training.best_epoch << ")\n"
      << "train_rmse " << io::format_double(std::sqrt(net.training.train_mse)) << '\n';
  if (net.training.validation_size > 0) {
    log << "validation_rmse " << io::format_double(std::sqrt(net.training.validation_mse)) << '\n';
  }
  return kExitOk;
}

int surrogate_eval(const fs::path& model, const std::vector<Vector>& points, std::ostream& out) {
  const auto net = surrogate::load_mlp(model.string());
  for (std::size_t i = 0; i < net.input_dim(); ++i) out << "d_" << i + 1 << ',';
  out << "prob\n";
  for (const auto& d : points) {
    const auto p = net.predict_checked(d);
    if (p.extrapolated) spdlog::warn("point {} lies outside the training domain; prediction extrapolates", format_point(d));
    for (double v : d) out << io::format_double(v) << ',';
    out << io::format_double(p.value) << '\n';
  }
  return kExitOk;
}

int surrogate_grid(const GridOptions& opts, std::ostream& log) {
  if (opts.model.has_value() == opts.oracle.has_value()) throw std::invalid_argument("give exactly one of --model or --oracle");
  if (opts.resolution < 2) throw std::invalid_argument("--res must be >= 2");

  std::optional<surrogate::FeasibilityMapMLP> net;
  std::optional<KnowledgeSpace> space;
  illustrative::NormalTheta prior;
  illustrative::CqaBand band;
  if (opts.model) {
    net.emplace(surrogate::load_mlp(opts.model->string()));
    space.emplace(net->domain());
  } else {
    if (*opts.oracle != "illustrative") throw std::invalid_argument("unknown oracle '" + *opts.oracle + "' (available: illustrative)");
    prior = illustrative::NormalTheta(opts.mu, opts.sigma);
    if (opts.band.size() != 2 || !(opts.band[0] <= opts.band[1])) throw std::invalid_argument("--band expects lower,upper");
    band = {opts.band[0], opts.band[1]};
    space.emplace(illustrative::knowledge_space());
  }

  const std::size_t n = space->dim();
  const std::size_t res = opts.resolution;
  const auto res_d = static_cast<double>(res - 1);
  auto out = open_output(opts.out);
  for (std::size_t i = 0; i < n; ++i) out << "d_" << i + 1 << ',';
  out << "prob\n";
  std::vector<std::size_t> idx(n, 0);
  Vector d(n);
  std::size_t rows = 0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = space->lower()[i];
      const double hi = space->upper()[i];
      d[i] = idx[i] + 1 == res ? hi : lo + (hi - lo) * static_cast<double>(idx[i]) / res_d;
    }
    const double p = net ? net->predict(d) : illustrative::analytic_probability(d, prior, band);
    for (double v : d) out << io::format_double(v) << ',';
    out << io::format_double(p) << '\n';
    ++rows;
    std::size_t k = n;
    while (k > 0 && ++idx[k - 1] == res) idx[--k] = 0;
    if (k == 0) break;
  }
  log << "grid: " << rows << " rows written to " << opts.out.string() << '\n';
  return kExitOk;
}

}  // namespace dsc::cli
