#include <gtest/gtest.h>

#include "run_config.hpp"
#include "test_support.hpp"

using namespace dsc;
using namespace dsc::cli;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_run_config(text, ".", "run.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST(RunConfig, MinimalIllustrativeDefaults) {
  const auto cfg = parse_run_config(
      "model:\n"
      "  name: illustrative\n"
      "uncertainty:\n"
      "  normal: {mean: [0], covariance: [[1]]}\n",
      ".");
  EXPECT_EQ(cfg.method, Method::ns);
  EXPECT_EQ(cfg.space(), illustrative::knowledge_space());
  ASSERT_TRUE(cfg.uncertainty.normal.has_value());
  EXPECT_EQ(cfg.uncertainty.normal->count, 100u);
  EXPECT_EQ(cfg.ns.alpha_star, 0.95);
  EXPECT_EQ(cfg.ns.live_points, 500u);
  EXPECT_EQ(cfg.output, "results");
  EXPECT_EQ(cfg.seed, 0u);
}

TEST(RunConfig, FullSpecification) {
  const auto cfg = parse_run_config(
      "model:\n"
      "  name: illustrative\n"
      "  cqa_band: [0.1, 0.9]\n"
      "knowledge_space:\n"
      "  lower: [-2, -1]\n"
      "  upper: [2, 1]\n"
      "uncertainty:\n"
      "  file: thetas.csv\n"
      "method: mc\n"
      "mc: {samples: 77, sequence: uniform, skip: 0}\n"
      "ns: {alpha_star: 0.5, live_points: 20, proposals: 4, enlargement: 0.1, shrink_rate: 0.5,\n"
      "     stall_window: 7, stall_epsilon: 0.001, max_iterations: 99, accelerate: true}\n"
      "output: out/dir\n"
      "seed: 123\n",
      "/cfg");
  EXPECT_EQ(cfg.model.band.lower, 0.1);
  EXPECT_EQ(cfg.model.band.upper, 0.9);
  EXPECT_EQ(cfg.space(), KnowledgeSpace({-2.0, -1.0}, {2.0, 1.0}));
  EXPECT_EQ(cfg.uncertainty.file, std::filesystem::path("/cfg/thetas.csv"));
  EXPECT_EQ(cfg.method, Method::mc);
  EXPECT_EQ(cfg.mc.n_d, 77u);
  EXPECT_EQ(cfg.mc.sequence, DesignSequence::uniform_random);
  EXPECT_EQ(cfg.mc.sobol_skip, 0u);
  EXPECT_EQ(cfg.mc.seed, 123u);
  EXPECT_EQ(cfg.ns.seed, 123u);
  EXPECT_EQ(cfg.ns.proposals_per_iteration, 4u);
  EXPECT_EQ(cfg.ns.stall_window, 7u);
  EXPECT_EQ(cfg.ns.max_iterations, 99u);
  EXPECT_TRUE(cfg.ns.accelerate);
  EXPECT_EQ(cfg.output, "out/dir");
}

TEST(RunConfig, ExternalCommandModel) {
  const auto cfg = parse_run_config(
      "model: {command: ./model --fast, constraints: 3, timeout: 2.5}\n"
      "knowledge_space: {lower: [0], upper: [1]}\n"
      "uncertainty: {normal: {mean: [0, 1], covariance: [[1, 0], [0, 1]], samples: 5}}\n",
      ".");
  ASSERT_TRUE(cfg.model.command.has_value());
  EXPECT_EQ(cfg.model.command->command, "./model --fast");
  EXPECT_EQ(cfg.model.command->constraints, 3u);
  EXPECT_EQ(cfg.model.command->timeout_seconds, 2.5);
}

TEST(RunConfig, NominalThetaDefaults) {
  const auto cfg = parse_run_config("model: {name: illustrative}\nmethod: nominal\n", ".");
  EXPECT_EQ(cfg.nominal_theta, (Vector{1.0}));
  const auto explicit_theta = parse_run_config("model: {name: illustrative}\nmethod: nominal\nnominal: {theta: [0.5]}\n", ".");
  EXPECT_EQ(explicit_theta.nominal_theta, (Vector{0.5}));
}

TEST(RunConfig, FieldLevelDiagnostics) {
  EXPECT_EQ(error_of("model: {name: illustrative}\n"
                     "knowledge_space:\n"
                     "  lower: [1, -1]\n"
                     "  upper: [1, 1]\n"
                     "uncertainty: {normal: {mean: [0], covariance: [[1]]}}\n"),
            "run.yaml:3: field 'knowledge_space.lower[0]': must be < knowledge_space.upper[0]");
  EXPECT_EQ(error_of("model: {name: illustrative}\nmethod: annealing\nuncertainty: {normal: {mean: [0], covariance: [[1]]}}\n"),
            "run.yaml:2: field 'method': expected mc, ns or nominal, got 'annealing'");
  EXPECT_EQ(error_of("model: {name: illustrative}\nsurprise: 1\n"), "run.yaml:2: field 'surprise': unknown field");
  EXPECT_EQ(error_of("model: {name: foo}\n"),
            "run.yaml:1: field 'model.name': unknown model 'foo' (registered: illustrative)");
  EXPECT_EQ(error_of("model: {name: illustrative}\nuncertainty: {normal: {mean: [0], covariance: [[1]]}}\nns:\n  live_points: many\n"),
            "run.yaml:4: field 'ns.live_points': expected a non-negative integer, got 'many'");
  EXPECT_EQ(error_of("seed: 1\n"), "run.yaml: field 'model': required");
  EXPECT_EQ(error_of("model: {name: illustrative}\n"), "run.yaml: field 'uncertainty': required for method ns");
  EXPECT_NE(error_of("model: {name: illustrative}\nuncertainty: {file: a.csv, normal: {mean: [0], covariance: [[1]]}}\n")
                .find("exactly one of 'normal' or 'file'"),
            std::string::npos);
  EXPECT_NE(error_of("model: {name: illustrative}\nuncertainty: {normal: {mean: [0], covariance: [[1]]}}\nns: {shrink_rate: 1.5}\n")
                .find("field 'ns': ns: shrink_rate"),
            std::string::npos);
  EXPECT_NE(error_of("model: {name: illustrative\n").find("run.yaml:"), std::string::npos);
  EXPECT_NE(error_of("model: {command: x}\nknowledge_space: {lower: [0], upper: [1]}\n").find("model.constraints"),
            std::string::npos);
}

TEST(RunConfig, LoadFromFileResolvesRelativePaths) {
  const auto dir = test::scratch_dir("config");
  test::write_file(dir / "run.yaml", "model: {name: illustrative}\nuncertainty: {file: data/t.csv}\n");
  const auto cfg = load_run_config(dir / "run.yaml");
  EXPECT_EQ(cfg.uncertainty.file, dir / "data/t.csv");
  EXPECT_THROW(load_run_config(dir / "missing.yaml"), ConfigError);
}
