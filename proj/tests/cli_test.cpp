#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "dsc/benchmark/illustrative.hpp"
#include "dsc/core/normal_generator.hpp"
#include "dsc/io/number_format.hpp"
#include "dsc/io/samples_csv.hpp"
#include "dsc/io/uncertainty_csv.hpp"
#include "dsc/ns/nested_sampler.hpp"
#include "test_support.hpp"

using namespace dsc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome dsc_cli(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(DSC_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = test::read_file(out);
  o.err = test::read_file(err);
  return o;
}

const char* kNsConfig =
    "model:\n"
    "  name: illustrative\n"
    "uncertainty:\n"
    "  normal: {mean: [0], covariance: [[1]], samples: 100}\n"
    "method: ns\n"
    "ns: {alpha_star: 0.95, live_points: 500}\n"
    "seed: 7\n";

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    for (auto f : io::split_commas(line)) row.emplace_back(f);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Cli, NestedSamplingRun) {
  const auto dir = test::scratch_dir("cli_ns");
  test::write_file(dir / "run.yaml", kNsConfig);
  const auto o = dsc_cli("run " + (dir / "run.yaml").string() + " --out " + (dir / "res").string(), dir);
  ASSERT_EQ(o.code, 0) << o.err;
  const auto samples = io::read_samples_csv((dir / "res/samples.csv").string());
  std::size_t high = 0;
  for (const auto& s : samples) high += *s.prob >= 0.95 ? 1 : 0;
  EXPECT_GE(high, 500u);

  const auto stats = nlohmann::json::parse(test::read_file(dir / "res/stats.json"));
  EXPECT_EQ(stats["termination"], "reached_alpha");
  EXPECT_EQ(stats["n_samples"], samples.size());
  EXPECT_TRUE(fs::exists(dir / "res/trace.csv"));

  // counters agree with an in-process run of the same configuration
  NSConfig cfg;
  cfg.seed = 7;
  const auto set = sample_normal({{0.0}, {{1.0}}, 100}, 7);
  const auto r = run_ns(illustrative::Model{}, illustrative::knowledge_space(), set, cfg);
  EXPECT_EQ(stats["model_evals"], r.stats.model_evals);
  EXPECT_EQ(stats["iterations"], r.stats.iterations);
  EXPECT_EQ(test::read_file(dir / "res/samples.csv"), io::samples_csv_string(r.samples, 2));
}

TEST(Cli, SameSeedIsByteIdenticalAndAccelerationTransparent) {
  const auto dir = test::scratch_dir("cli_repro");
  test::write_file(dir / "run.yaml", kNsConfig);
  const std::string cfg = (dir / "run.yaml").string();
  ASSERT_EQ(dsc_cli("run " + cfg + " --seed 3 --out " + (dir / "a").string(), dir).code, 0);
  ASSERT_EQ(dsc_cli("run " + cfg + " --seed 3 --out " + (dir / "b").string(), dir).code, 0);
  ASSERT_EQ(dsc_cli("run " + cfg + " --seed 3 --accelerate --out " + (dir / "c").string(), dir).code, 0);
  ASSERT_EQ(dsc_cli("run " + cfg + " --seed 3 --accelerate=false --out " + (dir / "d").string(), dir).code, 0);
  const auto a = test::read_file(dir / "a/samples.csv");
  EXPECT_EQ(a, test::read_file(dir / "b/samples.csv"));
  EXPECT_EQ(a, test::read_file(dir / "c/samples.csv"));
  EXPECT_EQ(a, test::read_file(dir / "d/samples.csv"));
  const auto fast = nlohmann::json::parse(test::read_file(dir / "c/stats.json"));
  const auto slow = nlohmann::json::parse(test::read_file(dir / "d/stats.json"));
  EXPECT_EQ(fast["accelerate"], true);
  EXPECT_LT(fast["model_evals"].get<std::size_t>(), slow["model_evals"].get<std::size_t>());
  EXPECT_EQ(dsc_cli("run " + cfg + " --accelerate=perhaps --out " + (dir / "e").string(), dir).code, 1);
}

TEST(Cli, EmptyDesignSpaceExitsWithThree) {
  const auto dir = test::scratch_dir("cli_empty");
  std::string text = kNsConfig;
  text.replace(text.find("  name: illustrative\n"), 20, "  name: illustrative\n  cqa_band: [10, 10.5]\n");
  test::write_file(dir / "run.yaml", text);
  const auto o = dsc_cli("run " + (dir / "run.yaml").string() + " --out " + (dir / "res").string(), dir);
  EXPECT_EQ(o.code, 3) << o.err;
  const auto stats = nlohmann::json::parse(test::read_file(dir / "res/stats.json"));
  EXPECT_EQ(stats["termination"], "stalled_empty_ds");
  EXPECT_EQ(stats["samples_at_or_above_alpha_star"], 0);
}

TEST(Cli, MalformedBoundsExitWithOne) {
  const auto dir = test::scratch_dir("cli_bounds");
  test::write_file(dir / "run.yaml",
                   "model: {name: illustrative}\n"
                   "knowledge_space: {lower: [-1, 2], upper: [1, 1]}\n"
                   "uncertainty: {normal: {mean: [0], covariance: [[1]]}}\n");
  const auto o = dsc_cli("run " + (dir / "run.yaml").string(), dir);
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("field 'knowledge_space.lower[1]': must be < knowledge_space.upper[1]"), std::string::npos)
      << o.err;
}

TEST(Cli, IterationCapExitsWithFour) {
  const auto dir = test::scratch_dir("cli_cap");
  std::string text = kNsConfig;
  text.replace(text.find("live_points: 500}"), 17, "live_points: 50, max_iterations: 2}");
  test::write_file(dir / "run.yaml", text);
  const auto o = dsc_cli("run " + (dir / "run.yaml").string() + " --out " + (dir / "res").string(), dir);
  EXPECT_EQ(o.code, 4) << o.err;
}

TEST(Cli, MonteCarloAndUncertaintyFile) {
  const auto dir = test::scratch_dir("cli_mc");
  test::write_file(dir / "thetas.csv", "theta_1,weight\n0,1\n2,1\n");
  test::write_file(dir / "run.yaml",
                   "model: {name: illustrative}\n"
                   "uncertainty: {file: thetas.csv}\n"
                   "method: mc\n"
                   "mc: {samples: 64}\n");
  const auto o = dsc_cli("run " + (dir / "run.yaml").string() + " --out " + (dir / "res").string(), dir);
  ASSERT_EQ(o.code, 0) << o.err;
  const auto samples = io::read_samples_csv((dir / "res/samples.csv").string());
  ASSERT_EQ(samples.size(), 64u);
  const auto set = io::read_uncertainty_csv((dir / "thetas.csv").string());
  for (const auto& s : samples) {
    EXPECT_EQ(s.status, SampleStatus::dead);
    EXPECT_EQ(*s.prob, feasibility_probability(illustrative::Model{}, s.d, set));
  }
  EXPECT_FALSE(fs::exists(dir / "res/trace.csv"));
  const auto stats = nlohmann::json::parse(test::read_file(dir / "res/stats.json"));
  EXPECT_EQ(stats["model_evals"], 128);
  EXPECT_EQ(stats["termination"], "completed");
}

TEST(Cli, ExternalCommandRunMatchesInProcess) {
  const auto dir = test::scratch_dir("cli_bridge");
  const std::string uncertainty = "uncertainty: {normal: {mean: [0], covariance: [[1]], samples: 20}}\nns: {live_points: 50, alpha_star: 0.9}\nseed: 2\n";
  test::write_file(dir / "local.yaml", "model: {name: illustrative}\n" + uncertainty);
  test::write_file(dir / "bridge.yaml", "model: {command: \"" + std::string(DSC_PYTHON) + " " + DSC_TEST_SCRIPTS +
                                            "/fake_model.py illustrative\", constraints: 2}\n"
                                            "knowledge_space: {lower: [-1, -1], upper: [1, 1]}\n" + uncertainty);
  ASSERT_EQ(dsc_cli("run " + (dir / "local.yaml").string() + " --out " + (dir / "local").string(), dir).code, 0);
  const auto o = dsc_cli("run " + (dir / "bridge.yaml").string() + " --out " + (dir / "bridge").string(), dir);
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(test::read_file(dir / "local/samples.csv"), test::read_file(dir / "bridge/samples.csv"));
}

TEST(Cli, BridgeNanAbortsRun) {
  const auto dir = test::scratch_dir("cli_nan");
  test::write_file(dir / "run.yaml", "model: {command: \"" + std::string(DSC_PYTHON) + " " + DSC_TEST_SCRIPTS +
                                         "/fake_model.py nan\", constraints: 2}\n"
                                         "knowledge_space: {lower: [-1, -1], upper: [1, 1]}\n"
                                         "uncertainty: {normal: {mean: [0], covariance: [[1]], samples: 5}}\n");
  const auto o = dsc_cli("run " + (dir / "run.yaml").string() + " --out " + (dir / "res").string(), dir);
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("model returned non-finite constraint value"), std::string::npos) << o.err;
}

TEST(Cli, SurrogateFitEvalRoundTrip) {
  const auto dir = test::scratch_dir("cli_surrogate");
  test::write_file(dir / "run.yaml", kNsConfig);
  ASSERT_EQ(dsc_cli("run " + (dir / "run.yaml").string() + " --out " + (dir / "res").string(), dir).code, 0);
  const auto fit = dsc_cli("surrogate fit " + (dir / "res/samples.csv").string() + " --out " + (dir / "mlp").string() +
                               " --epochs 60",
                           dir);
  ASSERT_EQ(fit.code, 0) << fit.err;
  EXPECT_NE(fit.out.find("validation_rmse "), std::string::npos);
  ASSERT_TRUE(fs::exists(dir / "mlp/mlp.json"));

  const auto parity = csv_rows(test::read_file(dir / "mlp/parity.csv"));
  ASSERT_GT(parity.size(), 10u);
  EXPECT_EQ(parity[0], (std::vector<std::string>{"d_1", "d_2", "label", "prediction"}));
  std::string points = "d_1,d_2\n";
  for (std::size_t i = 1; i < parity.size(); i += 97) points += parity[i][0] + "," + parity[i][1] + "\n";
  test::write_file(dir / "points.csv", points);
  const auto eval = dsc_cli("surrogate eval --model " + (dir / "mlp/mlp.json").string() + " --points " +
                                (dir / "points.csv").string(),
                            dir);
  ASSERT_EQ(eval.code, 0) << eval.err;
  const auto rows = csv_rows(eval.out);
  ASSERT_EQ(rows[0], (std::vector<std::string>{"d_1", "d_2", "prob"}));
  std::size_t k = 1;
  for (std::size_t i = 1; i < parity.size(); i += 97, ++k) {
    ASSERT_LT(k, rows.size());
    EXPECT_EQ(rows[k][2], parity[i][3]) << "row " << i;
  }

  const auto single = dsc_cli("surrogate eval --model " + (dir / "mlp/mlp.json").string() + " --point " +
                                  parity[1][0] + "," + parity[1][1],
                              dir);
  EXPECT_EQ(csv_rows(single.out)[1][2], parity[1][3]);

  const auto grid = dsc_cli("surrogate grid --model " + (dir / "mlp/mlp.json").string() + " --res 11 --out " +
                                (dir / "g.csv").string(),
                            dir);
  ASSERT_EQ(grid.code, 0) << grid.err;
  EXPECT_EQ(csv_rows(test::read_file(dir / "g.csv")).size(), 122u);
}

TEST(Cli, SurrogateRejectsWrongSchemaVersion) {
  const auto dir = test::scratch_dir("cli_schema");
  test::write_file(dir / "m.json", R"({"schema": "dsc.feasibility_mlp", "schema_version": 9})");
  const auto o = dsc_cli("surrogate eval --model " + (dir / "m.json").string() + " --point 0,0", dir);
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("unsupported model schema_version 9"), std::string::npos) << o.err;
}

TEST(Cli, OracleGrid) {
  const auto dir = test::scratch_dir("cli_grid");
  const auto o = dsc_cli("surrogate grid --oracle illustrative --mu 0 --sigma 1 --res 101 --out " +
                             (dir / "grid.csv").string(),
                         dir);
  ASSERT_EQ(o.code, 0) << o.err;
  const auto rows = csv_rows(test::read_file(dir / "grid.csv"));
  ASSERT_EQ(rows.size(), 101u * 101u + 1u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"d_1", "d_2", "prob"}));
  // theta in [1.2, 1.75]
  EXPECT_EQ(rows[1][0], "-1");
  EXPECT_EQ(rows[1][1], "-1");
  EXPECT_NEAR(std::stod(rows[1][2]), 0.0750105133578912, 1e-15);
  EXPECT_EQ(rows.back()[0], "1");
  EXPECT_EQ(rows.back()[1], "1");
  bool found = false;
  for (const auto& r : rows) {
    if (r[0] == "0" && r[1] == "0.5") {
      found = true;
      EXPECT_EQ(r[2], "1");
    }
  }
  EXPECT_TRUE(found);
}
