#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsp/errors.hpp"
#include "hsp/experiment.hpp"
#include "hsp/io.hpp"

using namespace hsp;

namespace {

ExperimentConfig small_config(ExperimentKind kind) {
  ExperimentConfig config;
  config.kind = kind;
  config.alpha = 1.5;
  config.hurst = 0.75;
  config.delta = 0.01;
  config.n = 2000;
  config.grid_cells = 4096;
  config.peak_count = 25;
  config.replicates = 4;
  config.master_seed = 99;
  config.workers = 1;
  return config;
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string strip_timestamp(std::string text) {
  const auto pos = text.find("\"timestamp\"");
  if (pos == std::string::npos) return text;
  const auto end = text.find('\n', pos);
  text.erase(pos, end - pos);
  return text;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("l2_distance: zero for equal inputs, c^2 for a constant offset") {
  DensityEstimate est;
  est.grid = uniform_grid(0.0, 1.0, 101);
  est.values.assign(101, 0.0);
  auto zero = [](double) { return 0.0; };
  CHECK(l2_distance(est, zero, 0.0, 1.0) == 0.0);

  for (auto& v : est.values) v = 0.3;
  CHECK(l2_distance(est, zero, 0.0, 1.0) == doctest::Approx(0.09).epsilon(1e-12));

  auto line = [](double z) { return 2.0 * z; };
  for (std::size_t i = 0; i < est.grid.size(); ++i) est.values[i] = 2.0 * est.grid[i] + 0.3;
  CHECK(l2_distance(est, line, 0.0, 1.0) == doctest::Approx(0.09).epsilon(1e-12));

  CHECK_THROWS_AS(l2_distance(est, zero, 0.0, 2.0), std::invalid_argument);
}

TEST_CASE("child_seed: deterministic, index-sensitive, master-sensitive") {
  CHECK(child_seed(1, 0) == child_seed(1, 0));
  CHECK(child_seed(1, 0) != child_seed(1, 1));
  CHECK(child_seed(1, 0) != child_seed(2, 0));
}

TEST_CASE("config digest: sensitive to estimation fields, blind to workers") {
  ExperimentConfig a = small_config(ExperimentKind::table3);
  ExperimentConfig b = a;
  b.workers = 8;
  CHECK(config_digest(a) == config_digest(b));
  b.alpha = 1.2;
  CHECK(config_digest(a) != config_digest(b));
  ExperimentConfig c = a;
  c.master_seed += 1;
  CHECK(config_digest(a) != config_digest(c));
}

TEST_CASE("config file: save/load round trip preserves the digest") {
  const auto dir = std::filesystem::temp_directory_path() / "hsp_test_config";
  std::filesystem::create_directories(dir);
  ExperimentConfig config = small_config(ExperimentKind::table2);
  config.policy.bandwidth = 1.7;
  save_config(config, dir / "config.json");
  const ExperimentConfig loaded = load_config(dir / "config.json");
  CHECK(config_digest(loaded) == config_digest(config));
  CHECK(loaded.policy.bandwidth.has_value());
  CHECK(*loaded.policy.bandwidth == doctest::Approx(1.7));
}

TEST_CASE("run_experiment: deterministic and schedule independent") {
  ExperimentConfig config = small_config(ExperimentKind::table3);
  const ResultTable once = run_experiment(config);
  const ResultTable twice = run_experiment(config);
  CHECK(once.stats == twice.stats);

  config.workers = 3;
  const ResultTable parallel = run_experiment(config);
  CHECK(once.stats == parallel.stats);
  REQUIRE(once.replicates.size() == parallel.replicates.size());
  for (std::size_t r = 0; r < once.replicates.size(); ++r) {
    CHECK(once.replicates[r].seed == parallel.replicates[r].seed);
    REQUIRE(once.replicates[r].gamma.has_value() == parallel.replicates[r].gamma.has_value());
    if (once.replicates[r].gamma) {
      CHECK(once.replicates[r].gamma->alpha_hat == parallel.replicates[r].gamma->alpha_hat);
    }
  }
}

TEST_CASE("run_experiment + emit_outputs: reruns are byte identical modulo timestamp") {
  ExperimentConfig config = small_config(ExperimentKind::table3);
  config.replicates = 2;
  config.density_csv_replicates = 1;
  const auto dir_a = std::filesystem::temp_directory_path() / "hsp_test_emit_a";
  const auto dir_b = std::filesystem::temp_directory_path() / "hsp_test_emit_b";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);

  const ResultTable table_a = run_experiment(config);
  const ResultTable table_b = run_experiment(config);
  emit_outputs(table_a, dir_a);
  emit_outputs(table_b, dir_b);

  CHECK(slurp(dir_a / "table.csv") == slurp(dir_b / "table.csv"));
  CHECK(slurp(dir_a / "replicates.csv") == slurp(dir_b / "replicates.csv"));
  CHECK(slurp(dir_a / "density_overlays.csv") == slurp(dir_b / "density_overlays.csv"));
  CHECK(strip_timestamp(slurp(dir_a / "metadata.json")) ==
        strip_timestamp(slurp(dir_b / "metadata.json")));
  CHECK(slurp(dir_a / "metadata.json").find(table_a.digest) != std::string::npos);
}

TEST_CASE("emit_outputs: table3 schema carries the documented columns") {
  ExperimentConfig config = small_config(ExperimentKind::table3);
  config.replicates = 2;
  const ResultTable table = run_experiment(config);
  const auto dir = std::filesystem::temp_directory_path() / "hsp_test_schema";
  std::filesystem::remove_all(dir);
  emit_outputs(table, dir);
  const std::string header = slurp(dir / "table.csv").substr(0, slurp(dir / "table.csv").find('\n'));
  for (const char* column : {"alpha", "H", "N", "kernel", "mean_bias_alpha", "mean_bias_H",
                             "mc_se_alpha", "mc_se_H", "R_effective"}) {
    CHECK(header.find(column) != std::string::npos);
  }
}

TEST_CASE("emit_outputs: an empty table writes a header-only CSV") {
  ResultTable empty;
  empty.config = small_config(ExperimentKind::table1);
  empty.config.replicates = 0;
  empty.digest = config_digest(empty.config);
  const auto dir = std::filesystem::temp_directory_path() / "hsp_test_empty";
  std::filesystem::remove_all(dir);
  emit_outputs(empty, dir);
  const std::string text = slurp(dir / "table.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
}

TEST_CASE("run_experiment: table2 accounting adds up to R") {
  ExperimentConfig config = small_config(ExperimentKind::table2);
  config.replicates = 4;
  const ResultTable table = run_experiment(config);
  const double count = table.stats.at("reg_count");
  const double outliers = table.stats.at("reg_outliers");
  const double failures = table.stats.at("reg_failures");
  CHECK(count + outliers + failures == doctest::Approx(4.0));
}

TEST_CASE("full pipeline: positive path rescaling leaves alpha_hat unchanged") {
  ExperimentConfig config = small_config(ExperimentKind::table2);
  RandomStream rng = make_stream(child_seed(5, 0));
  const TimeGrid times{0.0, config.delta, config.n};
  PathSample path =
      simulate_hfsm(StabilityIndex(config.alpha), config.hurst, config.spectral_grid(),
                    times, rng);

  const MollifierSpec spec1 = config.mollifier(20.0);
  const MollifierSpec spec2 = config.mollifier(30.0);
  RegressionPolicy policy;
  const EstimationReport base = estimate_alpha_regression(path, spec1, spec2, 25, policy);

  PathSample scaled4 = path;
  for (auto& v : scaled4.values) v *= 4.0;
  const EstimationReport by4 = estimate_alpha_regression(scaled4, spec1, spec2, 25, policy);
  CHECK(by4.alpha_hat == base.alpha_hat);  // bitwise for powers of two

  PathSample scaled7 = path;
  for (auto& v : scaled7.values) v *= 7.0;
  const EstimationReport by7 = estimate_alpha_regression(scaled7, spec1, spec2, 25, policy);
  CHECK(by7.alpha_hat == doctest::Approx(base.alpha_hat).epsilon(1e-9));
}

TEST_SUITE_END();
