#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hsp/errors.hpp"
#include "hsp/io.hpp"
#include "hsp/mollify.hpp"

using namespace hsp;

namespace {

std::filesystem::path test_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "hsp_test_io";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("path CSV round trip is exact, sidecar carries the seed") {
  PathSample path;
  path.t0 = 0.5;
  path.delta = 0.01;
  path.values = {0.0, -1.25e-7, 3.14159, 2.0 / 3.0, 1e17, -4.9406564584124654e-310};
  path.meta.descriptor = "hfsm(alpha=1.5,H=0.75)";
  path.meta.seed = 777;

  const auto file = test_dir() / "path.csv";
  write_path_csv(path, file);
  write_path_metadata(path, file, {{"alpha", "1.5"}});
  const PathSample loaded = read_path_csv(file);

  CHECK(loaded.t0 == path.t0);
  CHECK(loaded.delta == path.delta);
  REQUIRE(loaded.size() == path.size());
  for (std::size_t j = 0; j < path.size(); ++j) {
    CHECK(loaded.values[j] == path.values[j]);  // %.17g round trips doubles
  }
  CHECK(loaded.meta.seed == 777);
  CHECK(loaded.meta.descriptor == path.meta.descriptor);
}

TEST_CASE("path CSV guards: header and equidistance") {
  const auto file = test_dir() / "bad.csv";
  {
    std::ofstream out(file);
    out << "time,value\n0,1\n1,2\n";
  }
  CHECK_THROWS_AS(read_path_csv(file), ConfigError);
  {
    std::ofstream out(file);
    out << "t,x\n0,1\n1,2\n2.5,3\n";
  }
  CHECK_THROWS_AS(read_path_csv(file), ConfigError);
}

TEST_CASE("kernel CSV: l,t,v rows for every discretization point") {
  MollifierSpec spec;
  spec.theta = 20.0;
  spec.delta = 0.01;
  spec.support_points = 100;
  const auto file = test_dir() / "kernel.csv";
  write_kernel_csv(discretize_kernel(spec), file);

  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  CHECK(line == "l,t,v");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 101);
}

TEST_CASE("report JSON exposes the provenance fields") {
  EstimationReport report;
  report.alpha_hat = 1.47;
  report.intercept = -0.8;
  report.interval = Interval{1.0, 42.0};
  report.eigen_min = 3.0;
  report.eigen_max = 410.0;
  report.outlier = false;
  report.seed = 12345;
  report.config_digest = "feedc0de";

  const auto file = test_dir() / "report.json";
  write_report_json(report, file);
  std::ifstream in(file);
  nlohmann::json j;
  in >> j;
  CHECK(j["alpha_hat"].get<double>() == doctest::Approx(1.47));
  CHECK(j["H_hat"].is_null());
  CHECK(j["intercept"].get<double>() == doctest::Approx(-0.8));
  CHECK(j["interval"][1].get<double>() == doctest::Approx(42.0));
  CHECK(j["eigen_min"].get<double>() == doctest::Approx(3.0));
  CHECK(j["eigen_max"].get<double>() == doctest::Approx(410.0));
  CHECK(j["outlier"].get<bool>() == false);
  CHECK(j["seed"].get<std::uint64_t>() == 12345);
  CHECK(j["config_digest"].get<std::string>() == "feedc0de");
}

TEST_SUITE_END();
