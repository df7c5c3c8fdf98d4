#include "hsp/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hsp/errors.hpp"

namespace hsp {

using nlohmann::json;

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_path_csv(const PathSample& path, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << "t,x\n";
  for (std::size_t j = 0; j < path.size(); ++j) {
    out << format_double(path.time_at(j)) << ',' << format_double(path.values[j]) << "\n";
  }
}

PathSample read_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line) || (line != "t,x" && line != "t,x\r")) {
    throw ConfigError("path CSV must start with header 't,x': " + file.string());
  }
  // strtod instead of stod: stod throws out_of_range on subnormal values
  auto parse = [&](const std::string& field) {
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end == field.c_str()) throw ConfigError("malformed CSV number: " + field);
    return value;
  };
  std::vector<double> t, x;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed CSV row: " + line);
    t.push_back(parse(line.substr(0, comma)));
    x.push_back(parse(line.substr(comma + 1)));
  }
  if (t.size() < 2) throw ConfigError("path CSV needs at least 2 rows");

  PathSample path;
  path.t0 = t.front();
  path.delta = t[1] - t[0];
  path.values = std::move(x);
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double expected = path.t0 + path.delta * static_cast<double>(j);
    if (std::abs(t[j] - expected) > 1e-6 * std::max(1.0, std::abs(expected))) {
      throw ConfigError("path CSV is not equidistant in t");
    }
  }
  path.validate();

  const auto sidecar = std::filesystem::path(file.string() + ".meta.json");
  if (std::filesystem::exists(sidecar)) {
    std::ifstream meta_in(sidecar);
    json meta;
    meta_in >> meta;
    path.meta.seed = meta.value("seed", std::uint64_t{0});
    path.meta.descriptor = meta.value("generator", std::string{});
    // the sidecar carries the exact mesh; the CSV times only determine it up
    // to subtraction rounding
    const double meta_delta = meta.value("delta", path.delta);
    const double meta_t0 = meta.value("t0", path.t0);
    if (std::abs(meta_delta - path.delta) < 1e-9 * std::max(1.0, std::abs(path.delta))) {
      path.delta = meta_delta;
    }
    if (std::abs(meta_t0 - path.t0) < 1e-9 * std::max(1.0, std::abs(path.t0))) {
      path.t0 = meta_t0;
    }
  }
  return path;
}

void write_path_metadata(const PathSample& path, const std::filesystem::path& csv_file,
                         const std::map<std::string, std::string>& extra) {
  json meta;
  meta["seed"] = path.meta.seed;
  meta["generator"] = path.meta.descriptor;
  meta["t0"] = path.t0;
  meta["delta"] = path.delta;
  meta["n"] = path.size();
  for (const auto& [key, value] : extra) meta[key] = value;

  const auto sidecar = std::filesystem::path(csv_file.string() + ".meta.json");
  std::ofstream out(sidecar);
  if (!out) throw ConfigError("cannot write " + sidecar.string());
  out << meta.dump(2) << "\n";
}

void write_kernel_csv(const DiscreteKernel& kernel, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << "l,t,v\n";
  const int big_l = kernel.support_points();
  for (int l = 0; l <= big_l; ++l) {
    const double t = kernel.theta * kernel.delta * (static_cast<double>(l) - 0.5 * big_l);
    out << l << ',' << format_double(t) << ','
        << format_double(kernel.values[static_cast<std::size_t>(l)]) << "\n";
  }
}

void write_periodogram_csv(const Periodogram& pg, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << "freq,ordinate\n";
  for (std::size_t j = 1; j <= pg.ordinates.size(); ++j) {
    out << format_double(pg.physical_frequency(j)) << ','
        << format_double(pg.ordinates[j - 1]) << "\n";
  }
}

void write_density_csv(const DensityEstimate& density, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << "z,rho_hat\n";
  for (std::size_t i = 0; i < density.grid.size(); ++i) {
    out << format_double(density.grid[i]) << ',' << format_double(density.values[i]) << "\n";
  }
}

void write_report_json(const EstimationReport& report, const std::filesystem::path& file) {
  json j;
  j["alpha_hat"] = report.alpha_hat;
  if (report.hurst_hat) j["H_hat"] = *report.hurst_hat; else j["H_hat"] = nullptr;
  if (report.intercept) j["intercept"] = *report.intercept; else j["intercept"] = nullptr;
  if (report.interval) {
    j["interval"] = {report.interval->lo, report.interval->hi};
  } else {
    j["interval"] = nullptr;
  }
  if (report.eigen_min) j["eigen_min"] = *report.eigen_min; else j["eigen_min"] = nullptr;
  if (report.eigen_max) j["eigen_max"] = *report.eigen_max; else j["eigen_max"] = nullptr;
  if (report.gamma) {
    j["gamma_shape"] = report.gamma->shape;
    j["gamma_rate"] = report.gamma->rate;
  }
  j["outlier"] = report.outlier;
  j["seed"] = report.seed;
  j["config_digest"] = report.config_digest;

  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << j.dump(2) << "\n";
}

}  // namespace hsp
