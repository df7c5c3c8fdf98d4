#include "hsp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hsp/errors.hpp"
#include "hsp/io.hpp"

namespace hsp {

using nlohmann::json;

namespace {
constexpr const char* kVersion = "hsproc 0.1.0";
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::table1: return "table1";
    case ExperimentKind::table2: return "table2";
    case ExperimentKind::table3: return "table3";
    case ExperimentKind::custom: return "custom";
  }
  return "custom";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "table1") return ExperimentKind::table1;
  if (name == "table2") return ExperimentKind::table2;
  if (name == "table3") return ExperimentKind::table3;
  if (name == "custom") return ExperimentKind::custom;
  throw ConfigError("unknown experiment kind: " + name);
}

SpectralGrid ExperimentConfig::spectral_grid() const {
  SpectralGrid grid;
  grid.x_min = grid_x_min;
  grid.x_max = grid_x_max > 0.0 ? grid_x_max : SpectralGrid::default_for_mesh(delta).x_max;
  grid.m_cells = grid_cells;
  grid.spacing = grid_spacing;
  return grid;
}

MollifierSpec ExperimentConfig::mollifier(double theta) const {
  MollifierSpec spec;
  spec.p = p;
  spec.q = q;
  spec.theta = theta;
  spec.support_points = support_points;
  spec.delta = delta;
  return spec;
}

namespace {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void append_field(std::string& out, const char* name, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  out += name;
  out += '=';
  out += buffer;
  out += ';';
}

void append_field(std::string& out, const char* name, std::uint64_t value) {
  out += name;
  out += '=';
  out += std::to_string(value);
  out += ';';
}

}  // namespace

std::string config_digest(const ExperimentConfig& config) {
  // estimation-relevant fields only; workers and output options are excluded
  std::string canon;
  canon += "kind=" + to_string(config.kind) + ";";
  append_field(canon, "alpha", config.alpha);
  append_field(canon, "hurst", config.hurst);
  append_field(canon, "delta", config.delta);
  append_field(canon, "n", static_cast<std::uint64_t>(config.n));
  append_field(canon, "t0", config.t0);
  append_field(canon, "grid_x_min", config.grid_x_min);
  append_field(canon, "grid_x_max", config.grid_x_max);
  append_field(canon, "grid_cells", static_cast<std::uint64_t>(config.grid_cells));
  canon += std::string("grid_spacing=") +
           (config.grid_spacing == GridSpacing::linear ? "linear" : "symmetric-log") + ";";
  append_field(canon, "p", config.p);
  append_field(canon, "q", config.q);
  append_field(canon, "support_points", static_cast<std::uint64_t>(config.support_points));
  append_field(canon, "theta1", config.theta1);
  append_field(canon, "theta2", config.theta2);
  append_field(canon, "peak_count", static_cast<std::uint64_t>(config.peak_count));
  append_field(canon, "replicates", static_cast<std::uint64_t>(config.replicates));
  append_field(canon, "master_seed", config.master_seed);
  append_field(canon, "interval_lower", config.policy.interval_lower);
  append_field(canon, "ratio_threshold", config.policy.ratio_threshold);
  append_field(canon, "jump_factor", config.policy.jump_factor);
  append_field(canon, "exclusion_bins", static_cast<std::uint64_t>(config.policy.exclusion_bins));
  append_field(canon, "l_points", static_cast<std::uint64_t>(config.policy.l_points));
  append_field(canon, "grid_points", static_cast<std::uint64_t>(config.policy.grid_points));
  append_field(canon, "grid_max", config.policy.grid_max);
  append_field(canon, "bandwidth", config.policy.bandwidth.value_or(0.0));
  append_field(canon, "metric_lo", config.metric_lo);
  append_field(canon, "metric_hi", config.metric_hi);

  char digest[17];
  std::snprintf(digest, sizeof(digest), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));
  return digest;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  json j;
  in >> j;

  ExperimentConfig c;
  c.kind = experiment_kind_from_string(j.value("kind", std::string("custom")));
  c.alpha = j.value("alpha", c.alpha);
  c.hurst = j.value("hurst", c.hurst);
  c.delta = j.value("delta", c.delta);
  c.n = j.value("n", c.n);
  c.t0 = j.value("t0", c.t0);
  c.grid_x_min = j.value("grid_x_min", c.grid_x_min);
  c.grid_x_max = j.value("grid_x_max", c.grid_x_max);
  c.grid_cells = j.value("grid_cells", c.grid_cells);
  const std::string spacing = j.value("grid_spacing", std::string("symmetric-log"));
  if (spacing == "linear") {
    c.grid_spacing = GridSpacing::linear;
  } else if (spacing == "symmetric-log") {
    c.grid_spacing = GridSpacing::symmetric_log;
  } else {
    throw ConfigError("unknown grid_spacing: " + spacing);
  }
  c.p = j.value("p", c.p);
  c.q = j.value("q", c.q);
  c.support_points = j.value("support_points", c.support_points);
  c.theta1 = j.value("theta1", c.theta1);
  c.theta2 = j.value("theta2", c.theta2);
  c.peak_count = j.value("peak_count", c.peak_count);
  c.replicates = j.value("replicates", c.replicates);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.workers = j.value("workers", c.workers);
  c.metric_lo = j.value("metric_lo", c.metric_lo);
  c.metric_hi = j.value("metric_hi", c.metric_hi);
  c.density_csv_replicates = j.value("density_csv_replicates", c.density_csv_replicates);
  if (j.contains("policy")) {
    const json& p = j["policy"];
    c.policy.interval_lower = p.value("interval_lower", c.policy.interval_lower);
    c.policy.ratio_threshold = p.value("ratio_threshold", c.policy.ratio_threshold);
    c.policy.jump_factor = p.value("jump_factor", c.policy.jump_factor);
    c.policy.exclusion_bins = p.value("exclusion_bins", c.policy.exclusion_bins);
    c.policy.l_points = p.value("l_points", c.policy.l_points);
    c.policy.grid_points = p.value("grid_points", c.policy.grid_points);
    c.policy.grid_max = p.value("grid_max", c.policy.grid_max);
    if (p.contains("bandwidth") && !p["bandwidth"].is_null()) {
      c.policy.bandwidth = p["bandwidth"].get<double>();
    }
  }
  return c;
}

namespace {

json config_to_json(const ExperimentConfig& c) {
  json p = {{"interval_lower", c.policy.interval_lower},
            {"ratio_threshold", c.policy.ratio_threshold},
            {"jump_factor", c.policy.jump_factor},
            {"exclusion_bins", c.policy.exclusion_bins},
            {"l_points", c.policy.l_points},
            {"grid_points", c.policy.grid_points},
            {"grid_max", c.policy.grid_max}};
  if (c.policy.bandwidth) {
    p["bandwidth"] = *c.policy.bandwidth;
  } else {
    p["bandwidth"] = nullptr;
  }
  return json{{"kind", to_string(c.kind)},
              {"alpha", c.alpha},
              {"hurst", c.hurst},
              {"delta", c.delta},
              {"n", c.n},
              {"t0", c.t0},
              {"grid_x_min", c.grid_x_min},
              {"grid_x_max", c.grid_x_max},
              {"grid_cells", c.grid_cells},
              {"grid_spacing",
               c.grid_spacing == GridSpacing::linear ? "linear" : "symmetric-log"},
              {"p", c.p},
              {"q", c.q},
              {"support_points", c.support_points},
              {"theta1", c.theta1},
              {"theta2", c.theta2},
              {"peak_count", c.peak_count},
              {"replicates", c.replicates},
              {"master_seed", c.master_seed},
              {"workers", c.workers},
              {"metric_lo", c.metric_lo},
              {"metric_hi", c.metric_hi},
              {"density_csv_replicates", c.density_csv_replicates},
              {"policy", p}};
}

}  // namespace

void save_config(const ExperimentConfig& config, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write config file: " + file.string());
  out << config_to_json(config).dump(2) << "\n";
}

double l2_distance(const DensityEstimate& est, const std::function<double(double)>& truth,
                   double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("l2_distance: need lo < hi");
  const auto& grid = est.grid;
  if (grid.size() < 2 || grid.front() > lo + 1e-12 || grid.back() < hi - 1e-12) {
    throw std::invalid_argument("l2_distance: estimate grid does not cover the interval");
  }

  auto squared_diff_at_node = [&](std::size_t i) {
    const double t = truth(grid[i]);
    if (!std::isfinite(t)) throw std::invalid_argument("l2_distance: truth not finite on grid");
    const double d = est.values[i] - t;
    return d * d;
  };
  auto est_interp = [&](double z) {
    auto it = std::lower_bound(grid.begin(), grid.end(), z);
    if (it == grid.begin()) return est.values.front();
    if (it == grid.end()) return est.values.back();
    const std::size_t hi_i = static_cast<std::size_t>(it - grid.begin());
    const double frac = (z - grid[hi_i - 1]) / (grid[hi_i] - grid[hi_i - 1]);
    return est.values[hi_i - 1] + frac * (est.values[hi_i] - est.values[hi_i - 1]);
  };
  auto squared_diff_at = [&](double z) {
    const double t = truth(z);
    if (!std::isfinite(t)) throw std::invalid_argument("l2_distance: truth not finite");
    const double d = est_interp(z) - t;
    return d * d;
  };

  // trapezoid over lo, interior grid nodes, hi
  double acc = 0.0;
  double prev_z = lo;
  double prev_v = squared_diff_at(lo);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= lo) continue;
    if (grid[i] >= hi) break;
    const double v = squared_diff_at_node(i);
    acc += 0.5 * (prev_v + v) * (grid[i] - prev_z);
    prev_z = grid[i];
    prev_v = v;
  }
  const double v_hi = squared_diff_at(hi);
  acc += 0.5 * (prev_v + v_hi) * (hi - prev_z);
  return acc;
}

namespace {

struct MetricSet {
  bool l2 = false;
  bool regression = false;
  bool gamma = false;
};

MetricSet metric_set(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::table1: return {true, false, false};
    case ExperimentKind::table2: return {false, true, false};
    case ExperimentKind::table3: return {false, false, true};
    case ExperimentKind::custom: return {true, true, true};
  }
  return {};
}

ReplicateResult run_replicate(const ExperimentConfig& config, std::size_t index,
                              const std::string& digest) {
  const MetricSet metrics = metric_set(config.kind);
  ReplicateResult result;
  result.seed = child_seed(config.master_seed, index);

  RandomStream rng = make_stream(result.seed);
  const StabilityIndex alpha(config.alpha);
  const TimeGrid times{config.t0, config.delta, config.n};

  auto note_failure = [&result](const char* stage, const std::exception& error) {
    result.failed = true;
    if (!result.failure.empty()) result.failure += " | ";
    result.failure += std::string(stage) + ": " + error.what();
  };

  PathSample path;
  try {
    path = simulate_hfsm(alpha, config.hurst, config.spectral_grid(), times, rng);
    path.meta.seed = result.seed;
  } catch (const std::exception& error) {
    note_failure("simulate", error);
    return result;
  }

  const MollifierSpec spec1 = config.mollifier(config.theta1);

  if (metrics.l2 || metrics.gamma) {
    try {
      const PathSample smooth = mollify_path(path, discretize_kernel(spec1));
      const FrequencyEstimates freqs =
          extract_peaks(periodogram(smooth), config.peak_count, config.policy.exclusion_bins);

      if (metrics.gamma) {
        EstimationReport report = estimate_hfsm(freqs, spec1);
        report.seed = result.seed;
        report.config_digest = digest;
        result.gamma = report;
      }
      if (metrics.l2) {
        const double grid_max = std::max(
            config.policy.grid_max > 0.0 ? config.policy.grid_max : 5.0 * config.theta1,
            config.metric_hi);
        const std::vector<double> grid =
            uniform_grid(0.0, grid_max, config.policy.grid_points);
        const DensityEstimate density = kde(freqs, grid, config.policy.bandwidth);
        auto truth = [&](double z) {
          return rho_hfsm(alpha, config.hurst, config.p, config.q, config.theta1, z);
        };
        result.l2 = l2_distance(density, truth, config.metric_lo, config.metric_hi);
        if (index < config.density_csv_replicates) {
          result.overlays.reserve(density.grid.size());
          for (std::size_t g = 0; g < density.grid.size(); ++g) {
            result.overlays.push_back({density.grid[g], truth(density.grid[g]),
                                       density.values[g], config.theta1, index});
          }
        }
      }
    } catch (const std::exception& error) {
      note_failure(metrics.l2 ? "kde-l2" : "gamma", error);
    }
  }

  if (metrics.regression) {
    try {
      const MollifierSpec spec2 = config.mollifier(config.theta2);
      EstimationReport report = estimate_alpha_regression(path, spec1, spec2,
                                                          config.peak_count, config.policy);
      report.seed = result.seed;
      report.config_digest = digest;
      result.regression = report;
    } catch (const std::exception& error) {
      note_failure("regression", error);
    }
  }
  return result;
}

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double se = 0.0;
};

Moments moments(std::vector<double> values) {
  Moments m;
  m.count = values.size();
  if (values.empty()) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    m.se = sd / std::sqrt(static_cast<double>(values.size()));
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  m.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return m;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
  if (config.replicates < 1) throw ConfigError("run_experiment: need at least 1 replicate");
  ResultTable table;
  table.config = config;
  table.digest = config_digest(config);
  table.replicates.resize(config.replicates);

  const std::size_t workers = std::max<std::size_t>(1, config.workers);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= config.replicates) break;
      table.replicates[index] = run_replicate(config, index, table.digest);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // deterministic fold in replicate order
  const MetricSet metrics = metric_set(config.kind);
  std::vector<double> l2_values, reg_alpha, gamma_alpha, gamma_hurst;
  std::size_t l2_failures = 0, reg_failures = 0, gamma_failures = 0;
  std::size_t reg_outliers = 0, gamma_flagged = 0, failures = 0;
  for (const ReplicateResult& r : table.replicates) {
    if (r.failed) ++failures;
    if (metrics.l2) {
      if (r.l2) {
        l2_values.push_back(*r.l2);
      } else {
        ++l2_failures;
      }
    }
    if (metrics.regression) {
      if (r.regression) {
        if (r.regression->outlier) {
          ++reg_outliers;
        } else {
          reg_alpha.push_back(r.regression->alpha_hat);
        }
      } else {
        ++reg_failures;
      }
    }
    if (metrics.gamma) {
      if (r.gamma) {
        gamma_alpha.push_back(r.gamma->alpha_hat);
        gamma_hurst.push_back(*r.gamma->hurst_hat);
        if (r.gamma->outlier) ++gamma_flagged;
      } else {
        ++gamma_failures;
      }
    }
    for (const auto& row : r.overlays) table.overlays.push_back(row);
  }

  auto& stats = table.stats;
  stats["replicates"] = static_cast<double>(config.replicates);
  stats["failures"] = static_cast<double>(failures);
  if (metrics.l2) {
    const Moments m = moments(l2_values);
    stats["l2_count"] = static_cast<double>(m.count);
    stats["l2_mean"] = m.mean;
    stats["l2_median"] = m.median;
    stats["l2_se"] = m.se;
    stats["l2_failures"] = static_cast<double>(l2_failures);
  }
  if (metrics.regression) {
    const Moments m = moments(reg_alpha);
    stats["reg_count"] = static_cast<double>(m.count);
    stats["reg_mean_bias_alpha"] = m.mean - config.alpha;
    stats["reg_se_alpha"] = m.se;
    stats["reg_outliers"] = static_cast<double>(reg_outliers);
    stats["reg_failures"] = static_cast<double>(reg_failures);
  }
  if (metrics.gamma) {
    const Moments ma = moments(gamma_alpha);
    const Moments mh = moments(gamma_hurst);
    stats["gamma_count"] = static_cast<double>(ma.count);
    stats["gamma_mean_bias_alpha"] = ma.mean - config.alpha;
    stats["gamma_se_alpha"] = ma.se;
    stats["gamma_mean_bias_hurst"] = mh.mean - config.hurst;
    stats["gamma_se_hurst"] = mh.se;
    stats["gamma_flagged"] = static_cast<double>(gamma_flagged);
    stats["gamma_failures"] = static_cast<double>(gamma_failures);
  }
  return table;
}

namespace {

void write_table_csv(const ResultTable& table, const std::filesystem::path& file) {
  const ExperimentConfig& c = table.config;
  const MetricSet metrics = metric_set(c.kind);

  std::vector<std::pair<std::string, std::string>> cols;
  auto add = [&cols](const std::string& name, const std::string& value) {
    cols.emplace_back(name, value);
  };
  auto addf = [&](const std::string& name, double value) { add(name, format_double(value)); };
  auto stat = [&](const char* key) { return table.stats.count(key) ? table.stats.at(key) : 0.0; };

  add("kind", to_string(c.kind));
  addf("alpha", c.alpha);
  addf("H", c.hurst);
  addf("delta", c.delta);
  add("n", std::to_string(c.n));
  add("N", std::to_string(c.peak_count));
  add("kernel", c.mollifier(c.theta1).kernel_label());
  addf("theta1", c.theta1);
  if (metrics.regression) addf("theta2", c.theta2);
  add("R", std::to_string(c.replicates));
  if (metrics.l2) {
    addf("mean_sq_l2", stat("l2_mean"));
    addf("median_sq_l2", stat("l2_median"));
    addf("mc_se_l2", stat("l2_se"));
    add("R_effective_l2", format_double(stat("l2_count")));
  }
  if (metrics.regression) {
    addf("mean_bias_alpha_reg", stat("reg_mean_bias_alpha"));
    addf("mc_se_alpha_reg", stat("reg_se_alpha"));
    add("outliers", format_double(stat("reg_outliers")));
    add("R_effective_reg", format_double(stat("reg_count")));
  }
  if (metrics.gamma) {
    addf("mean_bias_alpha", stat("gamma_mean_bias_alpha"));
    addf("mean_bias_H", stat("gamma_mean_bias_hurst"));
    addf("mc_se_alpha", stat("gamma_se_alpha"));
    addf("mc_se_H", stat("gamma_se_hurst"));
    add("flagged", format_double(stat("gamma_flagged")));
  }
  add("R_effective", format_double(metrics.gamma   ? stat("gamma_count")
                                   : metrics.regression ? stat("reg_count")
                                                        : stat("l2_count")));
  add("failures", format_double(stat("failures")));
  add("digest", table.digest);

  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << cols[i].first << (i + 1 < cols.size() ? "," : "\n");
  }
  if (table.config.replicates == 0 || table.replicates.empty()) return;  // header only
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << cols[i].second << (i + 1 < cols.size() ? "," : "\n");
  }
}

void write_replicates_csv(const ResultTable& table, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << "replicate,seed,failed,l2,alpha_reg,intercept_reg,outlier_reg,alpha_gamma,"
         "hurst_gamma,flagged_gamma,failure\n";
  for (std::size_t i = 0; i < table.replicates.size(); ++i) {
    const ReplicateResult& r = table.replicates[i];
    out << i << ',' << r.seed << ',' << (r.failed ? 1 : 0) << ',';
    out << (r.l2 ? format_double(*r.l2) : "") << ',';
    if (r.regression) {
      out << format_double(r.regression->alpha_hat) << ','
          << format_double(r.regression->intercept.value_or(0.0)) << ','
          << (r.regression->outlier ? 1 : 0) << ',';
    } else {
      out << ",,,";
    }
    if (r.gamma) {
      out << format_double(r.gamma->alpha_hat) << ','
          << format_double(r.gamma->hurst_hat.value_or(0.0)) << ','
          << (r.gamma->outlier ? 1 : 0) << ',';
    } else {
      out << ",,,";
    }
    std::string failure = r.failure;
    std::replace(failure.begin(), failure.end(), ',', ';');
    std::replace(failure.begin(), failure.end(), '\n', ' ');
    out << '"' << failure << '"' << "\n";
  }
}

void write_overlays_csv(const ResultTable& table, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << "z,rho_true,rho_hat,theta,replicate\n";
  for (const auto& row : table.overlays) {
    out << format_double(row.z) << ',' << format_double(row.rho_true) << ','
        << format_double(row.rho_hat) << ',' << format_double(row.theta) << ','
        << row.replicate << "\n";
  }
}

void write_metadata_json(const ResultTable& table, const std::filesystem::path& file) {
  json meta;
  meta["digest"] = table.digest;
  meta["version"] = kVersion;
  meta["config"] = config_to_json(table.config);
  json seeds = json::array();
  for (const auto& r : table.replicates) seeds.push_back(r.seed);
  meta["child_seeds"] = seeds;
  json stats;
  for (const auto& [key, value] : table.stats) stats[key] = value;
  meta["stats"] = stats;
  // wall-clock timestamp; deliberately excluded from the digest
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["timestamp"] = stamp;

  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << meta.dump(2) << "\n";
}

}  // namespace

std::vector<std::filesystem::path> emit_outputs(const ResultTable& table,
                                                const std::filesystem::path& out_dir,
                                                const EmitOptions& options) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  if (options.table_csv) {
    const auto file = out_dir / "table.csv";
    write_table_csv(table, file);
    written.push_back(file);
  }
  if (options.replicate_csv) {
    const auto file = out_dir / "replicates.csv";
    write_replicates_csv(table, file);
    written.push_back(file);
  }
  if (options.overlay_csv && !table.overlays.empty()) {
    const auto file = out_dir / "density_overlays.csv";
    write_overlays_csv(table, file);
    written.push_back(file);
  }
  if (options.metadata_json) {
    const auto file = out_dir / "metadata.json";
    write_metadata_json(table, file);
    written.push_back(file);
  }
  return written;
}

}  // namespace hsp
