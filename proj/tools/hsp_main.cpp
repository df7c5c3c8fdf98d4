// Command line front end: simulation, mollification, spectral estimation and
// Monte Carlo experiment cells for harmonizable stable processes.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>

#include "hsp/experiment.hpp"
#include "hsp/inference.hpp"
#include "hsp/io.hpp"
#include "hsp/mollify.hpp"
#include "hsp/pathgen.hpp"
#include "hsp/spectral.hpp"
#include "hsp/stable.hpp"

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out_dir = "out";
  std::string config_file;
};

hsp::MollifierSpec make_spec(double p, double q, double theta, int support, double delta) {
  hsp::MollifierSpec spec;
  spec.p = p;
  spec.q = q;
  spec.theta = theta;
  spec.support_points = support;
  spec.delta = delta;
  return spec;
}

void add_defaults_for(hsp::ExperimentConfig& config, const std::string& kind) {
  config.kind = hsp::experiment_kind_from_string(kind);
  switch (config.kind) {
    case hsp::ExperimentKind::table1:
      config.alpha = 1.5;
      config.hurst = 0.25;
      config.peak_count = 200;
      break;
    case hsp::ExperimentKind::table2:
      config.alpha = 1.5;
      config.hurst = 0.25;
      config.peak_count = 150;
      break;
    case hsp::ExperimentKind::table3:
      config.alpha = 1.5;
      config.hurst = 0.75;
      config.peak_count = 200;
      break;
    case hsp::ExperimentKind::custom:
      break;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and non-ergodic inference for harmonizable stable processes"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "master seed");
  app.add_option("--workers", global.workers, "worker threads for experiments");
  app.add_option("--out-dir", global.out_dir, "output directory for experiments");
  app.add_option("--config", global.config_file, "JSON config file (experiment)");

  // ---- simulate ------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "simulate a process path to CSV");
  std::string sim_kind = "hfsm";
  double sim_alpha = 1.5, sim_hurst = 0.75, sim_delta = 0.01, sim_t0 = 0.0;
  std::size_t sim_n = 10000, sim_cells = std::size_t{1} << 16, sim_truncation = 2000;
  double sim_x_min = 1e-3, sim_x_max = 0.0;
  std::string sim_spacing = "log";
  double sim_p = 2.0, sim_q = 2.0, sim_theta = 20.0;
  std::string sim_out;
  simulate->add_option("--kind", sim_kind, "hfsm | lepage-hfsm")
      ->check(CLI::IsMember({"hfsm", "lepage-hfsm"}));
  simulate->add_option("--alpha", sim_alpha, "index of stability in (0,2)");
  simulate->add_option("--hurst", sim_hurst, "Hurst parameter in (0,1)");
  simulate->add_option("-n,--samples", sim_n, "number of samples");
  simulate->add_option("--delta", sim_delta, "mesh size");
  simulate->add_option("--t0", sim_t0, "time origin");
  simulate->add_option("--x-min", sim_x_min, "central hole radius of the frequency grid");
  simulate->add_option("--x-max", sim_x_max, "frequency cutoff (0 = 4 pi / delta)");
  simulate->add_option("--cells", sim_cells, "number of frequency cells");
  simulate->add_option("--spacing", sim_spacing, "linear | log")
      ->check(CLI::IsMember({"linear", "log"}));
  simulate->add_option("--p", sim_p, "weight exponent p (lepage-hfsm)");
  simulate->add_option("--q", sim_q, "weight exponent q (lepage-hfsm)");
  simulate->add_option("--theta", sim_theta, "mollifier scale (lepage-hfsm)");
  simulate->add_option("--truncation", sim_truncation, "LePage series truncation");
  simulate->add_option("--out", sim_out, "output CSV file")->required();

  // ---- mollify ---------------------------------------------------------------
  auto* mollify = app.add_subcommand("mollify", "convolve a path with a smoothing kernel");
  std::string mol_in, mol_out, mol_kernel_out;
  double mol_p = 2.0, mol_q = 2.0, mol_theta = 20.0;
  int mol_support = 100;
  mollify->add_option("--in", mol_in, "input path CSV")->required();
  mollify->add_option("--out", mol_out, "output path CSV")->required();
  mollify->add_option("--p", mol_p, "weight exponent p");
  mollify->add_option("--q", mol_q, "weight exponent q");
  mollify->add_option("--theta", mol_theta, "kernel scale");
  mollify->add_option("--support-points", mol_support, "discretization points L (even)");
  mollify->add_option("--kernel-out", mol_kernel_out, "dump the discretized kernel as l,t,v CSV");

  // ---- periodogram -----------------------------------------------------------
  auto* pgram = app.add_subcommand("periodogram", "periodogram of a path as freq,ordinate CSV");
  std::string pg_in, pg_out;
  pgram->add_option("--in", pg_in, "input path CSV")->required();
  pgram->add_option("--out", pg_out, "output CSV")->required();

  // ---- kde -------------------------------------------------------------------
  auto* kde_cmd = app.add_subcommand(
      "kde", "peak frequencies + kernel density estimate of the spectral density");
  std::string kde_in, kde_out;
  std::size_t kde_peaks = 150;
  int kde_exclusion = 4;
  double kde_bandwidth = 0.0, kde_grid_max = 100.0;
  std::size_t kde_grid_points = 2048;
  kde_cmd->add_option("--in", kde_in, "input (mollified) path CSV")->required();
  kde_cmd->add_option("--out", kde_out, "output z,rho_hat CSV")->required();
  kde_cmd->add_option("--n-peaks", kde_peaks, "number of frequencies to extract");
  kde_cmd->add_option("--exclusion-bins", kde_exclusion, "bins zeroed around each peak");
  kde_cmd->add_option("--bandwidth", kde_bandwidth, "KDE bandwidth (0 = Silverman)");
  kde_cmd->add_option("--grid-max", kde_grid_max, "upper end of the evaluation grid");
  kde_cmd->add_option("--grid-points", kde_grid_points, "evaluation grid size");

  // ---- estimate-alpha ----------------------------------------------------------
  auto* est_alpha = app.add_subcommand(
      "estimate-alpha", "log-ratio regression estimate of alpha from one path");
  std::string ea_in, ea_out;
  double ea_p = 2.0, ea_q = 2.0, ea_theta1 = 20.0, ea_theta2 = 30.0;
  int ea_support = 100;
  std::size_t ea_peaks = 150;
  hsp::RegressionPolicy ea_policy;
  double ea_bandwidth = 0.0;
  est_alpha->add_option("--in", ea_in, "input path CSV")->required();
  est_alpha->add_option("--out", ea_out, "output report JSON")->required();
  est_alpha->add_option("--p", ea_p, "weight exponent p");
  est_alpha->add_option("--q", ea_q, "weight exponent q");
  est_alpha->add_option("--theta1", ea_theta1, "first kernel scale");
  est_alpha->add_option("--theta2", ea_theta2, "second kernel scale");
  est_alpha->add_option("--support-points", ea_support, "kernel points L");
  est_alpha->add_option("--n-peaks", ea_peaks, "frequencies per mollification");
  est_alpha->add_option("--exclusion-bins", ea_policy.exclusion_bins, "peak exclusion radius");
  est_alpha->add_option("--interval-lower", ea_policy.interval_lower, "lower abscissa bound");
  est_alpha->add_option("--ratio-threshold", ea_policy.ratio_threshold, "density ratio floor");
  est_alpha->add_option("--jump-factor", ea_policy.jump_factor, "consecutive ratio jump cap");
  est_alpha->add_option("--l-points", ea_policy.l_points, "regression abscissa count");
  est_alpha->add_option("--grid-max", ea_policy.grid_max, "KDE grid end (0 = 5 max theta)");
  est_alpha->add_option("--bandwidth", ea_bandwidth, "KDE bandwidth (0 = Silverman)");

  // ---- estimate-hfsm -------------------------------------------------------------
  auto* est_hfsm = app.add_subcommand(
      "estimate-hfsm", "closed-form Gamma estimate of (alpha, H) from one path");
  std::string eh_in, eh_out;
  double eh_p = 2.0, eh_q = 2.0, eh_theta = 20.0;
  int eh_support = 100, eh_exclusion = 4;
  std::size_t eh_peaks = 200;
  est_hfsm->add_option("--in", eh_in, "input path CSV")->required();
  est_hfsm->add_option("--out", eh_out, "output report JSON")->required();
  est_hfsm->add_option("--p", eh_p, "weight exponent p");
  est_hfsm->add_option("--q", eh_q, "weight exponent q");
  est_hfsm->add_option("--theta", eh_theta, "kernel scale");
  est_hfsm->add_option("--support-points", eh_support, "kernel points L");
  est_hfsm->add_option("--n-peaks", eh_peaks, "number of frequencies");
  est_hfsm->add_option("--exclusion-bins", eh_exclusion, "peak exclusion radius");

  // ---- experiment ------------------------------------------------------------------
  auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo experiment cell");
  std::string exp_kind = "custom";
  experiment->add_option("kind", exp_kind, "table1 | table2 | table3 | custom")
      ->check(CLI::IsMember({"table1", "table2", "table3", "custom"}));
  double exp_alpha = 0.0, exp_hurst = 0.0, exp_theta1 = 0.0, exp_theta2 = 0.0;
  std::size_t exp_n = 0, exp_peaks = 0, exp_replicates = 0, exp_overlays = 0;
  auto* o_alpha = experiment->add_option("--alpha", exp_alpha, "override alpha");
  auto* o_hurst = experiment->add_option("--hurst", exp_hurst, "override H");
  auto* o_n = experiment->add_option("-n,--samples", exp_n, "override path length");
  auto* o_peaks = experiment->add_option("--n-peaks", exp_peaks, "override N");
  auto* o_reps = experiment->add_option("--replicates", exp_replicates, "override R");
  auto* o_theta1 = experiment->add_option("--theta1", exp_theta1, "override theta1");
  auto* o_theta2 = experiment->add_option("--theta2", exp_theta2, "override theta2");
  experiment->add_option("--density-csv-replicates", exp_overlays,
                         "emit density overlays for the first k replicates");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      hsp::RandomStream rng = hsp::make_stream(global.seed);
      const hsp::TimeGrid times{sim_t0, sim_delta, sim_n};
      hsp::PathSample path;
      std::map<std::string, std::string> extra;
      if (sim_kind == "hfsm") {
        hsp::SpectralGrid grid = hsp::SpectralGrid::default_for_mesh(sim_delta);
        grid.x_min = sim_x_min;
        if (sim_x_max > 0.0) grid.x_max = sim_x_max;
        grid.m_cells = sim_cells;
        grid.spacing = sim_spacing == "linear" ? hsp::GridSpacing::linear
                                               : hsp::GridSpacing::symmetric_log;
        path = hsp::simulate_hfsm(hsp::StabilityIndex(sim_alpha), sim_hurst, grid, times, rng);
        extra = {{"alpha", hsp::format_double(sim_alpha)},
                 {"hurst", hsp::format_double(sim_hurst)},
                 {"x_min", hsp::format_double(grid.x_min)},
                 {"x_max", hsp::format_double(grid.x_max)},
                 {"cells", std::to_string(grid.m_cells)},
                 {"spacing", sim_spacing}};
      } else {
        const hsp::MollifierSpec spec = make_spec(sim_p, sim_q, sim_theta, 100, sim_delta);
        const hsp::StabilityIndex alpha(sim_alpha);
        const hsp::FrequencyDensity rho = hsp::hfsm_frequency_density(alpha, sim_hurst, spec);
        const double mass = hsp::hfsm_mollified_mass(alpha, sim_hurst, spec);
        auto sim = hsp::simulate_lepage(alpha, rho, mass, sim_truncation, times, rng);
        path = std::move(sim.path);
        extra = {{"alpha", hsp::format_double(sim_alpha)},
                 {"hurst", hsp::format_double(sim_hurst)},
                 {"theta", hsp::format_double(sim_theta)},
                 {"truncation", std::to_string(sim_truncation)},
                 {"total_mass", hsp::format_double(mass)}};
        if (sim.ensemble.truncation_warning) {
          std::fprintf(stderr, "warning: LePage truncation rms %.3g of the marginal scale\n",
                       sim.ensemble.truncation_rms);
        }
      }
      path.meta.seed = global.seed;
      hsp::write_path_csv(path, sim_out);
      hsp::write_path_metadata(path, sim_out, extra);
      std::printf("wrote %s (%zu samples)\n", sim_out.c_str(), path.size());
    }

    if (mollify->parsed()) {
      const hsp::PathSample path = hsp::read_path_csv(mol_in);
      const hsp::MollifierSpec spec =
          make_spec(mol_p, mol_q, mol_theta, mol_support, path.delta);
      const hsp::DiscreteKernel kernel = hsp::discretize_kernel(spec);
      if (!mol_kernel_out.empty()) {
        hsp::write_kernel_csv(kernel, mol_kernel_out);
        std::printf("wrote %s\n", mol_kernel_out.c_str());
      }
      const hsp::PathSample smooth = hsp::mollify_path(path, kernel);
      hsp::write_path_csv(smooth, mol_out);
      hsp::write_path_metadata(smooth, mol_out,
                               {{"theta", hsp::format_double(mol_theta)},
                                {"p", hsp::format_double(mol_p)},
                                {"q", hsp::format_double(mol_q)}});
      std::printf("wrote %s (%zu samples)\n", mol_out.c_str(), smooth.size());
    }

    if (pgram->parsed()) {
      const hsp::Periodogram pg = hsp::periodogram(hsp::read_path_csv(pg_in));
      hsp::write_periodogram_csv(pg, pg_out);
      std::printf("wrote %s (%zu bins)\n", pg_out.c_str(), pg.ordinates.size());
    }

    if (kde_cmd->parsed()) {
      const hsp::PathSample path = hsp::read_path_csv(kde_in);
      const hsp::FrequencyEstimates freqs =
          hsp::extract_peaks(hsp::periodogram(path), kde_peaks, kde_exclusion);
      const std::vector<double> grid = hsp::uniform_grid(0.0, kde_grid_max, kde_grid_points);
      const hsp::DensityEstimate density =
          hsp::kde(freqs, grid,
                   kde_bandwidth > 0.0 ? std::optional<double>(kde_bandwidth) : std::nullopt);
      hsp::write_density_csv(density, kde_out);
      std::printf("wrote %s (bandwidth %.6g, N=%zu)\n", kde_out.c_str(), density.bandwidth,
                  density.n_used);
    }

    if (est_alpha->parsed()) {
      const hsp::PathSample path = hsp::read_path_csv(ea_in);
      const hsp::MollifierSpec spec1 = make_spec(ea_p, ea_q, ea_theta1, ea_support, path.delta);
      const hsp::MollifierSpec spec2 = make_spec(ea_p, ea_q, ea_theta2, ea_support, path.delta);
      if (ea_bandwidth > 0.0) ea_policy.bandwidth = ea_bandwidth;
      const hsp::EstimationReport report =
          hsp::estimate_alpha_regression(path, spec1, spec2, ea_peaks, ea_policy);
      hsp::write_report_json(report, ea_out);
      std::printf("alpha_hat = %.6g%s (report: %s)\n", report.alpha_hat,
                  report.outlier ? " [outlier]" : "", ea_out.c_str());
    }

    if (est_hfsm->parsed()) {
      const hsp::PathSample path = hsp::read_path_csv(eh_in);
      const hsp::MollifierSpec spec = make_spec(eh_p, eh_q, eh_theta, eh_support, path.delta);
      const hsp::PathSample smooth = hsp::mollify_path(path, hsp::discretize_kernel(spec));
      const hsp::FrequencyEstimates freqs =
          hsp::extract_peaks(hsp::periodogram(smooth), eh_peaks, eh_exclusion);
      hsp::EstimationReport report = hsp::estimate_hfsm(freqs, spec);
      report.seed = path.meta.seed;
      hsp::write_report_json(report, eh_out);
      std::printf("alpha_hat = %.6g, H_hat = %.6g%s (report: %s)\n", report.alpha_hat,
                  *report.hurst_hat, report.outlier ? " [outlier]" : "", eh_out.c_str());
    }

    if (experiment->parsed()) {
      hsp::ExperimentConfig config;
      if (!global.config_file.empty()) {
        config = hsp::load_config(global.config_file);
        config.kind = hsp::experiment_kind_from_string(exp_kind);
      } else {
        add_defaults_for(config, exp_kind);
      }
      config.master_seed = global.seed;
      config.workers = global.workers;
      if (o_alpha->count() > 0) config.alpha = exp_alpha;
      if (o_hurst->count() > 0) config.hurst = exp_hurst;
      if (o_n->count() > 0) config.n = exp_n;
      if (o_peaks->count() > 0) config.peak_count = exp_peaks;
      if (o_reps->count() > 0) config.replicates = exp_replicates;
      if (o_theta1->count() > 0) config.theta1 = exp_theta1;
      if (o_theta2->count() > 0) config.theta2 = exp_theta2;
      config.density_csv_replicates = exp_overlays;

      const hsp::ResultTable table = hsp::run_experiment(config);
      const auto files = hsp::emit_outputs(table, global.out_dir);
      hsp::save_config(config, std::filesystem::path(global.out_dir) / "config.json");
      for (const auto& file : files) std::printf("wrote %s\n", file.string().c_str());
      for (const auto& [key, value] : table.stats) {
        std::printf("%s = %.6g\n", key.c_str(), value);
      }
    }
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 1;
  }
  return 0;
}
