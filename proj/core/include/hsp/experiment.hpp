#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsp/inference.hpp"

namespace hsp {

enum class ExperimentKind { table1, table2, table3, custom };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// One Monte Carlo cell: fixed process parameters, R replicates.
///   table1: L2 distance between the density estimate and the true density.
///   table2: regression estimate of alpha from two mollifier scales.
///   table3: closed-form Gamma estimates of (alpha, H) from one scale.
///   custom: all three metrics.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::custom;

  double alpha = 1.5;
  double hurst = 0.75;
  double delta = 0.01;
  std::size_t n = 10000;
  double t0 = 0.0;

  // grid defaults resolve to SpectralGrid::default_for_mesh(delta)
  double grid_x_min = 1e-3;
  double grid_x_max = 0.0;  // 0 = auto (4 pi / delta)
  std::size_t grid_cells = std::size_t{1} << 16;
  GridSpacing grid_spacing = GridSpacing::symmetric_log;

  double p = 2.0;
  double q = 2.0;
  int support_points = 100;
  double theta1 = 20.0;
  double theta2 = 30.0;

  std::size_t peak_count = 200;
  std::size_t replicates = 100;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;

  RegressionPolicy policy;
  double metric_lo = 0.0;
  double metric_hi = 100.0;

  // emit z,rho_true,rho_hat,theta,replicate rows for the first k replicates
  std::size_t density_csv_replicates = 0;

  SpectralGrid spectral_grid() const;
  MollifierSpec mollifier(double theta) const;
};

/// Deterministic digest of every estimation-relevant config field.
std::string config_digest(const ExperimentConfig& config);

ExperimentConfig load_config(const std::filesystem::path& file);
void save_config(const ExperimentConfig& config, const std::filesystem::path& file);

struct DensityOverlayRow {
  double z = 0.0, rho_true = 0.0, rho_hat = 0.0, theta = 0.0;
  std::size_t replicate = 0;
};

struct ReplicateResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  std::optional<double> l2;
  std::optional<EstimationReport> regression;
  std::optional<EstimationReport> gamma;
  std::vector<DensityOverlayRow> overlays;
};

/// Aggregated cell statistics. Keys depend on the metric set; every mean
/// carries a Monte Carlo standard error ("*_se"). Counts satisfy
/// effective + outliers + failures = replicates for the regression metric.
struct ResultTable {
  ExperimentConfig config;
  std::string digest;
  std::vector<ReplicateResult> replicates;
  std::map<std::string, double> stats;
  std::vector<DensityOverlayRow> overlays;
};

ResultTable run_experiment(const ExperimentConfig& config);

/// Squared L2 distance between a density estimate and an exact density over
/// [lo, hi] by trapezoid quadrature on the estimate grid.
double l2_distance(const DensityEstimate& est, const std::function<double(double)>& truth,
                   double lo, double hi);

struct EmitOptions {
  bool table_csv = true;
  bool replicate_csv = true;
  bool metadata_json = true;
  bool overlay_csv = true;  // only written when overlays are present
};

/// Writes table.csv, replicates.csv, metadata.json (and density_overlays.csv)
/// under out_dir. Outputs are byte-identical across reruns except for the
/// timestamp field of the metadata, which is excluded from the digest.
std::vector<std::filesystem::path> emit_outputs(const ResultTable& table,
                                                const std::filesystem::path& out_dir,
                                                const EmitOptions& options = {});

}  // namespace hsp
