#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsp/mollify.hpp"
#include "hsp/spectral.hpp"

namespace hsp {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Abscissa window [lower, b_u] for the log-ratio regression. b_u is the
/// largest grid point u >= lower such that on [lower, u] both density
/// estimates are positive, the ratio rho1/rho2 stays above `eps` (checked
/// symmetrically, min(r, 1/r) > eps) and no consecutive-point jump of the
/// ratio exceeds `jump_factor`.
Interval select_ratio_interval(const DensityEstimate& rho1, const DensityEstimate& rho2,
                               double lower = 1.0, double eps = 0.05,
                               double jump_factor = 3.0);

/// Log-ratio regression system: y_l = b + alpha x_l with
/// x_l = log w_theta1(z_l) - log w_theta2(z_l),
/// y_l = log rho1(z_l) - log rho2(z_l), z_l uniform on the interval.
struct RegressionSystem {
  std::vector<double> z;
  std::vector<double> x;
  std::vector<double> y;
};

RegressionSystem build_regression(const DensityEstimate& rho1, const DensityEstimate& rho2,
                                  const MollifierSpec& spec1, const MollifierSpec& spec2,
                                  Interval interval, std::size_t l_points);

struct LeastSquaresFit {
  double intercept = 0.0;
  double slope = 0.0;
  std::vector<double> residuals;
};

/// Ordinary least squares for the two-parameter regression model.
LeastSquaresFit least_squares(const RegressionSystem& sys);

struct EigenPair {
  double min = 0.0;
  double max = 0.0;
};

/// Closed-form eigenvalues of the 2x2 normal matrix X^T X:
/// lambda_{1,2} = (L + S2 +- sqrt((L + S2)^2 - 4 (L S2 - S1^2))) / 2.
EigenPair design_matrix_eigenvalues(const RegressionSystem& sys);

struct GammaFit {
  double shape = 0.0;
  double rate = 0.0;
  std::size_t n_used = 0;
};

/// Closed-form strongly consistent Gamma estimators:
/// shape = N S / (N T - L S), rate = N^2 / (N T - L S)
/// with S = sum x, T = sum x log x, L = sum log x.
GammaFit gamma_closed_form(std::span<const double> x);

/// Asymptotic covariance of (shape, rate) and its Frobenius norm.
struct GammaCovariance {
  double var_shape = 0.0;
  double var_rate = 0.0;
  double cov = 0.0;
  double frobenius = 0.0;
};

GammaCovariance asymptotic_covariance(const GammaFit& fit);

struct RegressionPolicy {
  double interval_lower = 1.0;
  double ratio_threshold = 0.05;
  double jump_factor = 3.0;
  int exclusion_bins = 4;
  std::size_t l_points = 100;
  std::size_t grid_points = 2048;
  double grid_max = 0.0;  // 0 = auto, 5 * max(theta1, theta2)
  std::optional<double> bandwidth;
};

/// Point estimates plus diagnostics and provenance. `outlier` is set exactly
/// when alpha_hat lies outside (0, 2) or a reported Hurst estimate lies
/// outside (0, 1); flagged estimates are reported, never clipped.
struct EstimationReport {
  double alpha_hat = 0.0;
  std::optional<double> hurst_hat;
  std::optional<double> intercept;
  std::optional<Interval> interval;
  std::optional<double> eigen_min;
  std::optional<double> eigen_max;
  std::optional<GammaFit> gamma;
  bool outlier = false;
  std::uint64_t seed = 0;
  std::string config_digest;
};

/// Full regression pipeline on one path: mollify with both specs, extract
/// `peak_count` frequencies from each periodogram, density-estimate both,
/// select the ratio interval, regress the log ratio.
EstimationReport estimate_alpha_regression(const PathSample& path, const MollifierSpec& spec1,
                                           const MollifierSpec& spec2, std::size_t peak_count,
                                           const RegressionPolicy& policy = {});

/// Closed-form HFSM estimators from frequency estimates:
/// alpha = theta^q * rate(Z^q), H = p - q * shape(Z^q) / alpha.
EstimationReport estimate_hfsm(const FrequencyEstimates& freqs, const MollifierSpec& spec);

/// Estimate of Psi^alpha up to a constant factor: rho_hat(z) w_theta(z)^{-alpha_hat}.
/// Grid points where w_theta underflows are masked out.
struct PsiReconstruction {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
  std::size_t masked = 0;
};

PsiReconstruction reconstruct_psi(const DensityEstimate& rho_hat, const MollifierSpec& spec,
                                  double alpha_hat, double weight_floor = 1e-12);

}  // namespace hsp
