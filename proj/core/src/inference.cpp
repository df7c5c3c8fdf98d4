#include "hsp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hsp/errors.hpp"

namespace hsp {

namespace {

void require_common_grid(const DensityEstimate& rho1, const DensityEstimate& rho2) {
  if (rho1.grid.size() != rho2.grid.size()) {
    throw std::invalid_argument("density estimates must share a common grid");
  }
  for (std::size_t i = 0; i < rho1.grid.size(); ++i) {
    if (std::abs(rho1.grid[i] - rho2.grid[i]) > 1e-9 * std::max(1.0, std::abs(rho1.grid[i]))) {
      throw std::invalid_argument("density estimates must share a common grid");
    }
  }
}

double interpolate(const DensityEstimate& density, double z) {
  const auto& grid = density.grid;
  auto it = std::lower_bound(grid.begin(), grid.end(), z);
  if (it == grid.begin()) return density.values.front();
  if (it == grid.end()) return density.values.back();
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double frac = (z - grid[lo]) / (grid[hi] - grid[lo]);
  return density.values[lo] + frac * (density.values[hi] - density.values[lo]);
}

}  // namespace

Interval select_ratio_interval(const DensityEstimate& rho1, const DensityEstimate& rho2,
                               double lower, double eps, double jump_factor) {
  require_common_grid(rho1, rho2);
  if (lower < 0.0) throw std::invalid_argument("select_ratio_interval: lower must be >= 0");
  if (!(eps > 0.0) || !(jump_factor > 1.0)) {
    throw std::invalid_argument("select_ratio_interval: bad threshold parameters");
  }

  const auto& grid = rho1.grid;
  std::size_t start = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] >= lower) {
      start = i;
      break;
    }
  }
  if (start >= grid.size()) {
    throw EstimationError("select_ratio_interval: no grid points above the lower bound");
  }

  std::size_t last_good = start;
  bool any = false;
  double previous_ratio = 0.0;
  for (std::size_t i = start; i < grid.size(); ++i) {
    const double v1 = rho1.values[i];
    const double v2 = rho2.values[i];
    if (!(v1 > 0.0) || !(v2 > 0.0)) break;
    const double ratio = v1 / v2;
    if (std::min(ratio, 1.0 / ratio) <= eps) break;
    if (any) {
      const double rel = ratio / previous_ratio;
      if (std::max(rel, 1.0 / rel) > jump_factor) break;
    }
    previous_ratio = ratio;
    last_good = i;
    any = true;
  }
  if (!any || last_good == start) {
    throw EstimationError(
        "select_ratio_interval: densities below threshold, interval is empty");
  }
  return {grid[start], grid[last_good]};
}

RegressionSystem build_regression(const DensityEstimate& rho1, const DensityEstimate& rho2,
                                  const MollifierSpec& spec1, const MollifierSpec& spec2,
                                  Interval interval, std::size_t l_points) {
  require_common_grid(rho1, rho2);
  if (spec1.p != spec2.p || spec1.q != spec2.q) {
    throw std::invalid_argument("build_regression: specs must share (p, q)");
  }
  if (spec1.theta == spec2.theta) {
    throw EstimationError("build_regression: theta1 == theta2 gives a rank-deficient design");
  }
  if (!(interval.hi > interval.lo) || !(interval.lo > 0.0)) {
    throw std::invalid_argument("build_regression: need 0 < lo < hi");
  }
  if (l_points < 2) throw std::invalid_argument("build_regression: need at least 2 points");

  RegressionSystem sys;
  sys.z.resize(l_points);
  sys.x.resize(l_points);
  sys.y.resize(l_points);
  for (std::size_t l = 0; l < l_points; ++l) {
    const double z = interval.lo + (interval.hi - interval.lo) * static_cast<double>(l) /
                                       static_cast<double>(l_points - 1);
    const double r1 = interpolate(rho1, z);
    const double r2 = interpolate(rho2, z);
    if (!(r1 > 0.0) || !(r2 > 0.0)) {
      throw EstimationError("build_regression: nonpositive density inside the interval");
    }
    sys.z[l] = z;
    sys.x[l] = std::log(weight_w(spec1, z)) - std::log(weight_w(spec2, z));
    sys.y[l] = std::log(r1) - std::log(r2);
  }
  return sys;
}

LeastSquaresFit least_squares(const RegressionSystem& sys) {
  const std::size_t n = sys.x.size();
  if (n < 2 || sys.y.size() != n) {
    throw std::invalid_argument("least_squares: need at least two equations");
  }
  const double mean_x = std::accumulate(sys.x.begin(), sys.x.end(), 0.0) / static_cast<double>(n);
  const double mean_y = std::accumulate(sys.y.begin(), sys.y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = sys.x[i] - mean_x;
    sxx += dx * dx;
    sxy += dx * (sys.y[i] - mean_y);
  }
  if (!(sxx > 0.0)) throw EstimationError("least_squares: singular normal matrix");

  LeastSquaresFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = sys.y[i] - fit.intercept - fit.slope * sys.x[i];
  }
  return fit;
}

EigenPair design_matrix_eigenvalues(const RegressionSystem& sys) {
  const double l = static_cast<double>(sys.x.size());
  double s1 = 0.0, s2 = 0.0;
  for (double v : sys.x) {
    s1 += v;
    s2 += v * v;
  }
  const double tr = l + s2;
  const double det4 = 4.0 * (l * s2 - s1 * s1);
  const double disc = std::sqrt(std::max(0.0, tr * tr - det4));
  return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

GammaFit gamma_closed_form(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("gamma_closed_form: need at least 2 observations");
  double sum = 0.0, sum_xlog = 0.0, sum_log = 0.0;
  for (double v : x) {
    if (!(v > 0.0)) throw std::invalid_argument("gamma_closed_form: nonpositive entry");
    const double lg = std::log(v);
    sum += v;
    sum_xlog += v * lg;
    sum_log += lg;
  }
  const double nd = static_cast<double>(n);
  const double denom = nd * sum_xlog - sum_log * sum;
  const double scale = nd * std::abs(sum_xlog) + std::abs(sum_log * sum) + 1e-300;
  if (!(denom > 1e-13 * scale)) {
    throw EstimationError("gamma_closed_form: zero denominator (all observations equal?)");
  }
  GammaFit fit;
  fit.shape = nd * sum / denom;
  fit.rate = nd * nd / denom;
  fit.n_used = n;
  return fit;
}

GammaCovariance asymptotic_covariance(const GammaFit& fit) {
  if (!(fit.shape > 0.0) || !(fit.rate > 0.0)) {
    throw std::invalid_argument("asymptotic_covariance: shape and rate must be positive");
  }
  const double b = fit.shape;
  const double r = fit.rate;
  GammaCovariance cov;
  cov.var_shape = b * b * (1.0 + b * trigamma(1.0 + b));
  cov.var_rate = r * r * (1.0 + b * trigamma(b));
  cov.cov = -b * r * (1.0 + b * trigamma(1.0 + b));
  cov.frobenius = std::sqrt(cov.var_shape * cov.var_shape + cov.var_rate * cov.var_rate +
                            2.0 * cov.cov * cov.cov);
  return cov;
}

EstimationReport estimate_alpha_regression(const PathSample& path, const MollifierSpec& spec1,
                                           const MollifierSpec& spec2, std::size_t peak_count,
                                           const RegressionPolicy& policy) {
  const DiscreteKernel kernel1 = discretize_kernel(spec1);
  const DiscreteKernel kernel2 = discretize_kernel(spec2);
  const PathSample smooth1 = mollify_path(path, kernel1);
  const PathSample smooth2 = mollify_path(path, kernel2);

  const FrequencyEstimates freqs1 =
      extract_peaks(periodogram(smooth1), peak_count, policy.exclusion_bins);
  const FrequencyEstimates freqs2 =
      extract_peaks(periodogram(smooth2), peak_count, policy.exclusion_bins);

  const double grid_max =
      policy.grid_max > 0.0 ? policy.grid_max : 5.0 * std::max(spec1.theta, spec2.theta);
  const std::vector<double> grid = uniform_grid(0.0, grid_max, policy.grid_points);
  const DensityEstimate rho1 = kde(freqs1, grid, policy.bandwidth);
  const DensityEstimate rho2 = kde(freqs2, grid, policy.bandwidth);

  const Interval interval = select_ratio_interval(rho1, rho2, policy.interval_lower,
                                                  policy.ratio_threshold, policy.jump_factor);
  const RegressionSystem sys =
      build_regression(rho1, rho2, spec1, spec2, interval, policy.l_points);
  const LeastSquaresFit fit = least_squares(sys);
  const EigenPair eigen = design_matrix_eigenvalues(sys);

  EstimationReport report;
  report.alpha_hat = fit.slope;
  report.intercept = fit.intercept;
  report.interval = interval;
  report.eigen_min = eigen.min;
  report.eigen_max = eigen.max;
  report.outlier = !(report.alpha_hat > 0.0 && report.alpha_hat < 2.0);
  report.seed = path.meta.seed;
  return report;
}

EstimationReport estimate_hfsm(const FrequencyEstimates& freqs, const MollifierSpec& spec) {
  if (freqs.freqs.size() < 2) {
    throw EstimationError("estimate_hfsm: degenerate frequency set");
  }
  std::vector<double> powered(freqs.freqs.size());
  for (std::size_t i = 0; i < powered.size(); ++i) {
    powered[i] = std::pow(std::abs(freqs.freqs[i]), spec.q);
  }
  const GammaFit fit = gamma_closed_form(powered);

  EstimationReport report;
  report.gamma = fit;
  report.alpha_hat = std::pow(spec.theta, spec.q) * fit.rate;
  report.hurst_hat = spec.p - spec.q * fit.shape / report.alpha_hat;
  const bool alpha_ok = report.alpha_hat > 0.0 && report.alpha_hat < 2.0;
  const bool hurst_ok = *report.hurst_hat > 0.0 && *report.hurst_hat < 1.0;
  report.outlier = !(alpha_ok && hurst_ok);
  return report;
}

PsiReconstruction reconstruct_psi(const DensityEstimate& rho_hat, const MollifierSpec& spec,
                                  double alpha_hat, double weight_floor) {
  PsiReconstruction rec;
  rec.grid = rho_hat.grid;
  rec.values.assign(rho_hat.grid.size(), 0.0);
  rec.valid.assign(rho_hat.grid.size(), 0);
  for (std::size_t i = 0; i < rho_hat.grid.size(); ++i) {
    const double w = weight_w(spec, rho_hat.grid[i]);
    if (w < weight_floor) {
      ++rec.masked;
      continue;
    }
    rec.values[i] = rho_hat.values[i] * std::pow(w, -alpha_hat);
    rec.valid[i] = 1;
  }
  return rec;
}

}  // namespace hsp
