#include "hsp/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "hsp/errors.hpp"

namespace hsp {

namespace {
constexpr double kPi = std::numbers::pi;

// FFTW plan creation/destruction is not thread safe; execution is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

double Periodogram::fourier_frequency(std::size_t j) const {
  return 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
}

double Periodogram::physical_frequency(std::size_t j) const {
  return fourier_frequency(j) / delta;
}

double Periodogram::nyquist() const { return kPi / delta; }

Periodogram periodogram(const PathSample& path) {
  path.validate();
  const std::size_t n = path.size();
  if (n < 16) throw ConfigError("periodogram: need at least 16 samples");

  const std::size_t bins = n / 2;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  std::copy(path.values.begin(), path.values.end(), in);

  fftw_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }

  Periodogram pg;
  pg.n = n;
  pg.delta = path.delta;
  pg.ordinates.resize(bins);
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (std::size_t j = 1; j <= bins; ++j) {
    const double re = out[j][0];
    const double im = out[j][1];
    pg.ordinates[j - 1] = (re * re + im * im) * norm;
  }
  fftw_free(in);
  fftw_free(out);
  return pg;
}

namespace {

/// Sub-bin offset of the parabola vertex through the log ordinates at
/// j-1, j, j+1, computed from ordinate ratios so positive rescaling of the
/// input leaves the result bit-identical.
double parabolic_offset(double left, double center, double right) {
  if (!(left > 0.0) || !(center > 0.0) || !(right > 0.0)) return 0.0;
  const double la = std::log(left / center);
  const double ra = std::log(right / center);
  const double denom = la + ra;
  if (!(denom < 0.0)) return 0.0;  // not a strict local maximum in log scale
  const double offset = (la - ra) / (2.0 * denom);
  return std::clamp(offset, -0.5, 0.5);
}

}  // namespace

FrequencyEstimates extract_peaks(const Periodogram& pg, std::size_t count,
                                 int exclusion_bins) {
  if (count == 0) throw std::invalid_argument("extract_peaks: count must be positive");
  if (exclusion_bins < 1) throw std::invalid_argument("extract_peaks: exclusion_bins >= 1");
  const std::size_t bins = pg.ordinates.size();
  if (count * (2 * static_cast<std::size_t>(exclusion_bins) + 1) > bins) {
    throw ConfigError("extract_peaks: capacity exceeded for the requested peak count");
  }

  std::vector<double> work = pg.ordinates;
  FrequencyEstimates est;
  est.nyquist = pg.nyquist();
  est.exclusion_bins = exclusion_bins;
  est.freqs.reserve(count);
  est.heights.reserve(count);

  for (std::size_t picked = 0; picked < count; ++picked) {
    std::size_t best = 0;
    double best_value = work[0];
    for (std::size_t j = 1; j < bins; ++j) {
      if (work[j] > best_value) {
        best_value = work[j];
        best = j;
      }
    }
    if (!(best_value > 0.0)) {
      throw EstimationError("extract_peaks: ran out of nonzero ordinates");
    }

    double offset = 0.0;
    if (best > 0 && best + 1 < bins) {
      // refine against the original ordinates; neighbours may already be zeroed
      offset = parabolic_offset(pg.ordinates[best - 1], pg.ordinates[best],
                                pg.ordinates[best + 1]);
    }
    const double bin_index = static_cast<double>(best + 1) + offset;  // theta_j index
    est.freqs.push_back(2.0 * kPi * bin_index / static_cast<double>(pg.n) / pg.delta);
    est.heights.push_back(pg.ordinates[best]);

    const std::size_t lo =
        best > static_cast<std::size_t>(exclusion_bins) ? best - exclusion_bins : 0;
    const std::size_t hi = std::min(bins - 1, best + static_cast<std::size_t>(exclusion_bins));
    for (std::size_t j = lo; j <= hi; ++j) work[j] = 0.0;
  }
  return est;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double prob) {
  const std::size_t n = sorted.size();
  const double pos = prob * static_cast<double>(n - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= n) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

}  // namespace

double silverman_bandwidth(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("silverman_bandwidth: need at least 2 points");
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : data) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    throw EstimationError("silverman_bandwidth: degenerate (constant) data");
  }
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double robust = std::min(sd, iqr / 1.34);
  if (!(robust > 0.0)) robust = sd;  // pathological ties
  return 0.9 * robust * std::pow(static_cast<double>(n), -0.2);
}

DensityEstimate kde(const FrequencyEstimates& freqs, std::span<const double> grid,
                    std::optional<double> bandwidth) {
  if (freqs.freqs.empty()) throw EstimationError("kde: empty frequency set");
  if (grid.size() < 2) throw std::invalid_argument("kde: need a grid of at least 2 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("kde: grid must be strictly increasing");
    }
    if (grid[i] < 0.0 || grid[i] > freqs.nyquist * (1.0 + 1e-12)) {
      throw std::invalid_argument("kde: grid must lie within [0, nyquist]");
    }
  }
  const double h = bandwidth ? *bandwidth
                             : silverman_bandwidth(std::span<const double>(freqs.freqs));
  if (!(h > 0.0)) throw std::invalid_argument("kde: bandwidth must be positive");

  const double n = static_cast<double>(freqs.freqs.size());
  const double norm = 1.0 / (2.0 * n * h * std::sqrt(2.0 * kPi));
  DensityEstimate out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.resize(grid.size());
  out.bandwidth = h;
  out.n_used = freqs.freqs.size();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double z : freqs.freqs) {
      const double u = (grid[g] - z) / h;
      acc += std::exp(-0.5 * u * u);
    }
    out.values[g] = norm * acc;
  }
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo)) throw std::invalid_argument("uniform_grid: bad arguments");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

}  // namespace hsp
