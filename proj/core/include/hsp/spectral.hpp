#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hsp/pathgen.hpp"

namespace hsp {

/// Periodogram ordinates I_n(theta_j) = n^-2 |sum_k x(k) e^{-ik theta_j}|^2 at
/// the Fourier frequencies theta_j = 2 pi j / n, j = 1..floor(n/2). The
/// physical angular frequency of bin j is theta_j / delta.
struct Periodogram {
  std::vector<double> ordinates;  // ordinates[j-1] = I_n(theta_j)
  std::size_t n = 0;
  double delta = 0.0;

  double fourier_frequency(std::size_t j) const;   // theta_j
  double physical_frequency(std::size_t j) const;  // theta_j / delta
  double nyquist() const;                           // pi / delta
};

Periodogram periodogram(const PathSample& path);

/// Frequencies of the N largest periodogram peaks in selection order
/// (descending peak height), in physical units (radians per unit time).
struct FrequencyEstimates {
  std::vector<double> freqs;
  std::vector<double> heights;  // ordinate at the selected bin
  double nyquist = 0.0;
  int exclusion_bins = 0;
};

/// Greedy peak extraction: take the global maximum bin, refine it by 3-point
/// parabolic interpolation in log ordinates (scale invariant), zero out
/// +-exclusion_bins bins, repeat `count` times.
FrequencyEstimates extract_peaks(const Periodogram& pg, std::size_t count,
                                 int exclusion_bins = 4);

/// Silverman's rule: 0.9 min(sd, IQR/1.34) N^{-1/5}.
double silverman_bandwidth(std::span<const double> data);

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0.0;
  std::size_t n_used = 0;
};

/// Gaussian-kernel estimate of the even spectral density on the positive
/// half line: rho_hat(x) = (2 N h)^-1 sum_k kappa((x - Z_k)/h). The factor
/// 1/2 encodes the evenness, so the half-line mass is about 1/2. Bandwidth
/// defaults to Silverman's rule on the frequencies.
DensityEstimate kde(const FrequencyEstimates& freqs, std::span<const double> grid,
                    std::optional<double> bandwidth = std::nullopt);

std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

}  // namespace hsp
