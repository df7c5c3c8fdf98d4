#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hsp/random.hpp"
#include "hsp/stable.hpp"

namespace hsp {

/// Equidistant sampling times t_j = t0 + j * delta, j = 0..n-1.
struct TimeGrid {
  double t0 = 0.0;
  double delta = 0.01;
  std::size_t n = 2;
};

struct PathMeta {
  std::string descriptor;
  std::uint64_t seed = 0;
};

/// Equidistant real-valued samples of one process path.
struct PathSample {
  double t0 = 0.0;
  double delta = 0.0;
  std::vector<double> values;
  PathMeta meta;

  std::size_t size() const noexcept { return values.size(); }
  double time_at(std::size_t j) const noexcept { return t0 + delta * static_cast<double>(j); }

  /// Enforces n >= 2, delta > 0 and finite values; throws ConfigError.
  void validate() const;
};

enum class GridSpacing { linear, symmetric_log };

/// Symmetric frequency discretization on [-x_max, -x_min] U [x_min, x_max].
/// The central hole [-x_min, x_min] is excluded so that spectral kernels that
/// blow up at the origin stay evaluable; the excluded control mass is the
/// documented truncation bias of the simulators.
struct SpectralGrid {
  double x_max = 0.0;
  std::size_t m_cells = std::size_t{1} << 16;  // total cells over both sides, even
  GridSpacing spacing = GridSpacing::symmetric_log;
  double x_min = 1e-3;

  static SpectralGrid default_for_mesh(double delta);  // x_max = 4 pi / delta
};

/// Spectral kernel Psi of a stationary-increment harmonizable SaS motion.
struct KernelPsi {
  std::function<double(double)> evaluate;  // even; finite for x != 0
  bool alpha_weight_integrable = true;     // Psi in L^alpha(min(1,|x|^alpha)dx)
  bool singular_at_origin = false;
  std::optional<double> hurst;             // set for Psi(x) = |x|^(-H-1/alpha)

  static KernelPsi hfsm(double hurst, double alpha);
};

/// Draws of the truncated LePage series representation.
struct LePageEnsemble {
  std::vector<double> gammas;  // Poisson arrival times, strictly increasing
  std::vector<double> g1, g2;  // standard normal marks
  std::vector<double> z;       // frequencies, i.i.d. with the supplied density
  double total_mass = 0.0;
  double alpha = 0.0;
  // rms proxy for the dropped tail, relative to the marginal SaS scale
  double truncation_rms = 0.0;
  bool truncation_warning = false;
};

/// Amplitudes R_k = C_alpha m^(1/alpha) Gamma_k^(-1/alpha) sqrt(g1_k^2 + g2_k^2).
std::vector<double> lepage_amplitudes(const LePageEnsemble& ensemble);

/// A normalized even frequency density that can be both evaluated and sampled.
struct FrequencyDensity {
  std::function<double(double)> pdf;
  std::function<double(RandomStream&)> sample;
};

/// X(t) = Re \int (e^{itx} - 1) Psi(x) M_alpha(dx), discretized over `grid`
/// with one isotropic complex SaS draw per cell. X(0) = 0 exactly whenever 0
/// is among the sampling times.
PathSample simulate_stat_incr(const KernelPsi& psi, StabilityIndex alpha,
                              const SpectralGrid& grid, const TimeGrid& times,
                              RandomStream& rng);

/// Real harmonizable fractional stable motion, Psi(x) = |x|^(-H-1/alpha).
/// Near-origin cells use the closed form of the cell control mass instead of
/// a midpoint value of the singular integrand.
PathSample simulate_hfsm(StabilityIndex alpha, double hurst, const SpectralGrid& grid,
                         const TimeGrid& times, RandomStream& rng);

struct LePageSimulation {
  PathSample path;
  LePageEnsemble ensemble;
};

/// Truncated LePage series of a stationary real harmonizable SaS process with
/// frequency density rho and total control mass m(R). Returns the path and
/// the generating ensemble so estimated and true frequencies can be compared.
LePageSimulation simulate_lepage(StabilityIndex alpha, const FrequencyDensity& rho,
                                 double total_mass, std::size_t truncation,
                                 const TimeGrid& times, RandomStream& rng);

/// i.i.d. frequencies of the mollified HFSM: |Z|^q ~ Gamma(alpha(p-H)/q, rate
/// alpha theta^-q), sign symmetric.
std::vector<double> sample_frequencies_hfsm(StabilityIndex alpha, double hurst, double p,
                                            double q, double theta, std::size_t n_draws,
                                            RandomStream& rng);

}  // namespace hsp
