#include "hsp/pathgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hsp/errors.hpp"
#include "hsp/quadrature.hpp"

namespace hsp {

namespace {
constexpr double kPi = std::numbers::pi;
}

void PathSample::validate() const {
  if (values.size() < 2) throw ConfigError("PathSample: need at least 2 samples");
  if (!(delta > 0.0)) throw ConfigError("PathSample: mesh must be positive");
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("PathSample: non-finite sample value");
  }
}

SpectralGrid SpectralGrid::default_for_mesh(double delta) {
  SpectralGrid grid;
  grid.x_max = 4.0 * kPi / delta;
  return grid;
}

KernelPsi KernelPsi::hfsm(double hurst, double alpha) {
  if (!(hurst > 0.0) || !(hurst < 1.0)) {
    throw std::invalid_argument("KernelPsi::hfsm: H must lie in (0, 1)");
  }
  const double exponent = -hurst - 1.0 / alpha;
  KernelPsi psi;
  psi.evaluate = [exponent](double x) { return std::pow(std::abs(x), exponent); };
  psi.alpha_weight_integrable = true;
  psi.singular_at_origin = true;
  psi.hurst = hurst;
  return psi;
}

namespace {

struct Cell {
  double center = 0.0;
  double control_mass = 0.0;  // control measure of the cell
  double multiplier = 1.0;    // deterministic factor in front of the increment
};

void check_grid(const SpectralGrid& grid, const TimeGrid& times) {
  if (times.n < 2) throw ConfigError("simulate: need at least 2 sampling times");
  if (!(times.delta > 0.0)) throw ConfigError("simulate: mesh must be positive");
  if (grid.m_cells < 2 || grid.m_cells % 2 != 0) {
    throw ConfigError("simulate: m_cells must be even and >= 2");
  }
  if (!(grid.x_max > grid.x_min) || !(grid.x_max > 0.0)) {
    throw ConfigError("simulate: need x_max > x_min >= 0");
  }
  if (grid.x_max < kPi / times.delta) {
    throw ConfigError("simulate: grid cutoff x_max is below the sampling band pi/delta");
  }
  if (grid.spacing == GridSpacing::symmetric_log && !(grid.x_min > 0.0)) {
    throw ConfigError("simulate: symmetric-log spacing needs x_min > 0");
  }
}

/// Positive-side cell edges; the negative side is the mirror image.
std::vector<double> cell_edges(const SpectralGrid& grid) {
  const std::size_t half = grid.m_cells / 2;
  std::vector<double> edges(half + 1);
  if (grid.spacing == GridSpacing::linear) {
    const double width = (grid.x_max - grid.x_min) / static_cast<double>(half);
    for (std::size_t i = 0; i <= half; ++i) {
      edges[i] = grid.x_min + width * static_cast<double>(i);
    }
  } else {
    const double ratio = grid.x_max / grid.x_min;
    for (std::size_t i = 0; i <= half; ++i) {
      edges[i] = grid.x_min * std::pow(ratio, static_cast<double>(i) / static_cast<double>(half));
    }
  }
  edges.back() = grid.x_max;
  return edges;
}

/// Shared evaluation core. Each term contributes
///   multiplier * Re(M e^{i t x}) - (subtract_static ? multiplier * Re(M) : 0)
/// accumulated over equidistant times by per-term phase recurrences, eight
/// independent lanes at a time.
PathSample accumulate_terms(const std::vector<double>& centers,
                            const std::vector<std::complex<double>>& weights,
                            const TimeGrid& times, bool subtract_static) {
  const std::size_t n = times.n;
  const std::size_t m = centers.size();
  PathSample out;
  out.t0 = times.t0;
  out.delta = times.delta;
  out.values.assign(n, 0.0);
  double* x = out.values.data();

  constexpr std::size_t kLanes = 8;
  double cr[kLanes], ci[kLanes], rr[kLanes], ri[kLanes], base[kLanes];

  for (std::size_t c0 = 0; c0 < m; c0 += kLanes) {
    const std::size_t lanes = std::min(kLanes, m - c0);
    for (std::size_t b = 0; b < lanes; ++b) {
      const std::size_t c = c0 + b;
      const double wr = weights[c].real();
      const double wi = weights[c].imag();
      const double start = times.t0 * centers[c];
      const double sc = std::cos(start), ss = std::sin(start);
      cr[b] = wr * sc - wi * ss;
      ci[b] = wr * ss + wi * sc;
      rr[b] = std::cos(times.delta * centers[c]);
      ri[b] = std::sin(times.delta * centers[c]);
      base[b] = subtract_static ? wr : 0.0;
    }
    for (std::size_t b = lanes; b < kLanes; ++b) {
      cr[b] = ci[b] = ri[b] = base[b] = 0.0;
      rr[b] = 1.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t b = 0; b < kLanes; ++b) {
        acc += cr[b] - base[b];
        const double nr = cr[b] * rr[b] - ci[b] * ri[b];
        ci[b] = cr[b] * ri[b] + ci[b] * rr[b];
        cr[b] = nr;
      }
      x[j] += acc;
    }
  }
  return out;
}

PathSample simulate_cells(const std::vector<Cell>& cells, StabilityIndex alpha,
                          const TimeGrid& times, RandomStream& rng) {
  std::vector<double> centers(cells.size());
  std::vector<std::complex<double>> weights(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    centers[i] = cells[i].center;
    weights[i] =
        cells[i].multiplier * sample_isotropic_complex_sas(alpha, cells[i].control_mass, rng);
  }
  return accumulate_terms(centers, weights, times, /*subtract_static=*/true);
}

}  // namespace

PathSample simulate_stat_incr(const KernelPsi& psi, StabilityIndex alpha,
                              const SpectralGrid& grid, const TimeGrid& times,
                              RandomStream& rng) {
  check_grid(grid, times);
  if (!psi.alpha_weight_integrable) {
    throw ConfigError("simulate_stat_incr: Psi is not in the weighted L^alpha space");
  }
  if (psi.singular_at_origin && grid.x_min <= 0.0) {
    throw ConfigError(
        "simulate_stat_incr: singular kernel with a grid touching 0; exclude a central "
        "hole (x_min > 0) or use the closed-form cell masses of simulate_hfsm");
  }
  const auto edges = cell_edges(grid);
  std::vector<Cell> cells;
  cells.reserve(grid.m_cells);
  // negative side first (ascending), then positive side
  for (std::size_t i = edges.size() - 1; i-- > 0;) {
    const double center = -0.5 * (edges[i] + edges[i + 1]);
    cells.push_back({center, edges[i + 1] - edges[i], psi.evaluate(center)});
  }
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double center = 0.5 * (edges[i] + edges[i + 1]);
    cells.push_back({center, edges[i + 1] - edges[i], psi.evaluate(center)});
  }
  for (const Cell& cell : cells) {
    if (!std::isfinite(cell.multiplier)) {
      throw ConfigError("simulate_stat_incr: Psi not finite at a cell center");
    }
  }
  PathSample out = simulate_cells(cells, alpha, times, rng);
  std::ostringstream desc;
  desc << "stat-incr(alpha=" << alpha.value() << ")";
  out.meta.descriptor = desc.str();
  return out;
}

PathSample simulate_hfsm(StabilityIndex alpha, double hurst, const SpectralGrid& grid,
                         const TimeGrid& times, RandomStream& rng) {
  if (!(hurst > 0.0) || !(hurst < 1.0)) {
    throw std::invalid_argument("simulate_hfsm: H must lie in (0, 1)");
  }
  check_grid(grid, times);
  if (!(grid.x_min > 0.0)) {
    throw ConfigError("simulate_hfsm: the singular kernel needs a central hole, x_min > 0");
  }
  const double a = alpha.value();
  const double ah = a * hurst;
  // control mass of |Psi|^alpha over a positive cell [lo, hi]:
  // int |x|^{-aH-1} dx = (lo^{-aH} - hi^{-aH}) / (aH)
  auto cell_mass = [ah](double lo, double hi) {
    return (std::pow(lo, -ah) - std::pow(hi, -ah)) / ah;
  };
  const auto edges = cell_edges(grid);
  std::vector<Cell> cells;
  cells.reserve(grid.m_cells);
  for (std::size_t i = edges.size() - 1; i-- > 0;) {
    cells.push_back({-0.5 * (edges[i] + edges[i + 1]), cell_mass(edges[i], edges[i + 1]), 1.0});
  }
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    cells.push_back({0.5 * (edges[i] + edges[i + 1]), cell_mass(edges[i], edges[i + 1]), 1.0});
  }
  PathSample out = simulate_cells(cells, alpha, times, rng);
  std::ostringstream desc;
  desc << "hfsm(alpha=" << a << ",H=" << hurst << ")";
  out.meta.descriptor = desc.str();
  return out;
}

std::vector<double> lepage_amplitudes(const LePageEnsemble& ensemble) {
  const double a = ensemble.alpha;
  const double front =
      lepage_constant(StabilityIndex(a)) * std::pow(ensemble.total_mass, 1.0 / a);
  std::vector<double> amps(ensemble.gammas.size());
  for (std::size_t k = 0; k < amps.size(); ++k) {
    amps[k] = front * std::pow(ensemble.gammas[k], -1.0 / a) *
              std::hypot(ensemble.g1[k], ensemble.g2[k]);
  }
  return amps;
}

LePageSimulation simulate_lepage(StabilityIndex alpha, const FrequencyDensity& rho,
                                 double total_mass, std::size_t truncation,
                                 const TimeGrid& times, RandomStream& rng) {
  if (!(total_mass > 0.0)) {
    throw std::invalid_argument("simulate_lepage: total_mass must be positive");
  }
  if (truncation < 1) throw std::invalid_argument("simulate_lepage: need K >= 1");
  if (times.n < 2 || !(times.delta > 0.0)) {
    throw ConfigError("simulate_lepage: invalid time grid");
  }
  const double pdf_mass =
      2.0 * integrate_half_line([&rho](double z) { return rho.pdf(z); }, 1.0, 1e-9);
  if (std::abs(pdf_mass - 1.0) > 1e-6) {
    throw std::invalid_argument("simulate_lepage: frequency density does not integrate to 1");
  }

  const double a = alpha.value();
  LePageEnsemble ens;
  ens.alpha = a;
  ens.total_mass = total_mass;
  ens.gammas.resize(truncation);
  ens.g1.resize(truncation);
  ens.g2.resize(truncation);
  ens.z.resize(truncation);
  double arrival = 0.0;
  for (std::size_t k = 0; k < truncation; ++k) {
    arrival += exponential1(rng);
    ens.gammas[k] = arrival;
    const auto [g1, g2] = normal_pair(rng);
    ens.g1[k] = g1;
    ens.g2[k] = g2;
    ens.z[k] = rho.sample(rng);
  }

  const double front = lepage_constant(alpha) * std::pow(total_mass, 1.0 / a);
  std::vector<std::complex<double>> weights(truncation);
  for (std::size_t k = 0; k < truncation; ++k) {
    const double amp = front * std::pow(ens.gammas[k], -1.0 / a);
    // Re((g1 - i g2) e^{itz}) = g1 cos(tz) + g2 sin(tz)
    weights[k] = std::complex<double>(amp * ens.g1[k], -amp * ens.g2[k]);
  }
  LePageSimulation sim;
  sim.path = accumulate_terms(ens.z, weights, times, /*subtract_static=*/false);

  // conditional-rms proxy of the dropped tail, relative to the marginal scale
  const double k_tail = static_cast<double>(truncation);
  const double tail_sum = std::pow(k_tail, 1.0 - 2.0 / a) / (2.0 / a - 1.0);
  const double sas_scale = std::pow(lambda_alpha(a) * total_mass, 1.0 / a);
  ens.truncation_rms = front * std::sqrt(tail_sum) / sas_scale;
  ens.truncation_warning = ens.truncation_rms > 0.5;

  std::ostringstream desc;
  desc << "lepage(alpha=" << a << ",K=" << truncation << ")";
  sim.path.meta.descriptor = desc.str();
  sim.ensemble = std::move(ens);
  return sim;
}

std::vector<double> sample_frequencies_hfsm(StabilityIndex alpha, double hurst, double p,
                                            double q, double theta, std::size_t n_draws,
                                            RandomStream& rng) {
  const double a = alpha.value();
  const double shape = a * (p - hurst) / q;
  if (!(shape > 0.0)) {
    throw std::invalid_argument("sample_frequencies_hfsm: alpha (p - H) / q must be positive");
  }
  const double rate = a * std::pow(theta, -q);
  std::vector<double> draws(n_draws);
  for (std::size_t i = 0; i < n_draws; ++i) {
    const double g = gamma_rate(rng, shape, rate);
    const double magnitude = std::pow(g, 1.0 / q);
    draws[i] = uniform01(rng) < 0.5 ? -magnitude : magnitude;
  }
  return draws;
}

}  // namespace hsp
