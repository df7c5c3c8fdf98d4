#pragma once

#include <functional>
#include <vector>

#include "hsp/pathgen.hpp"
#include "hsp/stable.hpp"

namespace hsp {

/// Smoothing configuration: weight w(x) = |x|^p e^{-|x|^q}, scaled as
/// w_theta(x) = w(x/theta)/theta, kernel v = inverse Fourier transform of w,
/// discretized on support_points + 1 points with mesh delta.
struct MollifierSpec {
  double p = 2.0;
  double q = 2.0;
  double theta = 20.0;
  int support_points = 100;  // L, even
  double delta = 0.01;
  double tail_epsilon = 1e-6;

  void validate() const;  // throws ConfigError
  /// "v1" for p == 2, "v2" for p == 4, "p<value>" otherwise (q = 2 family).
  std::string kernel_label() const;
};

/// Scaled weight w_theta(x) = w(x/theta)/theta. Even, non-negative,
/// vanishes at 0 and at +-infinity.
double weight_w(const MollifierSpec& spec, double x);

/// Unscaled weight w(x) = |x|^p e^{-|x|^q}.
double weight_w_base(double p, double q, double x);

/// Smoothing kernel v = F^{-1} w at base scale (theta enters through the
/// discretization argument, not here). Only q = 2 with even integer p has a
/// closed form; other combinations are unsupported configurations.
double kernel_v(const MollifierSpec& spec, double t);

/// Kummer's confluent hypergeometric 1F1(a; b; z), truncated series with
/// term-ratio stopping at 1e-14. Terminates exactly for non-positive integer a.
double confluent_hypergeometric_1f1(double a, double b, double z);

/// Discretized kernel values v_l = v(theta * delta * (l - L/2)), l = 0..L.
struct DiscreteKernel {
  std::vector<double> values;
  double delta = 0.0;
  double theta = 0.0;

  int support_points() const noexcept { return static_cast<int>(values.size()) - 1; }
};

/// Discretizes the kernel and enforces the window tail check
/// |v(theta t)| < tail_epsilon for t outside [-delta L/2, delta L/2].
/// On failure names the smallest adequate theta found by bisection.
DiscreteKernel discretize_kernel(const MollifierSpec& spec);

/// Valid-mode discrete convolution: out_k = delta * sum_l x_{k+l} v_l,
/// k = 0..n-L-1. Output mesh delta, output time origin shifted by delta*L/2.
PathSample mollify_path(const PathSample& path, const DiscreteKernel& kernel);

/// Control density of the mollified process: f_theta = w_theta^alpha |Psi|^alpha,
/// its total mass, and the normalized density.
struct ControlDensity {
  std::function<double(double)> unnormalized;
  double total_mass = 0.0;
  std::function<double(double)> normalized;
};

ControlDensity control_density(StabilityIndex alpha, const KernelPsi& psi,
                               const MollifierSpec& spec);

/// Closed-form total mass of the mollified HFSM control measure:
/// (2/q) theta^{-alpha(1+p)} Gamma(alpha(p-H)/q) / (alpha theta^{-q})^{alpha(p-H)/q}.
double hfsm_mollified_mass(StabilityIndex alpha, double hurst, const MollifierSpec& spec);

/// Normalized frequency density of the mollified HFSM,
/// rho_theta(z) = (q/2) r^b / Gamma(b) e^{-r |z|^q} |z|^{alpha(p-H)-1}
/// with b = alpha(p-H)/q and r = alpha theta^{-q}.
double rho_hfsm(StabilityIndex alpha, double hurst, double p, double q, double theta,
                double z);

/// Gamma shape/rate of |Z|^q under the mollified HFSM law.
struct HfsmFrequencyLaw {
  double shape = 0.0;  // alpha (p - H) / q
  double rate = 0.0;   // alpha theta^{-q}
};
HfsmFrequencyLaw hfsm_frequency_law(StabilityIndex alpha, double hurst,
                                    const MollifierSpec& spec);

/// FrequencyDensity with pdf = rho_hfsm and an exact sampler (signed q-th
/// root of a Gamma draw).
FrequencyDensity hfsm_frequency_density(StabilityIndex alpha, double hurst,
                                        const MollifierSpec& spec);

/// Normalized control mass above `cutoff` (both tails), 2 int_cutoff^inf rho.
/// Diagnostic for energy outside the representable band.
double tail_mass_above(const ControlDensity& density, double cutoff);

}  // namespace hsp
