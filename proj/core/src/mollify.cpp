#include "hsp/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hsp/errors.hpp"
#include "hsp/quadrature.hpp"

namespace hsp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;
}  // namespace

void MollifierSpec::validate() const {
  if (!(p >= 1.0) || !(q >= 1.0)) throw ConfigError("MollifierSpec: need p >= 1 and q >= 1");
  if (!(theta > 0.0)) throw ConfigError("MollifierSpec: theta must be positive");
  if (support_points <= 0 || support_points % 2 != 0) {
    throw ConfigError("MollifierSpec: support_points (L) must be a positive even number");
  }
  if (!(delta > 0.0)) throw ConfigError("MollifierSpec: delta must be positive");
  if (!(tail_epsilon > 0.0)) throw ConfigError("MollifierSpec: tail_epsilon must be positive");
}

std::string MollifierSpec::kernel_label() const {
  if (q == 2.0 && p == 2.0) return "v1";
  if (q == 2.0 && p == 4.0) return "v2";
  std::ostringstream os;
  os << "p" << p << "q" << q;
  return os.str();
}

double weight_w_base(double p, double q, double x) {
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  return std::pow(ax, p) * std::exp(-std::pow(ax, q));
}

double weight_w(const MollifierSpec& spec, double x) {
  return weight_w_base(spec.p, spec.q, x / spec.theta) / spec.theta;
}

double confluent_hypergeometric_1f1(double a, double b, double z) {
  double term = 1.0;
  double acc = 1.0;
  for (int n = 0; n < 500; ++n) {
    const double an = a + static_cast<double>(n);
    if (an == 0.0) return acc;  // polynomial case terminates exactly
    term *= an * z / ((b + static_cast<double>(n)) * (static_cast<double>(n) + 1.0));
    acc += term;
    if (std::abs(term) < 1e-14 * std::abs(acc)) return acc;
  }
  throw NumericalError("confluent_hypergeometric_1f1: series did not converge");
}

namespace {

bool is_even_integer(double p) {
  const double r = std::round(p);
  return std::abs(p - r) < 1e-12 && std::fmod(r, 2.0) == 0.0 && r >= 2.0;
}

double kernel_v_impl(double p, double q, double t) {
  const double t2 = t * t;
  if (p == 2.0) {
    return std::exp(-0.25 * t2) * (2.0 - t2) / (8.0 * kSqrtPi);
  }
  if (p == 4.0) {
    return std::exp(-0.25 * t2) * (12.0 - 12.0 * t2 + t2 * t2) / (32.0 * kSqrtPi);
  }
  // Kummer transform of (2 pi)^-1 Gamma((1+p)/2) 1F1((1+p)/2; 1/2; -t^2/4):
  // the reflected series 1F1(-p/2; 1/2; t^2/4) terminates for even integer p,
  // which avoids the catastrophic cancellation of the alternating original.
  (void)q;
  const double front = std::tgamma(0.5 * (1.0 + p)) / (2.0 * kPi);
  return front * std::exp(-0.25 * t2) *
         confluent_hypergeometric_1f1(-0.5 * p, 0.5, 0.25 * t2);
}

}  // namespace

double kernel_v(const MollifierSpec& spec, double t) {
  spec.validate();
  if (std::abs(spec.q - 2.0) > 1e-12 || !is_even_integer(spec.p)) {
    throw ConfigError(
        "kernel_v: unsupported (p, q) combination; the kernel has a closed form only "
        "for q = 2 with even integer p");
  }
  return kernel_v_impl(std::round(spec.p), 2.0, t);
}

namespace {

/// sup |v(u)| for u in [u0, u0 + span], sampled scan.
double tail_supremum(const MollifierSpec& spec, double u0, double span) {
  double sup = 0.0;
  const int samples = 1024;
  for (int i = 0; i <= samples; ++i) {
    const double u = u0 + span * static_cast<double>(i) / samples;
    sup = std::max(sup, std::abs(kernel_v(spec, u)));
  }
  return sup;
}

bool tail_ok(const MollifierSpec& spec, double theta) {
  const double u0 = theta * spec.delta * 0.5 * static_cast<double>(spec.support_points);
  const double span = std::max(20.0, u0);
  return tail_supremum(spec, u0, span) < spec.tail_epsilon;
}

}  // namespace

DiscreteKernel discretize_kernel(const MollifierSpec& spec) {
  spec.validate();
  if (!tail_ok(spec, spec.theta)) {
    // find the smallest adequate theta for the error message
    double hi = spec.theta;
    for (int i = 0; i < 24 && !tail_ok(spec, hi); ++i) hi *= 2.0;
    double lo = spec.theta;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (tail_ok(spec, mid) ? hi : lo) = mid;
    }
    std::ostringstream os;
    os << "discretize_kernel: |v(theta t)| exceeds tail_epsilon=" << spec.tail_epsilon
       << " outside the window [-" << spec.delta * 0.5 * spec.support_points << ", "
       << spec.delta * 0.5 * spec.support_points << "]; smallest adequate theta is about "
       << hi;
    throw ConfigError(os.str());
  }

  const int big_l = spec.support_points;
  DiscreteKernel kernel;
  kernel.delta = spec.delta;
  kernel.theta = spec.theta;
  kernel.values.resize(static_cast<std::size_t>(big_l) + 1);
  for (int l = 0; l <= big_l; ++l) {
    const double t = spec.theta * spec.delta * (static_cast<double>(l) - 0.5 * big_l);
    kernel.values[static_cast<std::size_t>(l)] = kernel_v(spec, t);
  }
  return kernel;
}

PathSample mollify_path(const PathSample& path, const DiscreteKernel& kernel) {
  path.validate();
  constexpr std::size_t kMinOutput = 16;
  const std::size_t big_l = static_cast<std::size_t>(kernel.support_points());
  if (std::abs(path.delta - kernel.delta) > 1e-12 * std::max(path.delta, kernel.delta)) {
    throw ConfigError("mollify_path: path mesh and kernel mesh differ");
  }
  if (path.size() < big_l + kMinOutput) {
    throw ConfigError("mollify_path: path too short for the kernel window");
  }
  const std::size_t out_n = path.size() - big_l;
  PathSample out;
  out.delta = path.delta;
  out.t0 = path.t0 + path.delta * 0.5 * static_cast<double>(big_l);
  out.values.resize(out_n);
  const double* x = path.values.data();
  const double* v = kernel.values.data();
  for (std::size_t k = 0; k < out_n; ++k) {
    double acc = 0.0;
    for (std::size_t l = 0; l <= big_l; ++l) {
      acc += x[k + l] * v[l];
    }
    out.values[k] = path.delta * acc;
  }
  out.meta.seed = path.meta.seed;
  std::ostringstream desc;
  desc << path.meta.descriptor << "|mollified(theta=" << kernel.theta << ",L=" << big_l << ")";
  out.meta.descriptor = desc.str();
  return out;
}

double hfsm_mollified_mass(StabilityIndex alpha, double hurst, const MollifierSpec& spec) {
  const double a = alpha.value();
  const double shape = a * (spec.p - hurst) / spec.q;
  if (!(shape > 0.0)) {
    throw std::invalid_argument("hfsm_mollified_mass: alpha (p - H) must be positive");
  }
  const double rate = a * std::pow(spec.theta, -spec.q);
  return 2.0 / spec.q * std::pow(spec.theta, -a * (1.0 + spec.p)) * std::tgamma(shape) /
         std::pow(rate, shape);
}

ControlDensity control_density(StabilityIndex alpha, const KernelPsi& psi,
                               const MollifierSpec& spec) {
  spec.validate();
  if (!psi.alpha_weight_integrable) {
    throw std::invalid_argument("control_density: Psi is not alpha-weight integrable");
  }
  const double a = alpha.value();
  auto psi_eval = psi.evaluate;
  auto unnormalized = [spec, a, psi_eval](double x) {
    const double w = weight_w(spec, x);
    if (w == 0.0) return 0.0;
    return std::pow(w, a) * std::pow(std::abs(psi_eval(x)), a);
  };

  double mass = 0.0;
  if (psi.hurst) {
    mass = hfsm_mollified_mass(alpha, *psi.hurst, spec);
  } else {
    mass = 2.0 * integrate_half_line(unnormalized, spec.theta, 1e-10);
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("control_density: total mass is not finite and positive");
  }

  ControlDensity density;
  density.unnormalized = unnormalized;
  density.total_mass = mass;
  density.normalized = [unnormalized, mass](double x) { return unnormalized(x) / mass; };
  return density;
}

double rho_hfsm(StabilityIndex alpha, double hurst, double p, double q, double theta,
                double z) {
  const double a = alpha.value();
  const double shape = a * (p - hurst) / q;
  if (!(shape > 0.0)) {
    throw std::invalid_argument("rho_hfsm: shape parameter alpha (p - H) / q must be positive");
  }
  const double rate = a * std::pow(theta, -q);
  const double az = std::abs(z);
  return 0.5 * q * std::pow(rate, shape) / std::tgamma(shape) *
         std::exp(-rate * std::pow(az, q)) * std::pow(az, a * (p - hurst) - 1.0);
}

HfsmFrequencyLaw hfsm_frequency_law(StabilityIndex alpha, double hurst,
                                    const MollifierSpec& spec) {
  const double a = alpha.value();
  HfsmFrequencyLaw law;
  law.shape = a * (spec.p - hurst) / spec.q;
  law.rate = a * std::pow(spec.theta, -spec.q);
  if (!(law.shape > 0.0)) {
    throw std::invalid_argument("hfsm_frequency_law: shape parameter must be positive");
  }
  return law;
}

FrequencyDensity hfsm_frequency_density(StabilityIndex alpha, double hurst,
                                        const MollifierSpec& spec) {
  const auto law = hfsm_frequency_law(alpha, hurst, spec);
  const double a = alpha.value();
  const double p = spec.p, q = spec.q, theta = spec.theta;
  FrequencyDensity density;
  density.pdf = [a, hurst, p, q, theta](double z) {
    return rho_hfsm(StabilityIndex(a), hurst, p, q, theta, z);
  };
  density.sample = [law, q](RandomStream& rng) {
    const double g = gamma_rate(rng, law.shape, law.rate);
    const double magnitude = std::pow(g, 1.0 / q);
    return uniform01(rng) < 0.5 ? -magnitude : magnitude;
  };
  return density;
}

double tail_mass_above(const ControlDensity& density, double cutoff) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("tail_mass_above: cutoff must be positive");
  double acc = 0.0;
  double lo = cutoff;
  for (int panel = 0; panel < 60; ++panel) {
    const double hi = 2.0 * lo;
    const double piece = tanh_sinh(density.normalized, lo, hi, 1e-9);
    acc += piece;
    if (std::abs(piece) < 1e-9 * std::max(acc, 1e-300)) break;
    lo = hi;
  }
  return 2.0 * acc;
}

}  // namespace hsp
