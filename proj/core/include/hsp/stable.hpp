#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "hsp/random.hpp"

namespace hsp {

/// Index of stability, restricted to the open interval (0, 2). The Gaussian
/// endpoint 2 is deliberately rejected; limit behaviour is exercised with
/// values like 2 - 1e-6.
class StabilityIndex {
 public:
  explicit StabilityIndex(double alpha);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// Scale parameter of a symmetric alpha-stable law, sigma > 0.
class SasScale {
 public:
  explicit SasScale(double sigma);
  double value() const noexcept { return sigma_; }

 private:
  double sigma_;
};

/// One draw of a symmetric alpha-stable variable with characteristic function
/// exp(-sigma^alpha |s|^alpha), by the Chambers-Mallows-Stuck transform.
double sample_sas(StabilityIndex alpha, SasScale sigma, RandomStream& rng);

/// One draw of a complex isotropic SaS random measure evaluated on a cell of
/// control mass `cell_mass`. Built as sqrt(A) (G1 + i G2) with A positive
/// (alpha/2)-stable totally skewed, scaled so that for every unit-modulus z
/// the projection Re(z * draw) is SaS with scale (lambda_alpha * cell_mass)^(1/alpha).
std::complex<double> sample_isotropic_complex_sas(StabilityIndex alpha, double cell_mass,
                                                  RandomStream& rng);

/// (1/2pi) \int_0^{2pi} |cos x|^alpha dx for alpha in (0, 2], to 1e-10.
/// Relates control mass to the SaS scale of real projections of isotropic
/// stable integrals.
double lambda_alpha(double alpha);

/// Normalizing constant of the LePage series,
/// C_alpha = (2^(alpha/2) Gamma(1+alpha/2) \int_0^inf sin(x) x^-alpha dx)^(-1/alpha),
/// evaluated by adaptive quadrature to relative accuracy 1e-8.
double lepage_constant(StabilityIndex alpha);

/// Cosine-series coefficients of |sin t|^alpha:
/// |sin t|^alpha = c_0 + 2 sum_{k>=1} c_k cos(2kt).
/// All c_k with k >= 1 are negative for alpha in (0,2); their absolute sums
/// converge to c_0 / 2 (equivalently sum c_k = -c_0 / 2).
struct SineCoefficients {
  double alpha = 0.0;
  double c0 = 0.0;
  std::vector<double> c;  // c[k-1] holds c_k for k = 1..k_max

  /// sum_{k=1}^{K} c_k (K capped at the stored length).
  double partial_sum(std::size_t k) const;
};

SineCoefficients sine_coefficients(StabilityIndex alpha, std::size_t k_max);

/// c_0(alpha) = 2^-alpha Gamma(1+alpha) / Gamma(1+alpha/2)^2.
double sine_series_c0(double alpha);

/// An even real function together with the hints quadrature needs.
struct EvenFunction {
  std::function<double(double)> evaluate;
  bool absolutely_integrable = true;  // u in L^1(R)
  double support_radius = 50.0;       // |x| beyond which u is negligible
  // closed form of \int e^{isx} u(x) dx when available; computed numerically otherwise
  std::function<double(double)> fourier;
};

enum class SineTransformMethod { quadrature, series };

/// T_alpha u(t) = \int_R |sin(tx)|^alpha u(x) dx. The series route expands
/// |sin|^alpha in its cosine series and needs u in L^1; calling it on a
/// non-integrable u is a domain violation.
double alpha_sine_transform(const EvenFunction& u, double t, StabilityIndex alpha,
                            SineTransformMethod method = SineTransformMethod::quadrature);

/// Trigamma function Psi_1(x), x > 0, via recurrence plus asymptotic series.
double trigamma(double x);

}  // namespace hsp
