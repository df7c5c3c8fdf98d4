#pragma once

// Test-side oracles, independent of the library's implementation paths.

#include <functional>
#include <span>
#include <vector>

namespace oracles {

/// Composite Simpson rule with a fixed (even) panel count.
double composite_simpson(const std::function<double(double)>& f, double a, double b,
                         std::size_t panels);

/// Kolmogorov distribution tail Q_KS(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
double kolmogorov_q(double lambda);

/// One-sample Kolmogorov-Smirnov test against a CDF; returns the p-value.
double ks_test_cdf(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test; returns the p-value.
double ks_test_two_sample(std::vector<double> a, std::vector<double> b);

/// Regularized lower incomplete gamma P(a, x) (series + continued fraction).
double reg_lower_incomplete_gamma(double a, double x);

/// CDF of Gamma(shape, rate) at x.
double gamma_cdf(double x, double shape, double rate);

/// Closed forms for the special constants (reference values, not the
/// library's quadrature route).
double lambda_alpha_closed(double alpha);        // Gamma((a+1)/2) / (sqrt(pi) Gamma(a/2+1))
double sine_power_integral_closed(double alpha); // Gamma(1-a) cos(pi a/2), a != 1; pi/2 at 1
double lepage_constant_closed(double alpha);

struct CfEstimate {
  double mean = 0.0;  // average of cos(s X_i)
  double se = 0.0;    // Monte Carlo standard error of the average
};

/// Empirical characteristic function (real part) of a sample at frequency s.
CfEstimate empirical_cf(std::span<const double> sample, double s);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
};

MeanEstimate mean_with_se(std::span<const double> sample);

}  // namespace oracles
