#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hsp/errors.hpp"
#include "hsp/quadrature.hpp"
#include "hsp/stable.hpp"
#include "oracles.hpp"

using namespace hsp;
namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE_BEGIN("stable");

TEST_CASE("domain types reject out-of-range parameters") {
  CHECK_THROWS_AS(StabilityIndex(0.0), std::invalid_argument);
  CHECK_THROWS_AS(StabilityIndex(2.0), std::invalid_argument);
  CHECK_THROWS_AS(StabilityIndex(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(SasScale(0.0), std::invalid_argument);
  CHECK_NOTHROW(StabilityIndex(1.999999));
}

TEST_CASE("sample_sas: Gaussian endpoint variance") {
  RandomStream rng = make_stream(101);
  const StabilityIndex alpha(2.0 - 1e-9);
  const SasScale sigma(1.0);
  const std::size_t n = 100000;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sample_sas(alpha, sigma, rng);
    ss += x * x;
  }
  // at alpha -> 2 the law is N(0, 2 sigma^2)
  CHECK(ss / static_cast<double>(n) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("sample_sas: Cauchy median is zero within 3 standard errors") {
  RandomStream rng = make_stream(102);
  const std::size_t n = 100000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = sample_sas(StabilityIndex(1.0), SasScale(1.0), rng);
  std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
  const double median = draws[n / 2];
  // asymptotic sd of the sample median is 1 / (2 f(0) sqrt(n)) = pi / (2 sqrt(n))
  const double se = kPi / (2.0 * std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(median) < 3.0 * se);
}

TEST_CASE("sample_sas: empirical characteristic function matches exp(-|s|^alpha)") {
  RandomStream rng = make_stream(103);
  const std::size_t n = 1000000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = sample_sas(StabilityIndex(1.5), SasScale(1.0), rng);
  const auto cf = oracles::empirical_cf(draws, 1.0);
  CHECK(std::abs(cf.mean - std::exp(-1.0)) < 3.0 * cf.se);
}

TEST_CASE("sample_sas: scale 2 equals 2 x scale 1 in distribution") {
  RandomStream rng_a = make_stream(104);
  RandomStream rng_b = make_stream(105);
  const std::size_t n = 10000;
  std::vector<double> a(n), b(n);
  for (auto& v : a) v = sample_sas(StabilityIndex(1.2), SasScale(2.0), rng_a);
  for (auto& v : b) v = 2.0 * sample_sas(StabilityIndex(1.2), SasScale(1.0), rng_b);
  CHECK(oracles::ks_test_two_sample(a, b) > 0.01);
}

TEST_CASE("sample_isotropic_complex_sas: argument is uniform on [0, 2pi)") {
  RandomStream rng = make_stream(106);
  const std::size_t n = 10000;
  std::vector<double> args(n);
  for (auto& v : args) {
    const auto z = sample_isotropic_complex_sas(StabilityIndex(1.5), 1.0, rng);
    v = std::arg(z) + kPi;  // [0, 2pi)
  }
  const double p =
      oracles::ks_test_cdf(args, [](double x) { return x / (2.0 * kPi); });
  CHECK(p > 0.01);
}

TEST_CASE("sample_isotropic_complex_sas: mass scaling is c^(1/alpha)") {
  RandomStream rng_a = make_stream(207);
  RandomStream rng_b = make_stream(208);
  const std::size_t n = 10000;
  const double mass = std::pow(2.0, 1.5);  // c^(1/alpha) = 2 at alpha = 1.5
  std::vector<double> a(n), b(n);
  for (auto& v : a) v = sample_isotropic_complex_sas(StabilityIndex(1.5), mass, rng_a).real();
  for (auto& v : b) {
    v = 2.0 * sample_isotropic_complex_sas(StabilityIndex(1.5), 1.0, rng_b).real();
  }
  CHECK(oracles::ks_test_two_sample(a, b) > 0.01);
}

TEST_CASE("sample_isotropic_complex_sas: heavy tail inflates the sample variance") {
  RandomStream rng = make_stream(109);
  const std::size_t n = 100000;
  std::vector<double> mods(n);
  for (auto& v : mods) v = std::abs(sample_isotropic_complex_sas(StabilityIndex(0.75), 1.0, rng));
  auto variance_of_prefix = [&](std::size_t k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) mean += mods[i];
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) ss += (mods[i] - mean) * (mods[i] - mean);
    return ss / static_cast<double>(k - 1);
  };
  CHECK(variance_of_prefix(n) > 3.0 * variance_of_prefix(1000));
}

TEST_CASE("sample_isotropic_complex_sas: modulus is invariant under a fixed rotation") {
  RandomStream rng = make_stream(110);
  const std::complex<double> phase = std::polar(1.0, 0.7);
  for (int i = 0; i < 100; ++i) {
    const auto z = sample_isotropic_complex_sas(StabilityIndex(1.1), 2.0, rng);
    CHECK(std::abs(phase * z) == doctest::Approx(std::abs(z)).epsilon(1e-12));
  }
}

TEST_CASE("lambda_alpha: endpoint values and brute-force check") {
  CHECK(lambda_alpha(2.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(lambda_alpha(1.0) == doctest::Approx(2.0 / kPi).epsilon(1e-10));
  // 1e6-node trapezoid of the defining integral
  const double brute = oracles::composite_simpson(
      [](double x) { return std::pow(std::abs(std::cos(x)), 0.5); }, 0.0, 2.0 * kPi,
      1 << 20) / (2.0 * kPi);
  CHECK(lambda_alpha(0.5) == doctest::Approx(brute).epsilon(1e-7));
  CHECK(lambda_alpha(0.5) == doctest::Approx(oracles::lambda_alpha_closed(0.5)).epsilon(1e-10));
  CHECK_THROWS_AS(lambda_alpha(2.1), std::invalid_argument);
}

TEST_CASE("lepage_constant: closed-form anchors and continuity toward alpha = 2") {
  CHECK(lepage_constant(StabilityIndex(1.0)) == doctest::Approx(0.50795).epsilon(2e-5));
  for (double alpha : {0.5, 0.75, 1.0, 1.5, 1.9}) {
    CHECK(lepage_constant(StabilityIndex(alpha)) ==
          doctest::Approx(oracles::lepage_constant_closed(alpha)).epsilon(1e-8));
  }
  const double c_a = lepage_constant(StabilityIndex(1.9));
  const double c_b = lepage_constant(StabilityIndex(1.99));
  const double c_c = lepage_constant(StabilityIndex(1.999));
  CHECK(c_a > 0.0);
  CHECK(c_b > 0.0);
  CHECK(c_c > 0.0);
  CHECK(c_a > c_b);
  CHECK(c_b > c_c);
}

TEST_CASE("sine_coefficients: anchors at alpha = 1") {
  const auto coeffs = sine_coefficients(StabilityIndex(1.0), 4);
  CHECK(coeffs.c0 == doctest::Approx(2.0 / kPi).epsilon(1e-12));
  CHECK(coeffs.c[0] == doctest::Approx(-0.21221).epsilon(1e-4));
  // Fourier view: c_k = -(2/pi)/(4k^2 - 1) at alpha = 1
  for (std::size_t k = 1; k <= 4; ++k) {
    CHECK(coeffs.c[k - 1] ==
          doctest::Approx(-(2.0 / kPi) / (4.0 * k * k - 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("sine_coefficients: all coefficients negative, absolute sums approach c0/2") {
  // The (-1)^k factor cancels against the sign alternation of the reflected
  // Gamma, so sum_{k>=1} c_k = -c0/2; the truncation error has the closed
  // form (C(alpha)/alpha) Gamma(K+1-alpha/2) / Gamma(K+1+alpha/2).
  for (double alpha : {0.5, 0.75, 1.0, 1.5, 1.9}) {
    const auto coeffs = sine_coefficients(StabilityIndex(alpha), 800);
    for (double ck : coeffs.c) CHECK(ck < 0.0);

    double previous_error = 1e300;
    for (std::size_t k : {50u, 100u, 200u, 400u, 800u}) {
      const double error = std::abs(coeffs.partial_sum(k) + 0.5 * coeffs.c0);
      CHECK(error < previous_error);
      previous_error = error;
    }

    const double front = std::pow(2.0, -alpha) * std::tgamma(1.0 + alpha) *
                         std::sin(0.5 * kPi * alpha) / kPi;
    const double k_top = 800.0;
    const double predicted = front / alpha *
                             std::exp(std::lgamma(k_top + 1.0 - 0.5 * alpha) -
                                      std::lgamma(k_top + 1.0 + 0.5 * alpha));
    const double measured = std::abs(coeffs.partial_sum(800) + 0.5 * coeffs.c0);
    CHECK(measured == doctest::Approx(predicted).epsilon(0.02));
  }
}

TEST_CASE("sine_coefficients: alpha = 1.5 partial sums converge to |c0/2|") {
  const auto coeffs = sine_coefficients(StabilityIndex(1.5), 20000);
  const double error = std::abs(coeffs.partial_sum(20000) + 0.5 * coeffs.c0);
  CHECK(error < 1e-6);
}

TEST_CASE("alpha_sine_transform: zero at t = 0 and method agreement") {
  EvenFunction indicator;
  indicator.evaluate = [](double x) { return std::abs(x) <= 1.0 ? 1.0 : 0.0; };
  indicator.support_radius = 1.0;
  indicator.fourier = [](double s) { return s == 0.0 ? 2.0 : 2.0 * std::sin(s) / s; };

  const StabilityIndex one(1.0);
  CHECK(alpha_sine_transform(indicator, 0.0, one) == 0.0);

  for (double t : {0.1, 1.0, 10.0, 100.0}) {
    const double by_quadrature =
        alpha_sine_transform(indicator, t, one, SineTransformMethod::quadrature);
    const double by_series =
        alpha_sine_transform(indicator, t, one, SineTransformMethod::series);
    CHECK(by_series == doctest::Approx(by_quadrature).epsilon(1e-6));
  }

  // composite-Simpson oracle at t = 10 (integrand kinks at multiples of pi/10)
  const double brute = oracles::composite_simpson(
      [](double x) { return std::abs(std::sin(10.0 * x)); }, -1.0, 1.0, 1 << 20);
  CHECK(alpha_sine_transform(indicator, 10.0, one) == doctest::Approx(brute).epsilon(1e-6));
}

TEST_CASE("alpha_sine_transform: Gaussian limit c0(1) ||u||_1 at large t") {
  EvenFunction gaussian;
  gaussian.evaluate = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
  };
  gaussian.support_radius = 12.0;
  gaussian.fourier = [](double s) { return std::exp(-0.5 * s * s); };

  const double limit = 2.0 / kPi;  // c0(1) * ||u||_1
  const double at_large_t =
      alpha_sine_transform(gaussian, 1000.0, StabilityIndex(1.0), SineTransformMethod::series);
  CHECK(at_large_t == doctest::Approx(limit).epsilon(1e-8));

  // |T_alpha u| <= ||u||_1 along the way
  for (double t : {0.5, 2.0, 20.0}) {
    CHECK(std::abs(alpha_sine_transform(gaussian, t, StabilityIndex(1.0))) <= 1.0 + 1e-12);
  }
}

TEST_CASE("alpha_sine_transform: series on non-integrable input is a domain violation") {
  EvenFunction heavy;
  heavy.evaluate = [](double x) { return 1.0 / (1.0 + std::abs(x)); };
  heavy.absolutely_integrable = false;
  CHECK_THROWS_AS(
      alpha_sine_transform(heavy, 1.0, StabilityIndex(1.5), SineTransformMethod::series),
      std::invalid_argument);
}

TEST_CASE("trigamma: anchors, recurrence and direct series") {
  CHECK(trigamma(1.0) == doctest::Approx(kPi * kPi / 6.0).epsilon(1e-12));
  CHECK(trigamma(2.0) == doctest::Approx(kPi * kPi / 6.0 - 1.0).epsilon(1e-12));
  // 10^6-term direct series plus the analytic remainder of the tail
  const double x = 10.0;
  double series = 0.0;
  const double terms = 1000000.0;
  for (double k = 0.0; k < terms; ++k) series += 1.0 / ((x + k) * (x + k));
  series += 1.0 / (x + terms) + 0.5 / ((x + terms) * (x + terms));
  CHECK(trigamma(10.0) == doctest::Approx(series).epsilon(1e-9));
  CHECK_THROWS_AS(trigamma(0.0), std::invalid_argument);
}

TEST_CASE("constants vary continuously in alpha") {
  double prev_lambda = lambda_alpha(0.2);
  double prev_c = lepage_constant(StabilityIndex(0.2));
  double prev_c0 = sine_series_c0(0.2);
  for (double alpha = 0.3; alpha < 2.0; alpha += 0.1) {
    const double lam = lambda_alpha(alpha);
    const double lc = lepage_constant(StabilityIndex(std::min(alpha, 1.99)));
    const double c0 = sine_series_c0(alpha);
    CHECK(lam > 0.0);
    CHECK(lam < 1.0);
    CHECK(lc > 0.0);
    CHECK(c0 > 0.0);
    CHECK(std::abs(lam - prev_lambda) < 0.12);
    CHECK(std::abs(lc - prev_c) < 0.12);
    CHECK(std::abs(c0 - prev_c0) < 0.12);
    prev_lambda = lam;
    prev_c = lc;
    prev_c0 = c0;
  }
}

TEST_SUITE_END();
