#include "hsp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hsp/errors.hpp"

namespace hsp {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0) {
    throw NumericalError("adaptive_simpson: tolerance not reached at maximal depth");
  }
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, b - a);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_level) {
  if (a == b) return 0.0;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  constexpr double pi_half = std::numbers::pi / 2.0;
  const double t_max = 3.8;  // offsets shrink below ~1e-280 past this point

  // node at trellis position t > 0; contributes the symmetric pair
  auto pair_value = [&](double t) -> double {
    const double u = pi_half * std::sinh(t);
    const double cu = std::cosh(u);
    const double weight = half * pi_half * std::cosh(t) / (cu * cu);
    // distance of the abscissa from either endpoint, computed without
    // cancellation: 1 - tanh(u) = 2 / (e^{2u} + 1)
    const double offset = half * 2.0 / (std::exp(2.0 * u) + 1.0);
    if (offset <= 0.0 || weight <= 0.0) return 0.0;
    return weight * (f(a + offset) + f(b - offset));
  };

  double h = 1.0;
  double sum = half * pi_half * f(center);  // t = 0 node
  for (double t = h; t <= t_max; t += h) sum += pair_value(t);
  double integral = h * sum;

  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double add = 0.0;
    for (double t = h; t <= t_max; t += 2.0 * h) add += pair_value(t);
    const double refined = 0.5 * integral + h * add;
    const double change = std::abs(refined - integral);
    integral = refined;
    if (level >= 3 && change <= tol * std::max(1e-300, std::abs(integral))) {
      return integral;
    }
  }
  throw NumericalError("tanh_sinh: tolerance not reached at maximal level");
}

double integrate_half_line(const std::function<double(double)>& f, double split,
                           double tol) {
  double acc = tanh_sinh(f, 0.0, split, tol);
  double lo = split;
  for (int panel = 0; panel < 60; ++panel) {
    const double hi = 2.0 * lo;
    const double piece = tanh_sinh(f, lo, hi, tol);
    acc += piece;
    if (std::abs(piece) < tol * std::max(1e-300, std::abs(acc))) {
      return acc;
    }
    lo = hi;
  }
  throw NumericalError("integrate_half_line: tail did not become negligible");
}

double trapezoid(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels) {
  const double h = (b - a) / static_cast<double>(panels);
  double acc = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < panels; ++i) {
    acc += f(a + h * static_cast<double>(i));
  }
  return acc * h;
}

}  // namespace hsp
