#pragma once

#include <functional>

namespace hsp {

/// Adaptive Simpson rule on [a, b]. Suitable for smooth integrands; throws
/// NumericalError when the tolerance is unreachable within max_depth.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

/// tanh-sinh (double exponential) rule on [a, b]. Converges fast for smooth
/// integrands and still handles integrable endpoint singularities; the
/// integrand is never evaluated at the endpoints themselves.
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_level = 12);

/// \int_0^\infty f for a decaying integrand, possibly with an integrable
/// singularity at 0. [0, split] goes through tanh_sinh; the tail is summed
/// over doubling panels until a panel falls below tol * |accumulated|.
double integrate_half_line(const std::function<double(double)>& f, double split,
                           double tol);

/// Plain trapezoid sum of tabulated values on an increasing grid.
double trapezoid(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels);

}  // namespace hsp
