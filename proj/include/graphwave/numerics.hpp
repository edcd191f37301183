#pragma once

#include <functional>
#include <span>
#include <vector>

namespace graphwave::numerics {

/// artanh(t) = 0.5 ln((1+t)/(1-t)), with t clamped to 1 - 1e-15 so the
/// value stays finite at the existence boundary.
double safe_artanh(double t);

double sech(double x);

/// Finite-difference weights (Fornberg) for the derivative of order
/// `order` at z from samples at `nodes`.
std::vector<double> fd_weights(double z, std::span<const double> nodes, int order);

/// Derivative of uniformly spaced samples (spacing h). Sixth-order
/// centered stencil in the interior, one-sided seven-point stencils near
/// both ends. Needs at least 7 samples.
std::vector<double> derivative(std::span<const double> f, double h);

/// First derivative at sample 0 from the seven leading samples.
double derivative_at_start(std::span<const double> f, double h);

/// Composite Simpson weights for n uniformly spaced samples. An odd
/// number of intervals is closed with the 3/8 rule on the last three.
/// Needs n >= 4 (or n == 3).
std::vector<double> simpson_weights(int n, double h);

/// Trapezoid weights with Gregory end corrections through fourth
/// differences: exact for degree <= 5, O(h^6). All weights are positive.
/// Falls back to Simpson for n < 10.
std::vector<double> gregory_weights(int n, double h);

/// Integral of uniformly spaced samples with gregory_weights.
double integrate_samples(std::span<const double> f, double h);

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 60);

/// Integral of (1 - t^2)^alpha over [lo, 1], alpha > -1. For alpha >= 0
/// the segment [1 - 1e-8, 1] uses the endpoint expansion; for alpha < 0
/// the substitution u = (1-t)^{alpha+1} removes the singularity.
double power_of_one_minus_t2(double alpha, double lo, double tol = 1e-12);

/// Bisection on a bracket with f(a) f(b) < 0. Throws NoRootError when the
/// bracket does not change sign.
double bisect(const std::function<double(double)>& f, double a, double b,
              double xtol, int max_iter = 400);

}  // namespace graphwave::numerics
