#pragma once

#include <complex>
#include <functional>

#include "weakflux/errors.hpp"

namespace weakflux {

using Complex = std::complex<double>;

/// Tolerances and budgets for the semi-infinite adaptive quadrature.
struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    double truncation_ratio = 1e-12;
    int max_subdivisions = 2000;

    void validate() const;
};

/// Result of a saddle-point (steepest-descent) moment estimate:
/// value() ~ integral of g against the normalized Gaussian
/// exp(-curvature*(t-peak_time)^2).
struct SaddleEstimate {
    double peak_time = 0.0;
    double curvature = 0.0;
    Complex leading_value;
    Complex correction;

    Complex value() const { return leading_value + correction; }
};

/// Adaptive Gauss-Kronrod quadrature of a complex integrand over [0, inf).
/// The domain is truncated where |f| falls below truncation_ratio times the
/// running peak (geometric scan), then refined by bisecting the panel with
/// the largest error estimate. Deterministic for a fixed spec; conjugating
/// the integrand conjugates the result exactly (same node set).
Complex integrate_semi_infinite(const std::function<Complex(double)>& f,
                                const QuadratureSpec& spec = {});

/// Golden-section minimizer of a unimodal exponent on [lo, hi], refined to
/// 1e-10 of the bracket width. Throws NoInteriorMinimum when the minimum
/// sits at a bracket endpoint.
double find_peak(const std::function<double(double)>& rho, double lo, double hi);

/// Gaussian moment estimate around an exponent maximum: leading term g(t_bar)
/// plus the curvature correction g''(t_bar)/(4*rho_curvature). The second
/// derivative uses central differences (h = 1e-4) with one Richardson step.
SaddleEstimate saddle_moment(const std::function<Complex(double)>& g,
                             double rho_curvature, double t_bar);

}  // namespace weakflux
