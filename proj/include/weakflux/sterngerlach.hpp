#pragma once

#include <array>
#include <functional>
#include <vector>

#include "weakflux/weakcore.hpp"

namespace weakflux {

struct SpinTriple {
    Complex sx;
    Complex sy;
    Complex sz;
};

/// Derived beam quantities for a reduced-unit Stern-Gerlach run: the
/// arrival-time exponent peak t_bar = y_s/k_y, its curvature, and the
/// attenuation/phase accumulated by the down component relative to up.
struct SGBeam {
    SGConfig config;
    double t_bar = 1.0;
    double curvature = 0.0;

    double Y(double t) const;
    double eta(double t) const;
    Complex R(double t) const;
    /// Spinor contraction <post|(1, R(t)) pre>; the anomalous-value region
    /// lives where this approaches zero.
    Complex spinor_denominator(double t) const;
};

/// Validates the exponent-peak and curvature identities and returns the
/// derived beam.
SGBeam make_beam(const SGConfig& cfg);

/// Spatial amplitudes of the up and down beams past the field region.
std::pair<Complex, Complex> phi_pm(const SGBeam& beam, double x, double y, double z, double t);

/// Overlap of the up and down spatial beams (real, field-driven decay).
double beam_overlap(const SGBeam& beam, double t);

/// Ordinary expectation values of the three Pauli operators in the evolved
/// beam (no post-selection).
SpinTriple strong_values(const SGBeam& beam, double t);

/// Slack of the Robertson bound for (sigma_x, sigma_y): direct evaluation
/// cross-checked against its closed form, always nonnegative.
double strong_uncertainty_gap(const SGBeam& beam, double t);

/// Overlap of the screen Gaussian with the up beam at the screen plane.
Complex postselect_overlap(const SGBeam& beam, double t);

/// |postselect_overlap|^2 in closed real form.
double postselect_density_plus(const SGBeam& beam, double t);

/// Post-selected weak values of the three Pauli operators (general spinors).
SpinTriple weak_spins(const SGBeam& beam, double t);

/// Same quantities through the symmetric-phase closed forms; equal to
/// weak_spins when the config came from phases.
SpinTriple weak_spins_phase_form(const SGBeam& beam, double t);

struct SpinLinearity {
    Complex c_x;   // dSx = c_x dSz
    Complex c_y;   // dSy = c_y dSz
    Complex c_xy;  // dSx = c_xy dSy
};

/// Proportionality constants tying the spin weak-value fluctuations to the
/// vertical one; set by the post spinor alone.
SpinLinearity spin_linearity_coefficients(const SpinorAmplitudes& post);

struct SpinCommutators {
    Complex commutator;      // <dSx* dSy - dSx dSy*>
    Complex anticommutator;  // <dSx* dSy + dSx dSy*>
    double var_product = 0.0;
    Complex commutator_closed;
    Complex anticommutator_closed;
    double var_product_closed = 0.0;
};

/// Time-averaged spin fluctuation commutator/anti-commutator and the
/// (x,y) variance product: direct covariance assembly cross-checked against
/// the closed forms driven by <|dSz|^2>.
SpinCommutators spin_commutators(const TimeSeriesMoments& moments,
                                 const SpinorAmplitudes& post);

struct TimeSpinBound {
    double lhs = 0.0;          // <|dS|^2><|dt|^2>
    double rhs = 0.0;          // |<dt dS*>|^2 (the provable bound)
    double rhs_literal = 0.0;  // |<t S_w>|^2, reported without assertion
};

TimeSpinBound time_spin_uncertainty(const TimeSeriesMoments& moments, const std::string& spin_op);

struct TransitionDensity {
    std::function<double(double)> exact;
    double normalization = 0.0;
    std::function<double(double)> sd;
    double normalization_sd = 0.0;
    double t_bar = 0.0;
    double curvature = 0.0;
};

/// Exact arrival-time density (spatial post-selection summed over spin) with
/// its Gaussian steepest-descent companion.
TransitionDensity transition_density(const SGBeam& beam, const QuadratureSpec& spec = {});

/// Overlap model carrying the spin weak-value numerators and the
/// spin-summed arrival-time density.
OverlapModel sg_overlap_model(const SGBeam& beam);

struct SpinTimeAverages {
    SpinTriple means;
    std::array<double, 3> sigmas{};  // sqrt(<|dS_j|^2>), j = x,y,z
    SpinTriple sd_means;
    std::array<double, 3> sd_sigmas{};
    bool near_singular = false;
};

/// Exact time averages via quadrature plus their saddle-point estimates.
/// Pass a shared DensityInfo to reuse the (phase-independent) normalization
/// across a sweep.
SpinTimeAverages time_averaged_spins(const SGBeam& beam, const QuadratureSpec& spec = {},
                                     const DensityInfo* shared = nullptr);

/// Phase bound coth(Y(t_bar)/2) on |<S_z,w>| over the phase grid.
double max_anomalous_sz(const SGBeam& beam);

struct PhaseGridPoint {
    double chi_i = 0.0;
    double chi_f = 0.0;
    SpinTimeAverages avg;
};

/// Row-major sweep over an n x n grid of (chi_i, chi_f) in [0, 2*pi).
/// Points run concurrently; the output order is fixed regardless of the
/// thread count.
std::vector<PhaseGridPoint> sweep_phase_grid(const SGConfig& base, int n,
                                             const QuadratureSpec& spec = {}, int threads = 0);

}  // namespace weakflux
