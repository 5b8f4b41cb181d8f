#include "weakflux/timeenergy.hpp"

#include <cmath>

namespace weakflux {

namespace {

const std::string kEnergyOp = "E";

Complex overlap_derivative(const OverlapModel& m, double t) {
    if (m.overlap_dt) return m.overlap_dt(t);
    const double h0 = 1e-5;
    auto central = [&](double h) { return (m.overlap(t + h) - m.overlap(t - h)) / (2.0 * h); };
    if (t >= h0) {
        const Complex d1 = central(h0);
        const Complex d2 = central(0.5 * h0);
        return (4.0 * d2 - d1) / 3.0;
    }
    // One-sided stencil at the domain boundary.
    const Complex f0 = m.overlap(t);
    const Complex f1 = m.overlap(t + h0);
    const Complex f2 = m.overlap(t + 2.0 * h0);
    return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h0);
}

// Model with the energy numerator i*hbar*d(overlap)/dt registered.
OverlapModel with_energy(const OverlapModel& m) {
    if (m.density_numerator)
        throw ValidationError(
            "time-energy machinery requires the default |overlap|^2 density");
    OverlapModel out = m;
    const Complex I(0.0, 1.0);
    const double hbar = m.hbar;
    out.weak_numerators[kEnergyOp] = [m, I, hbar](double t) {
        return I * hbar * overlap_derivative(m, t);
    };
    return out;
}

}  // namespace

Complex energy_weak_value(const OverlapModel& m, double t) {
    const Complex ov = m.overlap(t);
    if (std::abs(ov) < 1e-300)
        throw VanishingOverlap("overlap vanishes at t=" + std::to_string(t));
    return Complex(0.0, 1.0) * m.hbar * overlap_derivative(m, t) / ov;
}

Complex time_energy_commutator_mean(const OverlapModel& m, const QuadratureSpec& spec) {
    const OverlapModel me = with_energy(m);
    const TimeSeriesMoments mom = time_average(me, {kTimeOp, kEnergyOp}, spec);
    // <dt (dE* - dE)> from the stored covariances (dt is real).
    const Complex lhs = mom.covariance(kTimeOp, kEnergyOp) - mom.covariance(kEnergyOp, kTimeOp);

    const double ov0sq = std::norm(m.overlap(0.0));
    const Complex closed =
        Complex(0.0, m.hbar) * (1.0 - mom.mean_time * ov0sq / mom.normalization);
    const double tol = 1e-6 * m.hbar * (1.0 + mom.mean_time * ov0sq / mom.normalization);
    if (std::abs(lhs - closed) > tol)
        throw Error("time-energy commutator integration-by-parts identity violated");
    return lhs;
}

TimeEnergyReport time_energy_uncertainty_report(const OverlapModel& m,
                                                const QuadratureSpec& spec) {
    const OverlapModel me = with_energy(m);
    const TimeSeriesMoments mom = time_average(me, {kTimeOp, kEnergyOp}, spec);

    TimeEnergyReport r;
    r.mean_time = mom.mean_time;
    r.mean_energy = mom.mean(kEnergyOp);
    r.normalization = mom.normalization;
    r.initial_overlap_sq = std::norm(m.overlap(0.0));
    r.var_time = mom.abs2(kTimeOp);
    r.var_energy = mom.abs2(kEnergyOp);
    r.commutator_mean = mom.covariance(kTimeOp, kEnergyOp) - mom.covariance(kEnergyOp, kTimeOp);

    const double ratio = r.mean_time * r.initial_overlap_sq / r.normalization;
    const Complex closed = Complex(0.0, m.hbar) * (1.0 - ratio);
    if (std::abs(r.commutator_mean - closed) > 1e-6 * m.hbar * (1.0 + ratio))
        throw Error("time-energy commutator integration-by-parts identity violated");

    const double im_expected = -m.hbar * r.initial_overlap_sq / (2.0 * r.normalization);
    if (std::abs(r.mean_energy.imag() - im_expected) >
        1e-8 * std::max(1.0, std::abs(im_expected)))
        throw Error("imaginary mean energy does not match its boundary value");

    r.bound_rhs = 0.25 * m.hbar * m.hbar * (1.0 - ratio) * (1.0 - ratio);
    r.product_lhs = r.var_time * r.var_energy;
    const double eps = 1e-8 * std::max(r.product_lhs, r.bound_rhs);
    if (r.product_lhs < r.bound_rhs - eps)
        throw Error("time-energy uncertainty bound violated");
    return r;
}

}  // namespace weakflux
