#pragma once

#include "weakflux/weakcore.hpp"

namespace weakflux {

/// Time and energy statistics of a pre/post-selected pair, together with the
/// emergent time-energy commutator and the variance-product bound.
struct TimeEnergyReport {
    double mean_time = 0.0;
    Complex mean_energy;
    double initial_overlap_sq = 0.0;  // |<post|pre_0>|^2
    double normalization = 0.0;
    Complex commutator_mean;
    double bound_rhs = 0.0;
    double product_lhs = 0.0;
    double var_time = 0.0;
    double var_energy = 0.0;
};

/// i*hbar d/dt ln<post|pre_t>. Uses the model's analytic derivative when
/// present, otherwise central differences with one Richardson step.
Complex energy_weak_value(const OverlapModel& m, double t);

/// Mean fluctuation commutator of the time parameter with the energy weak
/// value, computed by quadrature and cross-checked against the
/// integration-by-parts closed form i*hbar*(1 - <t>|<post|pre_0>|^2/N);
/// the two must agree to 1e-6 (relative to the hbar scale).
Complex time_energy_commutator_mean(const OverlapModel& m, const QuadratureSpec& spec = {});

/// Full report: variances, commutator mean and the bound
/// (hbar^2/4)(1 - <t>|<post|pre_0>|^2/N)^2 <= <|dt|^2><|dE|^2>.
TimeEnergyReport time_energy_uncertainty_report(const OverlapModel& m,
                                                const QuadratureSpec& spec = {});

}  // namespace weakflux
