#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "weakflux/numerics.hpp"
#include "weakflux/states.hpp"

namespace weakflux {

/// A pre/post-selected pair reduced to its time evaluators: the overlap
/// <post|pre_t> and one numerator <post|Op|pre_t> per tracked operator.
///
/// overlap_dt is an optional analytic time derivative (preferred by the
/// energy machinery over finite differences). density_numerator optionally
/// replaces |overlap|^2 as the unnormalized arrival-time weight; all
/// averages and fluctuation moments are then taken against it.
struct OverlapModel {
    std::function<Complex(double)> overlap;
    std::function<Complex(double)> overlap_dt;        // may be empty
    std::function<double(double)> density_numerator;  // may be empty
    std::map<std::string, std::function<Complex(double)>> weak_numerators;
    double hbar = 1.0;
};

/// Reserved operator name for the time parameter itself.
inline const std::string kTimeOp = "t";

/// Time-averaged means and fluctuation moments of weak values over the
/// normalized arrival-time density.
struct TimeSeriesMoments {
    double normalization = 0.0;
    double mean_time = 0.0;
    std::map<std::string, Complex> means;
    std::map<std::pair<std::string, std::string>, Complex> covariances;
    std::map<std::string, double> abs_second_moments;

    const Complex& mean(const std::string& op) const;
    double abs2(const std::string& op) const;
    const Complex& covariance(const std::string& a, const std::string& b) const;
};

struct TimeDensity {
    std::function<double(double)> density;
    double normalization = 0.0;
};

/// Weak value of a tracked operator at time t.
Complex weak_value(const OverlapModel& m, const std::string& op, double t);

/// Normalized arrival-time density and its normalization integral.
TimeDensity time_density(const OverlapModel& m, const QuadratureSpec& spec = {});

/// Precomputed density data so phase sweeps can share one normalization.
struct DensityInfo {
    double normalization = 0.0;
    double mean_time = 0.0;
};

DensityInfo density_info(const OverlapModel& m, const QuadratureSpec& spec = {});

/// Means, absolute second moments and pairwise fluctuation covariances of
/// the named operators (plus the time parameter when "t" is requested).
/// All integrals run on numerator forms so overlap zeros never divide.
/// With full_covariances=false only the diagonal (variances) is computed.
TimeSeriesMoments time_average(const OverlapModel& m, const std::vector<std::string>& ops,
                               const QuadratureSpec& spec = {}, bool full_covariances = true);
TimeSeriesMoments time_average(const OverlapModel& m, const std::vector<std::string>& ops,
                               const QuadratureSpec& spec, bool full_covariances,
                               const DensityInfo& info);

/// Cauchy-Schwarz slack <|dA|^2><|dB|^2> - |<dA dB*>|^2; never below
/// -1e-8 times the product scale.
double uncertainty_gap(const TimeSeriesMoments& m, const std::string& a, const std::string& b);

/// Mean fluctuation commutator <dB* dA - dB dA*> (anti-Hermitian part,
/// purely imaginary) and anti-commutator <dB* dA + dB dA*> (purely real),
/// assembled from the stored covariances.
std::pair<Complex, Complex> commutator_anticommutator_means(const TimeSeriesMoments& m,
                                                            const std::string& a,
                                                            const std::string& b);

/// Position-space kernel of the post-selected coordinate-momentum
/// commutator for a Gaussian post state: anti-Hermitian under
/// (x <-> x', conjugate).
Complex xp_weak_commutator_kernel(const CoherentState1D& phi, double x, double x_prime);

}  // namespace weakflux
