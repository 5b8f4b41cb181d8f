#include "weakflux/weakcore.hpp"

#include <cmath>

namespace weakflux {

namespace {

constexpr double kOverlapFloor = 1e-300;

const std::function<Complex(double)>& numerator_for(const OverlapModel& m,
                                                    const std::string& op) {
    auto it = m.weak_numerators.find(op);
    if (it == m.weak_numerators.end()) throw UnknownOperator("unknown operator: " + op);
    return it->second;
}

double density_at(const OverlapModel& m, double t) {
    return m.density_numerator ? m.density_numerator(t) : std::norm(m.overlap(t));
}

}  // namespace

const Complex& TimeSeriesMoments::mean(const std::string& op) const {
    auto it = means.find(op);
    if (it == means.end()) throw UnknownOperator("operator not tracked: " + op);
    return it->second;
}

double TimeSeriesMoments::abs2(const std::string& op) const {
    auto it = abs_second_moments.find(op);
    if (it == abs_second_moments.end()) throw UnknownOperator("operator not tracked: " + op);
    return it->second;
}

const Complex& TimeSeriesMoments::covariance(const std::string& a, const std::string& b) const {
    auto it = covariances.find({a, b});
    if (it == covariances.end())
        throw UnknownOperator("covariance not tracked: (" + a + ", " + b + ")");
    return it->second;
}

Complex weak_value(const OverlapModel& m, const std::string& op, double t) {
    if (op == kTimeOp) return Complex(t, 0.0);
    const auto& num = numerator_for(m, op);
    const Complex ov = m.overlap(t);
    if (std::abs(ov) < kOverlapFloor)
        throw VanishingOverlap("overlap vanishes at t=" + std::to_string(t));
    return num(t) / ov;
}

TimeDensity time_density(const OverlapModel& m, const QuadratureSpec& spec) {
    const Complex n = integrate_semi_infinite(
        [&](double t) { return Complex(density_at(m, t), 0.0); }, spec);
    const double norm = n.real();
    if (!(norm > spec.abs_tol)) throw ZeroNorm("arrival-time density has no mass");
    TimeDensity d;
    d.normalization = norm;
    d.density = [&m, norm](double t) { return density_at(m, t) / norm; };
    return d;
}

DensityInfo density_info(const OverlapModel& m, const QuadratureSpec& spec) {
    DensityInfo info;
    const TimeDensity d = time_density(m, spec);
    info.normalization = d.normalization;
    info.mean_time = integrate_semi_infinite(
                         [&](double t) { return Complex(t * density_at(m, t), 0.0); }, spec)
                         .real() /
                     d.normalization;
    return info;
}

TimeSeriesMoments time_average(const OverlapModel& m, const std::vector<std::string>& ops,
                               const QuadratureSpec& spec, bool full_covariances) {
    return time_average(m, ops, spec, full_covariances, density_info(m, spec));
}

TimeSeriesMoments time_average(const OverlapModel& m, const std::vector<std::string>& ops,
                               const QuadratureSpec& spec, bool full_covariances,
                               const DensityInfo& info) {
    TimeSeriesMoments out;
    out.normalization = info.normalization;
    out.mean_time = info.mean_time;
    const double n = info.normalization;

    const bool overridden = static_cast<bool>(m.density_numerator);

    // Weak value of `op` at t, stable against overlap zeros: on the default
    // density every integrand below is multiplied back by |overlap|^2, so we
    // keep numerator forms; with an overridden density the ratio itself is
    // needed and guarded.
    auto ratio = [&](const std::string& op, double t) -> Complex {
        if (op == kTimeOp) return Complex(t, 0.0);
        const Complex ov = m.overlap(t);
        if (std::abs(ov) < kOverlapFloor) {
            if (density_at(m, t) < kOverlapFloor) return Complex(0.0, 0.0);
            throw VanishingOverlap("overlap vanishes inside the density support at t=" +
                                   std::to_string(t));
        }
        return numerator_for(m, op)(t) / ov;
    };

    for (const std::string& op : ops) {
        Complex mean;
        if (op == kTimeOp) {
            mean = Complex(info.mean_time, 0.0);
        } else if (!overridden) {
            const auto& num = numerator_for(m, op);
            mean = integrate_semi_infinite(
                       [&](double t) { return num(t) * std::conj(m.overlap(t)); }, spec) /
                   n;
        } else {
            mean = integrate_semi_infinite(
                       [&](double t) { return density_at(m, t) * ratio(op, t); }, spec) /
                   n;
        }
        out.means[op] = mean;
    }

    // Fluctuation of `op` against the overlap (default path: delta-numerator
    // = (A_w - <A_w>) * overlap, smooth everywhere).
    auto delta_num = [&](const std::string& op, double t) -> Complex {
        const Complex mean = out.means.at(op);
        if (op == kTimeOp) return (t - mean.real()) * m.overlap(t);
        return numerator_for(m, op)(t) - mean * m.overlap(t);
    };
    auto delta_ratio = [&](const std::string& op, double t) -> Complex {
        return ratio(op, t) - out.means.at(op);
    };

    for (const std::string& a : ops) {
        for (const std::string& b : ops) {
            if (!full_covariances && a != b) continue;
            Complex cov;
            if (!overridden) {
                cov = integrate_semi_infinite(
                          [&](double t) { return delta_num(a, t) * std::conj(delta_num(b, t)); },
                          spec) /
                      n;
            } else {
                cov = integrate_semi_infinite(
                          [&](double t) {
                              return density_at(m, t) * delta_ratio(a, t) *
                                     std::conj(delta_ratio(b, t));
                          },
                          spec) /
                      n;
            }
            out.covariances[{a, b}] = cov;
            if (a == b) out.abs_second_moments[a] = cov.real();
        }
    }
    return out;
}

double uncertainty_gap(const TimeSeriesMoments& m, const std::string& a, const std::string& b) {
    const double va = m.abs2(a);
    const double vb = m.abs2(b);
    const Complex cab = m.covariance(a, b);
    return va * vb - std::norm(cab);
}

std::pair<Complex, Complex> commutator_anticommutator_means(const TimeSeriesMoments& m,
                                                            const std::string& a,
                                                            const std::string& b) {
    const Complex cab = m.covariance(a, b);  // <dA dB*>
    const Complex cba = m.covariance(b, a);  // <dB dA*>
    return {cab - cba, cab + cba};
}

Complex xp_weak_commutator_kernel(const CoherentState1D& phi, double x, double x_prime) {
    const Complex I(0.0, 1.0);
    const Complex amp_x = coherent_amplitude(phi, x);
    const Complex amp_xp_conj = std::conj(coherent_amplitude(phi, x_prime));
    // Log-derivatives of the Gaussian: d<x|phi>/dx = u(x) <x|phi>.
    const Complex u_x(-phi.gamma * (x - phi.center), phi.momentum / phi.hbar);
    const Complex u_xp_conj(-phi.gamma * (x_prime - phi.center), -phi.momentum / phi.hbar);
    return I * phi.hbar *
           (x * amp_x * u_xp_conj * amp_xp_conj + u_x * amp_x * x_prime * amp_xp_conj);
}

}  // namespace weakflux
