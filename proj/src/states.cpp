#include "weakflux/states.hpp"

#include <cmath>

namespace weakflux {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Complex coherent_amplitude(const CoherentState1D& s, double x) {
    if (!(s.gamma > 0.0)) throw ValidationError("coherent state gamma must be positive");
    if (!(s.hbar > 0.0)) throw ValidationError("hbar must be positive");
    const double dx = x - s.center;
    const Complex expo(-0.5 * s.gamma * dx * dx, s.momentum * dx / s.hbar);
    return std::pow(s.gamma / kPi, 0.25) * std::exp(expo);
}

SpinorAmplitudes spinor_from_phase(double chi) {
    const double r = 1.0 / std::sqrt(2.0);
    return {Complex(r, 0.0), r * Complex(std::cos(chi), std::sin(chi))};
}

ReducedUnits reduce_units(const PhysicalSGParams& p, double hbar) {
    if (!(p.mass > 0.0 && p.field_gradient >= 0.0 && p.interaction_strength >= 0.0 &&
          p.field_length > 0.0 && p.packet_width > 0.0 && p.wavenumber > 0.0 && hbar > 0.0))
        throw ValidationError("physical Stern-Gerlach parameters must be positive");
    ReducedUnits r;
    r.tau = p.mass * p.field_length / (hbar * p.wavenumber);
    r.alpha = r.tau * p.interaction_strength * p.field_gradient * p.packet_width / hbar;
    r.k_y = p.wavenumber * p.packet_width;
    r.time_scale = hbar / (p.mass * p.packet_width * p.packet_width);
    return r;
}

SGConfig make_sg_config(const SGParams& p, std::vector<std::string>* warnings) {
    if (!(p.alpha >= 0.0)) throw ValidationError("alpha must be positive");
    if (!(p.k_y > 0.0)) throw ValidationError("k_y must be positive");
    if (!(p.y_s > 0.0)) throw ValidationError("y_s must be positive");

    SGConfig cfg;
    cfg.alpha = p.alpha;
    cfg.k_y = p.k_y;
    cfg.y_s = p.y_s;
    cfg.y_i = p.y_i;
    cfg.z0 = p.z0.value_or(p.alpha * p.y_s / p.k_y);
    cfg.chi_i = p.chi_i;
    cfg.chi_f = p.chi_f;

    auto resolve = [&](const std::optional<SpinorAmplitudes>& explicit_spinor, double chi,
                       const char* which) {
        if (!explicit_spinor) return spinor_from_phase(chi);
        if (chi != 0.0 && warnings)
            warnings->push_back(std::string(which) +
                                " spinor given explicitly; phase value ignored");
        const SpinorAmplitudes& s = *explicit_spinor;
        if (std::abs(s.norm_sq() - 1.0) > 1e-12)
            throw ValidationError(std::string(which) + " spinor must be normalized");
        return s;
    };
    cfg.pre = resolve(p.pre_spinor, p.chi_i, "pre");
    cfg.post = resolve(p.post_spinor, p.chi_f, "post");
    return cfg;
}

}  // namespace weakflux
