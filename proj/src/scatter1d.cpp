#include "weakflux/scatter1d.hpp"

#include <cmath>

namespace weakflux {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Complex kI(0.0, 1.0);

// Lanczos approximation (g = 7, 9 terms) for the complex log-gamma.
Complex lanczos_lgamma(Complex z) {
    static const double c[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,       -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) {
        // Reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z).
        return std::log(kPi / std::sin(kPi * z)) - lanczos_lgamma(1.0 - z);
    }
    z -= 1.0;
    Complex x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<double>(i));
    const Complex t = z + 7.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

Complex cgamma(Complex z) { return std::exp(lanczos_lgamma(z)); }

struct SDClosedForms {
    Complex mean_p;
    double var_p;
    Complex mean_x;
    Complex mean_T;
    double var_T;
    double mean_t;
    double var_t;
    double product_Tt;
};

SDClosedForms closed_forms(const ScatterConfig& c) {
    const double g = c.pre.gamma, p = c.pre.momentum, dx = c.delta_x();
    const double M = c.mass, hb = c.hbar;
    const double D = p * p + dx * dx * hb * hb * g * g;

    SDClosedForms f;
    f.mean_p = Complex(p, 0.0);
    f.var_p = 0.5 * hb * hb * g;
    f.mean_x = Complex(c.post.center, 0.0);
    f.mean_T = Complex(p * p / (2.0 * M) * (1.0 + hb * hb * g / D),
                       -hb * p * hb * hb * g * g * dx / (M * D));
    f.var_T = 2.0 * hb * hb * g * std::pow(p, 6) * (dx * dx * hb * hb * g * g) /
                  (M * M * D * D * D) +
              hb * hb * g * std::pow(hb * hb * g + 2.0 * p * p, 2) / (8.0 * M * M * D) +
              std::pow(hb, 6) * std::pow(g, 4) * dx * dx * p * p / (2.0 * M * M * D * D);
    f.mean_t = M * dx / p;
    f.var_t = M * M * D / (2.0 * g * std::pow(p, 4));
    f.product_Tt = f.var_T * f.var_t;
    return f;
}

}  // namespace

std::vector<std::string> ScatterConfig::validate() const {
    if (!(pre.gamma > 0.0 && post.gamma > 0.0))
        throw ValidationError("packet widths must be positive");
    if (!(mass > 0.0 && hbar > 0.0)) throw ValidationError("mass and hbar must be positive");
    std::vector<std::string> w;
    if (post.gamma / pre.gamma < 100.0)
        w.push_back("post width ratio gamma_f/gamma below 100; localization regime is weak");
    if (pre.gamma * pre.center * pre.center <= 25.0)
        w.push_back("gamma*x_i^2 <= 25; pre-selected packet is not far from the origin");
    const double reach = 5.0 / std::sqrt(pre.gamma);
    if (std::abs(pre.center) <= reach || std::abs(post.center) <= reach)
        w.push_back("packet centers within 5/sqrt(gamma) of the origin");
    return w;
}

ScatterConfig make_scatter_config(double gamma, double x_i, double p_i, double gamma_f,
                                  double x_f, double mass, double hbar) {
    ScatterConfig c;
    c.pre = {gamma, x_i, p_i, hbar};
    c.post = {gamma_f, x_f, 0.0, hbar};
    c.mass = mass;
    c.hbar = hbar;
    c.free_transmission = true;
    c.validate();
    return c;
}

Complex evolved_amplitude(const ScatterConfig& c, double x, double t) {
    const double g = c.pre.gamma, p = c.pre.momentum, xi = c.pre.center;
    const double M = c.mass, hb = c.hbar;
    const Complex d(M, t * hb * g);  // M + i t hbar gamma

    const Complex pref = std::pow(g * M * M / (kPi * d * d), 0.25);
    const Complex u = kI * (xi - x) - p / (hb * g);
    const Complex expo = -p * p / (2.0 * hb * hb * g) + 0.5 * M * g * u * u / d;

    Complex trans(1.0, 0.0);
    if (!c.free_transmission && c.transmission) {
        const Complex p_arg = (M * p - kI * hb * g * M * (xi - x)) / d;
        trans = c.transmission(p_arg);
    }
    return pref * trans * std::exp(expo);
}

WeakXPT weak_xpT(const ScatterConfig& c, double t) {
    const double g = c.pre.gamma, p = c.pre.momentum, dx = c.delta_x();
    const double M = c.mass, hb = c.hbar;
    const double den = M * M + t * t * hb * hb * g * g;

    WeakXPT w;
    w.x_w = Complex(c.post.center, 0.0);
    w.p_w = Complex((M * M * p + hb * hb * g * g * M * dx * t) / den,
                    hb * M * g * (p * t - M * dx) / den);
    const Complex d(M, t * hb * g);
    const Complex q = kI * p - hb * g * dx;
    w.T_w = 0.5 * (hb * hb * g / d - M * q * q / (d * d));
    return w;
}

LinearSeries coherent_linearity_check(const CoherentState1D& post, double mass,
                                      std::function<Complex(double)> x_w_series) {
    const double g = post.gamma, xf = post.center, pf = post.momentum, hb = post.hbar;
    const Complex a(pf, hb * g * xf);  // p_f + i hbar gamma x_f
    LinearSeries s;
    s.p_w = [=](double t) { return pf + kI * hb * g * (xf - x_w_series(t)); };
    s.T_w = [=, M = mass](double t) {
        const Complex xw = x_w_series(t);
        return hb * hb * g / (2.0 * M) + a * a / (2.0 * M) - kI * hb * g * a / M * xw -
               hb * hb * g * g / (2.0 * M) * xw * xw;
    };
    return s;
}

SDTimeDensity time_density_sd(const ScatterConfig& c) {
    const auto f = closed_forms(c);
    SDTimeDensity d;
    d.mean_t = f.mean_t;
    d.var_t = f.var_t;
    const double inv2v = 1.0 / (2.0 * f.var_t);
    const double norm = std::sqrt(inv2v / kPi);
    d.density = [mean = f.mean_t, inv2v, norm](double t) {
        const double s = t - mean;
        return norm * std::exp(-inv2v * s * s);
    };
    return d;
}

OverlapModel steepest_descent_overlap_model(const ScatterConfig& c) {
    OverlapModel m;
    m.hbar = c.hbar;
    const double xf = c.post.center;
    m.overlap = [c, xf](double t) { return evolved_amplitude(c, xf, t); };
    m.weak_numerators["x"] = [c, xf](double t) {
        return Complex(xf, 0.0) * evolved_amplitude(c, xf, t);
    };
    m.weak_numerators["p"] = [c, xf](double t) {
        return weak_xpT(c, t).p_w * evolved_amplitude(c, xf, t);
    };
    m.weak_numerators["T"] = [c, xf](double t) {
        return weak_xpT(c, t).T_w * evolved_amplitude(c, xf, t);
    };
    if (c.free_transmission) {
        // Free evolution: the energy is purely kinetic, so the overlap
        // derivative follows from the kinetic numerator.
        const double hb = c.hbar;
        m.overlap_dt = [c, xf, hb](double t) {
            return weak_xpT(c, t).T_w * evolved_amplitude(c, xf, t) / (kI * hb);
        };
    }
    return m;
}

OverlapModel gaussian_pair_model(const CoherentState1D& pre, const CoherentState1D& post,
                                 double mass, double hbar) {
    const double g = pre.gamma, xi = pre.center, p = pre.momentum;
    const double gp = post.gamma, xf = post.center, pf = post.momentum;
    const double M = mass, hb = hbar;
    const Complex zc(xi, p / (hb * g));

    struct Core {
        Complex ov, mu, inv2a;
    };
    auto core = [=](double t) -> Core {
        const Complex d(M, t * hb * g);
        const Complex w = 0.5 * M * g / d;
        const Complex aq = w + 0.5 * gp;
        const Complex b = 2.0 * w * zc + gp * xf - kI * pf / hb;
        const Complex c0 = -w * zc * zc - 0.5 * gp * xf * xf + kI * pf * xf / hb;
        const Complex pref = std::pow(g * M * M / (kPi * d * d), 0.25) *
                             std::pow(gp / kPi, 0.25) * std::sqrt(kPi / aq);
        const Complex expo = -p * p / (2.0 * hb * hb * g) + b * b / (4.0 * aq) + c0;
        Core out;
        out.ov = pref * std::exp(expo);
        out.mu = b / (2.0 * aq);
        out.inv2a = 0.5 / aq;
        return out;
    };

    auto p2_num = [=](double t) -> Complex {
        const Core k = core(t);
        const Complex dxf = k.mu - xf;
        return -hb * hb *
               (gp * gp * (dxf * dxf + k.inv2a) + 2.0 * kI * gp * (pf / hb) * dxf -
                pf * pf / (hb * hb) - gp) *
               k.ov;
    };

    OverlapModel m;
    m.hbar = hb;
    m.overlap = [core](double t) { return core(t).ov; };
    m.weak_numerators["x"] = [core](double t) {
        const Core k = core(t);
        return k.mu * k.ov;
    };
    m.weak_numerators["x2"] = [core](double t) {
        const Core k = core(t);
        return (k.mu * k.mu + k.inv2a) * k.ov;
    };
    m.weak_numerators["p"] = [core, gp, xf, pf, hb](double t) {
        const Core k = core(t);
        return (pf + kI * hb * gp * (xf - k.mu)) * k.ov;
    };
    m.weak_numerators["p2"] = p2_num;
    m.weak_numerators["T"] = [p2_num, M](double t) { return p2_num(t) / (2.0 * M); };
    m.overlap_dt = [p2_num, M, hb](double t) { return p2_num(t) / (2.0 * M * kI * hb); };
    return m;
}

ScatterReport scatter_report(const ScatterConfig& c, const QuadratureSpec& spec) {
    if (c.post.momentum != 0.0)
        throw ValidationError("post-selection momentum must be zero for the report");
    ScatterReport r;
    r.warnings = c.validate();

    const SDClosedForms f = closed_forms(c);
    r.sd_mean_p = f.mean_p;
    r.sd_var_p = f.var_p;
    r.sd_mean_x = f.mean_x;
    r.sd_mean_T = f.mean_T;
    r.sd_var_T = f.var_T;
    r.sd_mean_t = f.mean_t;
    r.sd_var_t = f.var_t;
    r.sd_product_Tt = f.product_Tt;

    const OverlapModel m = steepest_descent_overlap_model(c);
    const TimeSeriesMoments mom = time_average(m, {"x", "p", "T", kTimeOp}, spec);
    r.mean_p = mom.mean("p");
    r.var_p = mom.abs2("p");
    r.mean_x = mom.mean("x");
    r.mean_T = mom.mean("T");
    r.var_T = mom.abs2("T");
    r.mean_t = mom.mean_time;
    r.var_t = mom.abs2(kTimeOp);
    r.product_Tt = r.var_T * r.var_t;

    auto dev = [](Complex a, Complex b) {
        const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
        return std::abs(a - b) / scale;
    };
    r.rel_dev["mean_p"] = dev(r.mean_p, f.mean_p);
    r.rel_dev["var_p"] = dev(r.var_p, f.var_p);
    r.rel_dev["mean_x"] = dev(r.mean_x, f.mean_x);
    r.rel_dev["mean_T"] = dev(r.mean_T, f.mean_T);
    r.rel_dev["var_T"] = dev(r.var_T, f.var_T);
    r.rel_dev["mean_t"] = dev(r.mean_t, f.mean_t);
    r.rel_dev["var_t"] = dev(r.var_t, f.var_t);
    r.rel_dev["product_Tt"] = dev(r.product_Tt, f.product_Tt);

    for (const auto& [name, d] : r.rel_dev) {
        if (d > 0.02)
            r.warnings.push_back(name + " closed form deviates " + std::to_string(d * 100.0) +
                                 "% from quadrature");
    }
    // The kinetic-energy closed forms omit the drift term |dT_w/dt|^2 var_t,
    // so only the moments they capture at leading order gate a hard error.
    for (const char* name : {"mean_p", "var_p", "mean_x", "mean_T", "mean_t", "var_t"}) {
        if (r.rel_dev.at(name) > 0.05)
            throw SteepestDescentMismatch(std::string(name) +
                                          " deviates more than 5% from its closed form");
    }
    return r;
}

std::function<Complex(Complex)> eckart_transmission(double v0, double width, double mass,
                                                    double hbar) {
    if (!(v0 > 0.0 && width > 0.0 && mass > 0.0 && hbar > 0.0))
        throw ValidationError("barrier parameters must be positive");
    const double s = 2.0 * mass * v0 * width * width / (hbar * hbar);
    const Complex rho = std::sqrt(Complex(s - 0.25, 0.0));
    return [rho, width, hbar](Complex p) -> Complex {
        const Complex u = p * width / hbar;
        return cgamma(0.5 + kI * rho - kI * u) * cgamma(0.5 - kI * rho - kI * u) /
               (cgamma(-kI * u) * cgamma(1.0 - kI * u));
    };
}

double eckart_transmission_probability(double v0, double width, double p, double mass,
                                       double hbar) {
    const double s = 2.0 * mass * v0 * width * width / (hbar * hbar);
    const double u = p * width / hbar;
    const double num = std::cosh(2.0 * kPi * u) - 1.0;
    double den;
    if (s >= 0.25) {
        den = std::cosh(2.0 * kPi * u) + std::cosh(2.0 * kPi * std::sqrt(s - 0.25));
    } else {
        den = std::cosh(2.0 * kPi * u) + std::cos(2.0 * kPi * std::sqrt(0.25 - s));
    }
    return num / den;
}

}  // namespace weakflux
