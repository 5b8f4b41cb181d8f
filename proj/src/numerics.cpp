#include "weakflux/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace weakflux {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
// Even-indexed abscissae carry the embedded Gauss rule.
constexpr int kPanelPoints = 8;
constexpr double kAbscissa[kPanelPoints] = {
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
};
constexpr double kKronrodWeight[kPanelPoints] = {
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
};
constexpr double kGaussWeight[4] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
};

struct Panel {
    double a = 0.0;
    double b = 0.0;
    Complex value;
    double err = 0.0;
};

bool finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

Panel evaluate_panel(const std::function<Complex(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Complex fc = f(mid);
    if (!finite(fc)) throw NonFinite("integrand not finite at t=" + std::to_string(mid));
    Complex k15 = kKronrodWeight[0] * fc;
    Complex g7 = kGaussWeight[0] * fc;
    for (int i = 1; i < kPanelPoints; ++i) {
        const double dx = half * kAbscissa[i];
        Complex fp = f(mid + dx);
        Complex fm = f(mid - dx);
        if (!finite(fp)) throw NonFinite("integrand not finite at t=" + std::to_string(mid + dx));
        if (!finite(fm)) throw NonFinite("integrand not finite at t=" + std::to_string(mid - dx));
        const Complex s = fp + fm;
        k15 += kKronrodWeight[i] * s;
        if (i % 2 == 0) g7 += kGaussWeight[i / 2] * s;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = half * k15;
    p.err = std::abs(half * (k15 - g7));
    return p;
}

// Geometric scan for the truncation point: expand by 1.5x until the sampled
// magnitude stays below truncation_ratio times the running peak.
std::vector<double> truncation_breakpoints(const std::function<Complex(double)>& f,
                                           const QuadratureSpec& spec, bool* all_zero) {
    constexpr int kSamplesPerSegment = 8;
    constexpr double kGrowth = 1.5;
    constexpr double kMaxCut = 1e12;
    constexpr int kLookahead = 2;

    std::vector<double> breaks = {0.0, 2.5, 5.0, 7.5, 10.0};
    double peak = 0.0;
    for (int i = 0; i <= 4 * kSamplesPerSegment; ++i) {
        const double t = 10.0 * i / (4.0 * kSamplesPerSegment);
        Complex v = f(t);
        if (!finite(v)) throw NonFinite("integrand not finite at t=" + std::to_string(t));
        peak = std::max(peak, std::abs(v));
    }

    double lo = 10.0;
    int quiet = 0;
    while (breaks.back() < kMaxCut) {
        const double hi = lo * kGrowth;
        double seg_max = 0.0;
        for (int i = 1; i <= kSamplesPerSegment; ++i) {
            const double t = lo + (hi - lo) * i / kSamplesPerSegment;
            Complex v = f(t);
            if (!finite(v)) throw NonFinite("integrand not finite at t=" + std::to_string(t));
            seg_max = std::max(seg_max, std::abs(v));
        }
        breaks.push_back(hi);
        peak = std::max(peak, seg_max);
        if (peak > 0.0 && seg_max < spec.truncation_ratio * peak) {
            if (++quiet > kLookahead) break;
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    *all_zero = (peak == 0.0);
    return breaks;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");
    if (!(abs_tol > 0.0)) throw ValidationError("abs_tol must be positive");
    if (!(truncation_ratio > 0.0 && truncation_ratio < 1.0))
        throw ValidationError("truncation_ratio must lie in (0,1)");
    if (max_subdivisions < 1) throw ValidationError("max_subdivisions must be >= 1");
}

Complex integrate_semi_infinite(const std::function<Complex(double)>& f,
                                const QuadratureSpec& spec) {
    spec.validate();

    bool all_zero = false;
    const std::vector<double> breaks = truncation_breakpoints(f, spec, &all_zero);
    if (all_zero) return Complex(0.0, 0.0);

    std::vector<Panel> panels;
    panels.reserve(breaks.size() + 64);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        panels.push_back(evaluate_panel(f, breaks[i], breaks[i + 1]));

    for (;;) {
        Complex total(0.0, 0.0);
        double total_err = 0.0;
        for (const Panel& p : panels) {
            total += p.value;
            total_err += p.err;
        }
        if (total_err <= std::max(spec.rel_tol * std::abs(total), spec.abs_tol)) break;
        if (static_cast<int>(panels.size()) >= spec.max_subdivisions)
            throw NonConvergent("quadrature subdivision budget exhausted");

        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].err > panels[worst].err) worst = i;

        const double a = panels[worst].a;
        const double b = panels[worst].b;
        const double mid = 0.5 * (a + b);
        panels[worst] = evaluate_panel(f, a, mid);
        panels.insert(panels.begin() + static_cast<std::ptrdiff_t>(worst) + 1,
                      evaluate_panel(f, mid, b));
    }

    // Panels stay sorted by left endpoint; summing in that order keeps the
    // result independent of the subdivision history.
    Complex total(0.0, 0.0);
    for (const Panel& p : panels) total += p.value;
    return total;
}

double find_peak(const std::function<double(double)>& rho, double lo, double hi) {
    if (!(hi > lo)) throw ValidationError("find_peak requires hi > lo");
    const double width = hi - lo;
    const double tol = 1e-10 * width;
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);

    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = rho(x1);
    double f2 = rho(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = rho(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = rho(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    if (xm - lo < 8.0 * tol || hi - xm < 8.0 * tol)
        throw NoInteriorMinimum("minimum lies at a bracket endpoint");
    return xm;
}

SaddleEstimate saddle_moment(const std::function<Complex(double)>& g,
                             double rho_curvature, double t_bar) {
    if (!(rho_curvature > 0.0))
        throw NonPositiveCurvature("saddle_moment requires positive curvature");
    const double h = 1e-4;
    const Complex g0 = g(t_bar);
    auto second = [&](double hh) {
        return (g(t_bar + hh) - 2.0 * g0 + g(t_bar - hh)) / (hh * hh);
    };
    const Complex d2h = second(h);
    const Complex d2h2 = second(0.5 * h);
    const Complex gpp = (4.0 * d2h2 - d2h) / 3.0;

    SaddleEstimate est;
    est.peak_time = t_bar;
    est.curvature = rho_curvature;
    est.leading_value = g0;
    est.correction = 0.25 * gpp / rho_curvature;
    return est;
}

}  // namespace weakflux
