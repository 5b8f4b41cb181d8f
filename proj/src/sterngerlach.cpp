#include "weakflux/sterngerlach.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace weakflux {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Complex kI(0.0, 1.0);
constexpr double kNearSingular = 1e-6;
constexpr double kOrthogonal = 1e-12;

double density_exponent(const SGConfig& c, double t) {
    const double dy = c.y_s - c.k_y * t;
    const double dz = c.z0 - c.alpha * t;
    return dy * dy / (1.0 + t * t) + dz * dz / (2.0 * (1.0 + 0.25 * t * t));
}

Complex derivative(const std::function<Complex(double)>& g, double t) {
    const double h = 1e-4;
    auto central = [&](double hh) { return (g(t + hh) - g(t - hh)) / (2.0 * hh); };
    const Complex d1 = central(h);
    const Complex d2 = central(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

double SGBeam::Y(double t) const {
    return config.alpha * config.z0 * t / (1.0 + 0.25 * t * t);
}

double SGBeam::eta(double t) const {
    return config.alpha * config.z0 * (1.0 + 0.75 * t * t) / (1.0 + 0.25 * t * t);
}

Complex SGBeam::R(double t) const { return std::exp(Complex(-Y(t), eta(t))); }

Complex SGBeam::spinor_denominator(double t) const {
    return std::conj(config.post.up) * config.pre.up +
           std::conj(config.post.down) * config.pre.down * R(t);
}

SGBeam make_beam(const SGConfig& cfg) {
    SGBeam b;
    b.config = cfg;
    b.t_bar = cfg.y_s / cfg.k_y;
    const double t = b.t_bar;

    const double c1 = cfg.k_y * cfg.y_s / (t * (1.0 + t * t)) +
                      cfg.alpha * cfg.alpha / (2.0 * (1.0 + 0.25 * t * t));
    const double c2 = (cfg.k_y * cfg.k_y + cfg.y_s * cfg.y_s) / ((1.0 + t * t) * (1.0 + t * t)) +
                      cfg.alpha * cfg.alpha / (2.0 * (1.0 + 0.25 * t * t));
    if (std::abs(c1 - c2) > 1e-12 * std::max(1.0, c1))
        throw Error("curvature forms disagree at the exponent peak");
    b.curvature = c1;

    // When the screen sits on the deflected-beam center the exponent peak
    // must land exactly at y_s/k_y.
    if (std::abs(cfg.z0 - cfg.alpha * t) <= 1e-12 * std::max(1.0, std::abs(cfg.z0))) {
        const double found =
            find_peak([&](double tt) { return density_exponent(cfg, tt); }, 0.2 * t, 4.0 * t);
        if (std::abs(found - t) > 1e-8 * std::max(1.0, t))
            throw Error("exponent peak does not match y_s/k_y");
    }
    return b;
}

std::pair<Complex, Complex> phi_pm(const SGBeam& beam, double x, double y, double z, double t) {
    const double a = beam.config.alpha, ky = beam.config.k_y;
    const Complex one_it(1.0, t);
    const Complex pref = std::pow(1.0 / (one_it * std::sqrt(kPi)), 1.5);
    const Complex ym(y, -ky);
    const double zc = z - 0.5 * a * t;
    const Complex expo = -kI * (a * a * t / 6.0) -
                         (x * x + ym * ym + zc * zc) / (2.0 * one_it) - 0.5 * ky * ky -
                         kI * (a * z);
    const Complex plus = pref * std::exp(expo);
    const Complex minus = plus * std::exp(2.0 * kI * a * z - a * z * t / one_it);
    return {plus, minus};
}

double beam_overlap(const SGBeam& beam, double t) {
    const double a = beam.config.alpha;
    return std::exp(-a * a * (1.0 + 2.25 * t * t));
}

SpinTriple strong_values(const SGBeam& beam, double t) {
    const double o = beam_overlap(beam, t);
    const Complex ai = beam.config.pre.up, bi = beam.config.pre.down;
    SpinTriple s;
    s.sx = o * (std::conj(bi) * ai + std::conj(ai) * bi);
    s.sy = kI * o * (std::conj(bi) * ai - std::conj(ai) * bi);
    s.sz = Complex(std::norm(ai) - std::norm(bi), 0.0);
    return s;
}

double strong_uncertainty_gap(const SGBeam& beam, double t) {
    const Complex ai = beam.config.pre.up, bi = beam.config.pre.down;
    const double a2 = std::norm(ai), b2 = std::norm(bi);
    const double o = beam_overlap(beam, t);
    const double ab = std::arg(ai) - std::arg(bi);
    const double c = std::cos(ab), s = std::sin(ab);

    const double vx = 1.0 - 4.0 * a2 * b2 * o * o * c * c;
    const double vy = 1.0 - 4.0 * a2 * b2 * o * o * s * s;
    const double direct = vx * vy - (a2 - b2) * (a2 - b2);

    const double s2ab = std::sin(2.0 * ab);
    const double closed =
        4.0 * a2 * b2 * (1.0 - o * o + a2 * b2 * std::pow(o, 4) * s2ab * s2ab);
    if (std::abs(direct - closed) > 1e-12 * std::max(1.0, std::abs(direct)))
        throw Error("strong-value gap routes disagree");
    return direct;
}

Complex postselect_overlap(const SGBeam& beam, double t) {
    const double a = beam.config.alpha, ky = beam.config.k_y, ys = beam.config.y_s;
    const double z0 = beam.config.z0;
    const Complex one_it(1.0, t), two_it(2.0, t);
    const Complex pref = 2.0 / (std::sqrt(one_it) * two_it);
    const Complex ym(ys, -ky);
    const Complex zc(z0 - 0.5 * a * t, -a);
    const Complex expo = -kI * (a * a * t / 6.0) - ym * ym / (2.0 * one_it) -
                         zc * zc / (2.0 * two_it) - 0.5 * (ky * ky + a * a) - kI * (a * z0);
    return pref * std::exp(expo);
}

double postselect_density_plus(const SGBeam& beam, double t) {
    const SGConfig& c = beam.config;
    const double pref = 1.0 / (std::sqrt(1.0 + t * t) * (1.0 + 0.25 * t * t));
    return pref * std::exp(-density_exponent(c, t) - 0.5 * c.alpha * c.alpha);
}

SpinTriple weak_spins(const SGBeam& beam, double t) {
    const Complex R = beam.R(t);
    const Complex afc = std::conj(beam.config.post.up);
    const Complex bfc = std::conj(beam.config.post.down);
    const Complex ai = beam.config.pre.up, bi = beam.config.pre.down;
    const Complex den = afc * ai + bfc * bi * R;
    if (std::abs(den) <= kOrthogonal)
        throw NearOrthogonalPostSelection("post-selection orthogonal to the evolved state");
    SpinTriple s;
    s.sx = (bfc * ai + afc * bi * R) / den;
    s.sy = kI * (bfc * ai - afc * bi * R) / den;
    s.sz = (afc * ai - bfc * bi * R) / den;
    return s;
}

SpinTriple weak_spins_phase_form(const SGBeam& beam, double t) {
    const double Y = beam.Y(t), eta = beam.eta(t);
    const double chi_i = beam.config.chi_i, chi_f = beam.config.chi_f;
    const double th = chi_i - chi_f + eta;
    const double den = std::cosh(Y) + std::cos(th);
    if (std::abs(den) <= kOrthogonal)
        throw NearOrthogonalPostSelection("post-selection orthogonal to the evolved state");
    SpinTriple s;
    s.sx = Complex(std::cosh(Y) * std::cos(chi_f) + std::cos(chi_i + eta),
                   -std::sinh(Y) * std::sin(chi_f)) /
           den;
    s.sy = Complex(std::cosh(Y) * std::sin(chi_f) + std::sin(chi_i + eta),
                   std::sinh(Y) * std::cos(chi_f)) /
           den;
    s.sz = Complex(std::sinh(Y), -std::sin(th)) / den;
    return s;
}

SpinLinearity spin_linearity_coefficients(const SpinorAmplitudes& post) {
    const Complex afc = std::conj(post.up), bfc = std::conj(post.down);
    if (std::abs(afc) < kOrthogonal || std::abs(bfc) < kOrthogonal)
        throw DegeneratePostSpinor("post spinor has a vanishing component");
    const Complex sum2 = afc * afc + bfc * bfc;
    if (std::abs(sum2) < kOrthogonal)
        throw DegeneratePostSpinor("post spinor squares cancel");
    SpinLinearity l;
    l.c_x = 0.5 * (bfc / afc - afc / bfc);
    l.c_y = 0.5 * kI * (afc / bfc + bfc / afc);
    l.c_xy = kI * (afc * afc - bfc * bfc) / sum2;
    return l;
}

SpinCommutators spin_commutators(const TimeSeriesMoments& moments,
                                 const SpinorAmplitudes& post) {
    const double a2 = std::norm(post.up), b2 = std::norm(post.down);
    if (a2 < kOrthogonal || b2 < kOrthogonal)
        throw DegeneratePostSpinor("post spinor has a vanishing component");

    SpinCommutators out;
    const auto [comm, anti] = commutator_anticommutator_means(moments, "sy", "sx");
    out.commutator = comm;
    out.anticommutator = anti;
    out.var_product = moments.abs2("sx") * moments.abs2("sy");

    const double vz = moments.abs2("sz");
    const Complex af = post.up, bf = post.down;
    out.commutator_closed = 0.5 * kI * vz * (b2 - a2) / (a2 * b2);
    out.anticommutator_closed = 0.5 * kI * vz *
                                (bf * bf * std::conj(af) * std::conj(af) -
                                 af * af * std::conj(bf) * std::conj(bf)) /
                                (a2 * b2);
    const Complex f4 = bf * bf * bf * bf - af * af * af * af;
    out.var_product_closed = std::norm(f4) / (16.0 * a2 * a2 * b2 * b2) * vz * vz;

    auto close = [](Complex x, Complex y, double floor) {
        return std::abs(x - y) <= 1e-8 * std::max({std::abs(x), std::abs(y), floor});
    };
    const double floor = std::max(vz * vz, 1e-30);
    if (!close(out.commutator, out.commutator_closed, vz) ||
        !close(out.anticommutator, out.anticommutator_closed, vz) ||
        !close(out.var_product, out.var_product_closed, floor))
        throw Error("spin moment routes disagree beyond tolerance");
    return out;
}

TimeSpinBound time_spin_uncertainty(const TimeSeriesMoments& moments,
                                    const std::string& spin_op) {
    TimeSpinBound b;
    b.lhs = moments.abs2(spin_op) * moments.abs2(kTimeOp);
    const Complex cts = moments.covariance(kTimeOp, spin_op);
    b.rhs = std::norm(cts);
    const Complex t_s_mean =
        std::conj(cts) + moments.mean_time * moments.mean(spin_op);
    b.rhs_literal = std::norm(t_s_mean);
    if (b.lhs < b.rhs - 1e-8 * std::max(b.lhs, b.rhs))
        throw Error("time-spin uncertainty bound violated");
    return b;
}

OverlapModel sg_overlap_model(const SGBeam& beam) {
    const SGBeam b = beam;
    const Complex afc = std::conj(b.config.post.up);
    const Complex bfc = std::conj(b.config.post.down);
    const Complex ai = b.config.pre.up, bi = b.config.pre.down;
    const double wa = std::norm(ai), wb = std::norm(bi);

    OverlapModel m;
    m.overlap = [b, afc, bfc, ai, bi](double t) {
        return (afc * ai + bfc * bi * b.R(t)) * postselect_overlap(b, t);
    };
    m.density_numerator = [b, wa, wb](double t) {
        return postselect_density_plus(b, t) * (wa + wb * std::exp(-2.0 * b.Y(t)));
    };
    m.weak_numerators["sx"] = [b, afc, bfc, ai, bi](double t) {
        return (bfc * ai + afc * bi * b.R(t)) * postselect_overlap(b, t);
    };
    m.weak_numerators["sy"] = [b, afc, bfc, ai, bi](double t) {
        return kI * (bfc * ai - afc * bi * b.R(t)) * postselect_overlap(b, t);
    };
    m.weak_numerators["sz"] = [b, afc, bfc, ai, bi](double t) {
        return (afc * ai - bfc * bi * b.R(t)) * postselect_overlap(b, t);
    };
    return m;
}

TransitionDensity transition_density(const SGBeam& beam, const QuadratureSpec& spec) {
    const OverlapModel m = sg_overlap_model(beam);
    const TimeDensity d = time_density(m, spec);

    TransitionDensity out;
    out.exact = d.density;
    out.normalization = d.normalization;
    out.t_bar = beam.t_bar;
    out.curvature = beam.curvature;

    const SGConfig& c = beam.config;
    const double t = beam.t_bar;
    const double wa = std::norm(c.pre.up), wb = std::norm(c.pre.down);
    const double k2y2 = c.k_y * c.k_y + c.y_s * c.y_s;
    const double denom_s = 2.0 * k2y2 * (1.0 + 0.25 * t * t) +
                           c.alpha * c.alpha * (1.0 + t * t) * (1.0 + t * t);
    const double dz = c.z0 - c.alpha * t;
    const double lead = std::sqrt(2.0 * kPi * (1.0 + t * t)) *
                        std::exp(-0.5 * c.alpha * c.alpha -
                                 dz * dz / (2.0 * (1.0 + 0.25 * t * t))) /
                        (std::sqrt(1.0 + 0.25 * t * t) * std::sqrt(denom_s));
    const double bracket =
        wa + wb * std::exp(-4.0 * c.alpha * c.alpha * t * t * k2y2 / denom_s);
    out.normalization_sd = lead * bracket;

    const double cv = beam.curvature;
    out.sd = [cv, t](double tt) {
        const double s = tt - t;
        return std::sqrt(cv / kPi) * std::exp(-cv * s * s);
    };
    return out;
}

SpinTimeAverages time_averaged_spins(const SGBeam& beam, const QuadratureSpec& spec,
                                     const DensityInfo* shared) {
    const OverlapModel m = sg_overlap_model(beam);
    const DensityInfo info = shared ? *shared : density_info(m, spec);
    const TimeSeriesMoments mom =
        time_average(m, {"sx", "sy", "sz"}, spec, /*full_covariances=*/false, info);

    SpinTimeAverages out;
    out.means = {mom.mean("sx"), mom.mean("sy"), mom.mean("sz")};
    out.sigmas = {std::sqrt(mom.abs2("sx")), std::sqrt(mom.abs2("sy")),
                  std::sqrt(mom.abs2("sz"))};

    out.near_singular = std::abs(beam.spinor_denominator(beam.t_bar)) < kNearSingular;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        std::function<Complex(double)> comps[3] = {
            [&beam](double t) { return weak_spins(beam, t).sx; },
            [&beam](double t) { return weak_spins(beam, t).sy; },
            [&beam](double t) { return weak_spins(beam, t).sz; },
        };
        Complex sd[3];
        double sds[3];
        for (int j = 0; j < 3; ++j) {
            const SaddleEstimate est = saddle_moment(comps[j], beam.curvature, beam.t_bar);
            sd[j] = est.value();
            sds[j] = std::abs(derivative(comps[j], beam.t_bar)) /
                     std::sqrt(2.0 * beam.curvature);
        }
        out.sd_means = {sd[0], sd[1], sd[2]};
        out.sd_sigmas = {sds[0], sds[1], sds[2]};
    } catch (const NearOrthogonalPostSelection&) {
        out.near_singular = true;
        out.sd_means = {Complex(nan, nan), Complex(nan, nan), Complex(nan, nan)};
        out.sd_sigmas = {nan, nan, nan};
    }
    return out;
}

double max_anomalous_sz(const SGBeam& beam) {
    if (!(beam.config.alpha > 0.0))
        throw ZeroField("anomalous bound diverges without a field");
    const double y = beam.Y(beam.t_bar);
    if (!(y > 0.0)) throw ZeroField("beam attenuation vanishes; bound diverges");
    return 1.0 / std::tanh(0.5 * y);
}

std::vector<PhaseGridPoint> sweep_phase_grid(const SGConfig& base, int n,
                                             const QuadratureSpec& spec, int threads) {
    if (n < 1) throw ValidationError("grid size must be positive");
    const SGBeam base_beam = make_beam(base);
    // The arrival-time density carries no phase dependence: share its
    // normalization across the whole grid.
    const DensityInfo info = density_info(sg_overlap_model(base_beam), spec);

    std::vector<PhaseGridPoint> grid(static_cast<std::size_t>(n) * n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        try {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= grid.size()) return;
                const int i = static_cast<int>(k) / n;
                const int j = static_cast<int>(k) % n;
                SGParams p;
                p.alpha = base.alpha;
                p.k_y = base.k_y;
                p.y_s = base.y_s;
                p.y_i = base.y_i;
                p.z0 = base.z0;
                p.chi_i = 2.0 * kPi * i / n;
                p.chi_f = 2.0 * kPi * j / n;
                const SGBeam beam = make_beam(make_sg_config(p));
                grid[k].chi_i = p.chi_i;
                grid[k].chi_f = p.chi_f;
                grid[k].avg = time_averaged_spins(beam, spec, &info);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(grid.size());
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned nthreads = threads > 0 ? static_cast<unsigned>(threads) : hw;
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return grid;
}

}  // namespace weakflux
