#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "weakflux/cliconfig.hpp"
#include "weakflux/timeenergy.hpp"

namespace weakflux {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Complex kI(0.0, 1.0);

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(int v) { return std::to_string(v); }

void write_artifact(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file '" + path + "'");
    out << payload;
    if (!out) throw IoError("failed writing output file '" + path + "'");
}

double resolved_t_max(const RunConfig& cfg) {
    if (cfg.grid.t_max >= 0.0) return cfg.grid.t_max;
    return 2.0 * cfg.sg.y_s / cfg.sg.k_y;
}

// Spin-summed screen density as a function of the post-selection center.
double density_sum_at(const SGConfig& c, double z0, double t) {
    const double pref = 1.0 / (std::sqrt(1.0 + t * t) * (1.0 + 0.25 * t * t));
    const double wz = 2.0 * (1.0 + 0.25 * t * t);
    const double dy = c.y_s - c.k_y * t;
    const double base =
        pref * std::exp(-dy * dy / (1.0 + t * t) - 0.5 * c.alpha * c.alpha);
    const double up = std::exp(-(z0 - c.alpha * t) * (z0 - c.alpha * t) / wz);
    const double down = std::exp(-(z0 + c.alpha * t) * (z0 + c.alpha * t) / wz);
    return base * (up + down);
}

std::string run_sg_density(const RunConfig& cfg) {
    const double t_max = resolved_t_max(cfg);
    double z0_min = cfg.grid.z0_min, z0_max = cfg.grid.z0_max;
    if (cfg.grid.z0_auto) {
        const double reach = cfg.sg.alpha * cfg.sg.y_s / cfg.sg.k_y + 4.0;
        z0_min = -reach;
        z0_max = reach;
    }
    std::string out = "z0,t,density_sum\n";
    for (int i = 0; i < cfg.grid.n_z0; ++i) {
        const double z0 = z0_min + (z0_max - z0_min) * i / (cfg.grid.n_z0 - 1);
        for (int j = 0; j < cfg.grid.n_t; ++j) {
            const double t = cfg.grid.t_min + (t_max - cfg.grid.t_min) * j / (cfg.grid.n_t - 1);
            out += fmt(z0) + "," + fmt(t) + "," + fmt(density_sum_at(cfg.sg, z0, t)) + "\n";
        }
    }
    return out;
}

std::string run_sg_pt(const RunConfig& cfg) {
    const SGBeam beam = make_beam(cfg.sg);
    const TransitionDensity td = transition_density(beam, cfg.quad);
    const double t_max = resolved_t_max(cfg);
    std::string out = "t,p_exact,p_sd\n";
    for (int j = 0; j < cfg.grid.n_t; ++j) {
        const double t = cfg.grid.t_min + (t_max - cfg.grid.t_min) * j / (cfg.grid.n_t - 1);
        out += fmt(t) + "," + fmt(td.exact(t)) + "," + fmt(td.sd(t)) + "\n";
    }
    return out;
}

std::string run_sg_phase_grid(const RunConfig& cfg) {
    const auto grid = sweep_phase_grid(cfg.sg, cfg.grid.n_chi, cfg.quad, cfg.threads);
    std::string out =
        "chi_i,chi_f,abs_sx,abs_sy,abs_sz,sigma_x,sigma_y,sigma_z,"
        "ratio_x,ratio_y,ratio_z,flag_near_singular\n";
    for (const PhaseGridPoint& p : grid) {
        const double abs_s[3] = {std::abs(p.avg.means.sx), std::abs(p.avg.means.sy),
                                 std::abs(p.avg.means.sz)};
        out += fmt(p.chi_i) + "," + fmt(p.chi_f);
        for (double v : abs_s) out += "," + fmt(v);
        for (double v : p.avg.sigmas) out += "," + fmt(v);
        for (int j = 0; j < 3; ++j) out += "," + fmt(p.avg.sigmas[j] / abs_s[j]);
        out += std::string(",") + (p.avg.near_singular ? "1" : "0") + "\n";
    }
    return out;
}

// Parallel map over grid indices with deterministic output placement.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned nthreads = threads > 0 ? static_cast<unsigned>(threads) : hw;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        try {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= count) return;
                fn(k);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(count);
        }
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
}

std::string run_sg_max(const RunConfig& cfg) {
    const SGBeam base_beam = make_beam(cfg.sg);
    const double bound = max_anomalous_sz(base_beam);
    const DensityInfo info = density_info(sg_overlap_model(base_beam), cfg.quad);

    const int n = cfg.grid.n_chi;
    std::vector<double> abs_sz(static_cast<std::size_t>(n) * n);
    parallel_for(abs_sz.size(), cfg.threads, [&](std::size_t k) {
        SGParams p;
        p.alpha = cfg.sg.alpha;
        p.k_y = cfg.sg.k_y;
        p.y_s = cfg.sg.y_s;
        p.y_i = cfg.sg.y_i;
        p.z0 = cfg.sg.z0;
        p.chi_i = 2.0 * kPi * (static_cast<int>(k) / n) / n;
        p.chi_f = 2.0 * kPi * (static_cast<int>(k) % n) / n;
        const SGBeam beam = make_beam(make_sg_config(p));
        const OverlapModel m = sg_overlap_model(beam);
        const TimeSeriesMoments mom =
            time_average(m, {"sz"}, cfg.quad, /*full_covariances=*/false, info);
        abs_sz[k] = std::abs(mom.mean("sz"));
    });
    double grid_max = 0.0;
    for (double v : abs_sz) grid_max = std::max(grid_max, v);

    std::string out = "alpha,coth_bound,grid_max,rel_diff\n";
    out += fmt(cfg.sg.alpha) + "," + fmt(bound) + "," + fmt(grid_max) + "," +
           fmt(std::abs(grid_max - bound) / bound) + "\n";
    return out;
}

std::string run_scatter_report(const RunConfig& cfg) {
    const ScatterReport r = scatter_report(cfg.scatter, cfg.quad);
    std::string out = "key,value\n";
    auto row = [&](const char* key, double v) { out += std::string(key) + "," + fmt(v) + "\n"; };
    row("mean_p_re", r.mean_p.real());
    row("mean_p_im", r.mean_p.imag());
    row("var_p", r.var_p);
    row("mean_x_re", r.mean_x.real());
    row("mean_x_im", r.mean_x.imag());
    row("mean_T_re", r.mean_T.real());
    row("mean_T_im", r.mean_T.imag());
    row("var_T", r.var_T);
    row("mean_t", r.mean_t);
    row("var_t", r.var_t);
    row("product_Tt", r.product_Tt);
    row("sd_mean_p_re", r.sd_mean_p.real());
    row("sd_mean_p_im", r.sd_mean_p.imag());
    row("sd_var_p", r.sd_var_p);
    row("sd_mean_x_re", r.sd_mean_x.real());
    row("sd_mean_x_im", r.sd_mean_x.imag());
    row("sd_mean_T_re", r.sd_mean_T.real());
    row("sd_mean_T_im", r.sd_mean_T.imag());
    row("sd_var_T", r.sd_var_T);
    row("sd_mean_t", r.sd_mean_t);
    row("sd_var_t", r.sd_var_t);
    row("sd_product_Tt", r.sd_product_Tt);
    for (const auto& [name, dev] : r.rel_dev) row(("dev_" + name).c_str(), dev);
    return out;
}

std::string run_te_report(const RunConfig& cfg) {
    const OverlapModel m = steepest_descent_overlap_model(cfg.scatter);
    const TimeEnergyReport r = time_energy_uncertainty_report(m, cfg.quad);
    std::string out = "key,value\n";
    auto row = [&](const char* key, double v) { out += std::string(key) + "," + fmt(v) + "\n"; };
    row("mean_time", r.mean_time);
    row("mean_energy_re", r.mean_energy.real());
    row("mean_energy_im", r.mean_energy.imag());
    row("initial_overlap_sq", r.initial_overlap_sq);
    row("normalization", r.normalization);
    row("commutator_re", r.commutator_mean.real());
    row("commutator_im", r.commutator_mean.imag());
    row("var_time", r.var_time);
    row("var_energy", r.var_energy);
    row("product_lhs", r.product_lhs);
    row("bound_rhs", r.bound_rhs);
    return out;
}

}  // namespace

UncCheckReport unc_check(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * std::ldexp(static_cast<double>(rng() >> 11), -53);
    };

    UncCheckReport report;
    report.cases = cfg.cases;
    std::string csv = "case,family,metric,value,status\n";

    auto emit = [&](int idx, const char* family, const char* metric, double value, bool pass) {
        csv += fmt(idx) + "," + family + "," + metric + "," + fmt(value) + "," +
               (pass ? "pass" : "fail") + "\n";
        ++report.checks;
        if (!pass) ++report.failures;
    };

    for (int idx = 0; idx < cfg.cases; ++idx) {
        // --- free scattering with a finite-width Gaussian post-selection ---
        const double gamma = uniform(0.005, 0.02);
        const double p_i = uniform(0.5, 2.0);
        const double x_i = -uniform(40.0, 80.0);
        const double gamma_f = uniform(0.5, 2.0);
        const double x_f = uniform(0.0, 20.0);
        const double p_f = uniform(-0.5, 0.5);

        CoherentState1D pre{gamma, x_i, p_i, 1.0};
        CoherentState1D post{gamma_f, x_f, p_f, 1.0};
        const OverlapModel m = gaussian_pair_model(pre, post);
        const TimeSeriesMoments mom = time_average(m, {"x", "p", "T", kTimeOp}, cfg.quad);

        {
            const double scale = std::max(mom.abs2("x") * mom.abs2("p"), 1e-300);
            const double gap = uncertainty_gap(mom, "x", "p") / scale;
            emit(idx, "scatter", "gap_xp_rel", std::abs(gap), std::abs(gap) <= 1e-8);

            const double scale_xt = std::max(mom.abs2("x") * mom.abs2("T"), 1e-300);
            const double margin = uncertainty_gap(mom, "x", "T") / scale_xt;
            emit(idx, "scatter", "gap_xT_margin", margin, margin >= -1e-8);
        }
        {
            // Free motion: the kinetic numerator doubles as the energy one.
            const Complex lhs =
                mom.covariance(kTimeOp, "T") - mom.covariance("T", kTimeOp);
            const double ov0sq = std::norm(m.overlap(0.0));
            const double ratio = mom.mean_time * ov0sq / mom.normalization;
            const Complex closed = kI * (1.0 - ratio);
            const double dev = std::abs(lhs - closed) / (1.0 + ratio);
            emit(idx, "scatter", "te_identity_rel", dev, dev <= 1e-6);

            const double lhs_prod = mom.abs2(kTimeOp) * mom.abs2("T");
            const double rhs = 0.25 * (1.0 - ratio) * (1.0 - ratio);
            const double margin = (lhs_prod - rhs) / std::max({lhs_prod, rhs, 1e-300});
            emit(idx, "scatter", "te_bound_margin", margin, margin >= -1e-8);
        }

        // --- Stern-Gerlach with random field and phases ---
        SGParams p;
        p.alpha = uniform(0.3, 3.0);
        p.k_y = uniform(8.0, 12.0);
        p.y_s = uniform(8.0, 12.0);
        p.chi_i = uniform(0.0, 2.0 * kPi);
        p.chi_f = uniform(0.0, 2.0 * kPi);
        const double t_probe = uniform(0.0, 2.0);
        const SGBeam beam = make_beam(make_sg_config(p));
        const OverlapModel sgm = sg_overlap_model(beam);
        const TimeSeriesMoments smom = time_average(sgm, {"sx", "sy", "sz", kTimeOp}, cfg.quad);

        {
            const double scale = std::max(smom.abs2("sx") * smom.abs2("sy"), 1e-300);
            const double gap = uncertainty_gap(smom, "sx", "sy") / scale;
            emit(idx, "sg", "gap_sxsy_rel", std::abs(gap), std::abs(gap) <= 1e-8);
        }
        {
            const double vz = smom.abs2("sz");
            const Complex af = beam.config.post.up, bf = beam.config.post.down;
            const Complex f4 = bf * bf * bf * bf - af * af * af * af;
            const double coeff =
                std::norm(f4) / (16.0 * std::norm(af) * std::norm(af) * std::norm(bf) *
                                 std::norm(bf));
            const double lhs = smom.abs2("sx") * smom.abs2("sy");
            const double rhs = coeff * vz * vz;
            const double dev =
                std::abs(lhs - rhs) / std::max({lhs, rhs, 1e-12 * vz * vz, 1e-300});
            emit(idx, "sg", "spin_product_rel", dev, dev <= 1e-8);
        }
        {
            double min_gap = std::numeric_limits<double>::infinity();
            for (double t : {0.0, 0.5, 1.0, 1.5, t_probe})
                min_gap = std::min(min_gap, strong_uncertainty_gap(beam, t));
            emit(idx, "sg", "strong_gap_min", min_gap, min_gap >= -1e-12);
        }
        {
            const TimeSpinBound b = time_spin_uncertainty(smom, "sz");
            const double margin = (b.lhs - b.rhs) / std::max({b.lhs, b.rhs, 1e-300});
            emit(idx, "sg", "ts_bound_margin", margin, margin >= -1e-8);
        }
    }

    report.csv = csv;
    std::ostringstream summary;
    summary << "unc-check: " << report.cases << " cases, " << report.checks << " checks, "
            << report.failures << " failures (seed=" << cfg.seed << ")";
    report.summary = summary.str();
    return report;
}

std::string run_figure(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::SgDensity: return run_sg_density(cfg);
        case Command::SgPt: return run_sg_pt(cfg);
        case Command::SgPhaseGrid: return run_sg_phase_grid(cfg);
        case Command::SgMax: return run_sg_max(cfg);
        case Command::ScatterReport: return run_scatter_report(cfg);
        case Command::TeReport: return run_te_report(cfg);
        case Command::UncCheck: return unc_check(cfg).csv;
    }
    throw ValidationError("unhandled command");
}

int run_command(const RunConfig& cfg, std::ostream& status) {
    for (const std::string& w : cfg.warnings) status << "warning: " << w << "\n";
    try {
        if (cfg.command == Command::UncCheck) {
            const UncCheckReport report = unc_check(cfg);
            write_artifact(cfg.out, report.csv);
            status << report.summary << "\n";
            return report.failures == 0 ? 0 : 4;
        }
        write_artifact(cfg.out, run_figure(cfg));
        return 0;
    } catch (const ValidationError& e) {
        status << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        status << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace weakflux
