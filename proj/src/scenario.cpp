#include "pairlaser/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "pairlaser/fluctuations.hpp"
#include "pairlaser/fock.hpp"
#include "pairlaser/rate_equation.hpp"
#include "pairlaser/sde.hpp"
#include "pairlaser/semiclassical.hpp"

namespace pairlaser::scenario {

using config::Method;
using config::ScenarioConfig;
using table::ResultTable;

namespace {

struct PointJob {
    std::size_t row;
    double scan_value;
};

void append_flag(ResultTable& t, std::size_t row, const std::string& msg) {
    if (!t.flags[row].empty()) t.flags[row] += "; ";
    t.flags[row] += msg;
}

void run_master_eq_point(const ScenarioConfig& cfg, ResultTable& t, const PointJob& job) {
    const ModelParams p = config::params_at(cfg, job.scan_value);
    fock::SteadyStateOptions opts;
    auto L = fock::build_liouvillian(p, cfg.truncation);
    auto ss = fock::steady_state(L, opts);
    auto obs = fock::observables(ss.rho, cfg.truncation, p);
    t.set("n_a", job.row, obs.n_a);
    t.set("n_b", job.row, obs.n_b);
    t.set("n_c", job.row, obs.n_c);
    t.set("atom_emission", job.row, obs.atom_emission);
    t.set("photon_emission", job.row, obs.photon_emission);
    if (obs.g2_a) t.set("g2_a", job.row, *obs.g2_a); else append_flag(t, job.row, "g2_a undefined");
    if (obs.g2_b) t.set("g2_b", job.row, *obs.g2_b); else append_flag(t, job.row, "g2_b undefined");
    if (obs.g2_c) t.set("g2_c", job.row, *obs.g2_c); else append_flag(t, job.row, "g2_c undefined");
    if (obs.g_ab) t.set("g_ab", job.row, *obs.g_ab); else append_flag(t, job.row, "g_ab undefined");
    t.set("residual", job.row, ss.residual);
    t.set("trace_error", job.row, ss.trace_error);
    t.set("min_eigenvalue", job.row, ss.min_eigenvalue);
    t.set("edge_mass_a", job.row, obs.edge_mass_a);
    t.set("edge_mass_b", job.row, obs.edge_mass_b);
    t.set("edge_mass_c", job.row, obs.edge_mass_c);
    if (obs.truncation_flag) append_flag(t, job.row, "truncation tail above 1e-4");
}

void run_rate_eq_point(const ScenarioConfig& cfg, ResultTable& t, const PointJob& job) {
    const ModelParams p = config::params_at(cfg, job.scan_value);
    rate::RateParams rp;
    rp.eta = p.eta;
    rp.kappa_a = p.kappa_a;
    rp.kappa_b = p.kappa_b;
    rp.mu_in = p.pump.mu_in;
    rp.mu_out = p.pump.mu_out;
    rp.R_fixed = cfg.saturation_R;
    auto gen = rate::build_rate_generator(rp, cfg.n_max, cfg.m_max);
    auto jd = rate::rate_steady_state(gen);
    auto ms = rate::moments(jd);
    t.set("mean_n", job.row, ms.mean_n);
    t.set("mean_m", job.row, ms.mean_m);
    if (ms.g2_n) t.set("g2_n", job.row, *ms.g2_n); else append_flag(t, job.row, "g2_n undefined");
    if (ms.g2_m) t.set("g2_m", job.row, *ms.g2_m); else append_flag(t, job.row, "g2_m undefined");
    if (ms.g_nm) t.set("g_nm", job.row, *ms.g_nm); else append_flag(t, job.row, "g_nm undefined");
    t.set("var_diff", job.row, ms.var_diff);
    t.set("sum_half", job.row, (ms.mean_n + ms.mean_m) / 2.0);
    t.set("residual", job.row, jd.residual);
    t.set("edge_mass_n", job.row, jd.edge_mass_n);
    t.set("edge_mass_m", job.row, jd.edge_mass_m);
    if (jd.truncation_flag) append_flag(t, job.row, "truncation tail above 1e-4");
    if (!rp.adiabatic_valid()) append_flag(t, job.row, "adiabatic elimination marginal");
    if (rp.mu_in > rp.mu_out) {
        auto an = rate::analytic_above_threshold(rp);
        t.set("analytic_mean_n", job.row, an.mean_n);
        if (an.g2_n) t.set("analytic_g2", job.row, *an.g2_n);
        if (an.g_nm) t.set("analytic_g_nm", job.row, *an.g_nm);
        if (!an.validity_flag) append_flag(t, job.row, "analytic moments marginal (near threshold)");
    }
}

void run_semiclassical_point(const ScenarioConfig& cfg, ResultTable& t, const PointJob& job) {
    ModelParams p = config::params_at(cfg, job.scan_value);
    p.pump.mu = config::resolve_mu(cfg, p);
    auto ss = semiclassical::steady_branch(p, p.pump.mu);
    t.set("mu", job.row, ss.mu);
    t.set("mu_th", job.row, ss.mu_th);
    t.set("epsilon", job.row, ss.epsilon);
    t.set("alpha0", job.row, ss.alpha0);
    t.set("beta0", job.row, ss.beta0);
    t.set("gamma0", job.row, ss.gamma0);
    t.set("n_a", job.row, ss.n_a());
    t.set("n_b", job.row, ss.n_b());
    t.set("n_c", job.row, ss.n_c());
    t.set("above_threshold", job.row, ss.branch == semiclassical::Branch::Above ? 1.0 : 0.0);
}

void run_fluctuations_point(const ScenarioConfig& cfg, ResultTable& t, const PointJob& job) {
    ModelParams p = config::params_at(cfg, job.scan_value);
    p.pump.mu = config::resolve_mu(cfg, p);
    auto ss = semiclassical::steady_branch(p, p.pump.mu);
    auto fm = fluctuations::build_fluctuation_model(p, ss);
    t.set("mu", job.row, ss.mu);
    t.set("epsilon", job.row, ss.epsilon);
    t.set("alpha0", job.row, ss.alpha0);
    t.set("beta0", job.row, ss.beta0);
    t.set("gamma0", job.row, ss.gamma0);
    t.set("damped", job.row, fm.damped ? 1.0 : 0.0);
    if (ss.branch != semiclassical::Branch::Above) {
        append_flag(t, job.row, "below threshold: spectra refused");
        t.ok[job.row] = false;
        return;
    }
    auto pc = fluctuations::population_correction(fm);
    auto ns = fluctuations::number_statistics(fm);
    auto qv = fluctuations::quadrature_variance(fm);
    t.set("I_a", job.row, pc.total_a);
    t.set("I_b", job.row, pc.total_b);
    t.set("I_c", job.row, pc.total_c);
    t.set("correction_a", job.row, pc.mode_a);
    t.set("correction_b", job.row, pc.mode_b);
    t.set("correction_c", job.row, pc.mode_c);
    t.set("dx2_a", job.row, qv.xx_a);
    t.set("dx2_b", job.row, qv.xx_b);
    t.set("cross_ab", job.row, qv.cross_ab);
    t.set("g2_a", job.row, ns.g2_a);
    t.set("g2_b", job.row, ns.g2_b);
    t.set("g_ab", job.row, ns.g_ab);
    t.set("g2_unit_a", job.row, ns.g2_unit_a);
    t.set("g_ab_unit", job.row, ns.g_ab_unit);
    t.set("linearization_validity", job.row, ns.validity);
    if (ns.validity_flag) append_flag(t, job.row, "linearization validity marginal");

    auto grid = fluctuations::default_omega_grid(fm, cfg.omega_max, cfg.omega_points);
    auto Va = fluctuations::output_spectrum(fm, fluctuations::LaserMode::A, grid);
    auto Sd = fluctuations::intensity_difference_spectrum(fm, grid);
    t.set("S0_over_shot", job.row, Sd.S_over_shot[(grid.size() - 1) / 2]);
    t.set("shot", job.row, Sd.shot);
    table::Series va{grid, Va};
    table::Series ss_series{grid, Sd.S_over_shot};
    t.series["V_a"].at(job.row) = std::move(va);
    t.series["S_over_shot"].at(job.row) = std::move(ss_series);
}

void run_sde_point(const ScenarioConfig& cfg, ResultTable& t, const PointJob& job) {
    ModelParams p = config::params_at(cfg, job.scan_value);
    p.pump.mu = config::resolve_mu(cfg, p);
    auto ss = semiclassical::steady_branch(p, p.pump.mu);
    sde::SdeOptions opts;
    opts.n_traj = cfg.n_traj;
    opts.t_total = cfg.sde_t_total;
    opts.dt = cfg.sde_dt;
    opts.t_burn = cfg.sde_t_burn;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    auto es = sde::sde_trajectories(p, ss, opts);
    t.set("mu", job.row, ss.mu);
    t.set("epsilon", job.row, ss.epsilon);
    t.set("mean_I_a", job.row, es.mean_I_a);
    t.set("mean_I_b", job.row, es.mean_I_b);
    t.set("mean_I_c", job.row, es.mean_I_c);
    t.set("sem_I_a", job.row, es.sem_I_a);
    t.set("sem_I_b", job.row, es.sem_I_b);
    t.set("sem_I_c", job.row, es.sem_I_c);
    t.set("dx2_a", job.row, es.dx2_a);
    t.set("dx2_b", job.row, es.dx2_b);
    t.set("sem_dx2_a", job.row, es.sem_dx2_a);
    t.set("sem_dx2_b", job.row, es.sem_dx2_b);
    t.set("n_divergent", job.row, es.n_divergent);
    t.set("n_used", job.row, es.n_used);
    // linearized references for side-by-side comparison
    auto fm = fluctuations::build_fluctuation_model(p, ss);
    auto pc = fluctuations::population_correction(fm);
    auto qv = fluctuations::quadrature_variance(fm);
    t.set("pred_I_a", job.row, pc.total_a);
    t.set("pred_dx2_a", job.row, qv.xx_a);
    if (es.n_divergent > 0) append_flag(t, job.row, "divergent trajectories excluded");
}

std::vector<std::string> columns_for(Method m) {
    switch (m) {
        case Method::MasterEq:
            return {"n_a", "n_b", "n_c", "atom_emission", "photon_emission", "g2_a", "g2_b",
                    "g2_c", "g_ab", "residual", "trace_error", "min_eigenvalue", "edge_mass_a",
                    "edge_mass_b", "edge_mass_c"};
        case Method::RateEq:
            return {"mean_n", "mean_m", "g2_n", "g2_m", "g_nm", "var_diff", "sum_half",
                    "residual", "edge_mass_n", "edge_mass_m", "analytic_mean_n", "analytic_g2",
                    "analytic_g_nm"};
        case Method::Semiclassical:
            return {"mu", "mu_th", "epsilon", "alpha0", "beta0", "gamma0", "n_a", "n_b", "n_c",
                    "above_threshold"};
        case Method::Fluctuations:
            return {"mu", "epsilon", "alpha0", "beta0", "gamma0", "damped", "I_a", "I_b", "I_c",
                    "correction_a", "correction_b", "correction_c", "dx2_a", "dx2_b", "cross_ab",
                    "g2_a", "g2_b", "g_ab", "g2_unit_a", "g_ab_unit", "linearization_validity",
                    "S0_over_shot", "shot"};
        case Method::Sde:
            return {"mu", "epsilon", "mean_I_a", "mean_I_b", "mean_I_c", "sem_I_a", "sem_I_b",
                    "sem_I_c", "dx2_a", "dx2_b", "sem_dx2_a", "sem_dx2_b", "n_divergent",
                    "n_used", "pred_I_a", "pred_dx2_a"};
    }
    return {};
}

}  // namespace

ResultTable run_scenario(const ScenarioConfig& cfg) {
    std::vector<double> values = cfg.scan ? cfg.scan->values() : std::vector<double>{0.0};
    ResultTable t;
    const std::string axis = cfg.scan ? cfg.scan->field : "point";
    t.add_column(axis);
    for (const auto& c : columns_for(cfg.method)) t.add_column(c);

    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t r = t.add_row();
        t.set(axis, r, values[i]);
    }
    if (cfg.method == Method::Fluctuations) {
        t.series["V_a"].resize(t.rows());
        t.series["S_over_shot"].resize(t.rows());
    }

    auto run_point = [&](std::size_t row) {
        const PointJob job{row, values[row]};
        const auto start = std::chrono::steady_clock::now();
        try {
            switch (cfg.method) {
                case Method::MasterEq: run_master_eq_point(cfg, t, job); break;
                case Method::RateEq: run_rate_eq_point(cfg, t, job); break;
                case Method::Semiclassical: run_semiclassical_point(cfg, t, job); break;
                case Method::Fluctuations: run_fluctuations_point(cfg, t, job); break;
                case Method::Sde: run_sde_point(cfg, t, job); break;
            }
        } catch (const std::exception& e) {
            t.ok[job.row] = false;
            append_flag(t, job.row, e.what());
        }
        t.timing_ms[row] =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
    };

    // scan points are independent; the sde method parallelizes internally
    int threads = cfg.threads > 0 ? cfg.threads : int(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (cfg.method == Method::Sde || values.size() == 1 || threads == 1) {
        for (std::size_t i = 0; i < values.size(); ++i) run_point(i);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        const int n = std::min<int>(threads, int(values.size()));
        for (int w = 0; w < n; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = cursor.fetch_add(1);
                    if (i >= values.size()) return;
                    run_point(i);
                }
            });
        for (auto& th : pool) th.join();
    }
    return t;
}

}  // namespace pairlaser::scenario
