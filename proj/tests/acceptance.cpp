// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails. Known-red criteria are reported honestly with the
// measured numbers (see notes in the repository README).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "pairlaser/config.hpp"
#include "pairlaser/fluctuations.hpp"
#include "pairlaser/fock.hpp"
#include "pairlaser/rate_equation.hpp"
#include "pairlaser/scenario.hpp"
#include "pairlaser/sde.hpp"
#include "pairlaser/semiclassical.hpp"

using namespace pairlaser;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    Outcome& o;
    void operator()(bool ok, const std::string& what) {
        if (!ok) {
            o.pass = false;
            if (!o.detail.empty()) o.detail += "; ";
            o.detail += what;
        }
    }
    void note(const std::string& what) {
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += what;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof(b), "%.6g", v);
    return b;
}

rate::RateParams criterion1_params() {
    rate::RateParams rp;  // kappa_a = kappa_b = eta/20, mu_out = 10k, mu_in = 50k
    rp.eta = 20.0;
    rp.kappa_a = rp.kappa_b = 1.0;
    rp.mu_in = 50.0;
    rp.mu_out = 10.0;
    return rp;
}

ModelParams fig4a_model(double mu = 0.0) {
    ModelParams p;
    p.eta = 4.0;
    p.kappa_a = p.kappa_b = 1.0;
    p.kappa_c = 2.0;
    p.pump = PumpModel::coherent(mu);
    return p;
}

ModelParams fig5a_model(double kbc = 0.0) {
    ModelParams p;
    p.eta = 10.0;
    p.kappa_a = p.kappa_b = 0.2;
    p.kappa_c = 1.0;
    p.kappa_bc = kbc;
    p.pump = PumpModel::coherent(0.0);
    return p;
}

fluctuations::FluctuationModel model_at(const ModelParams& p, double eps) {
    auto ss = semiclassical::steady_branch(p, eps * semiclassical::threshold(p));
    return fluctuations::build_fluctuation_model(p, ss);
}

// ---------------------------------------------------------------- criteria

Outcome criterion1() {
    Outcome o;
    Check c{o};
    const auto t0 = std::chrono::steady_clock::now();
    auto gen = rate::build_rate_generator(criterion1_params(), 59, 59);  // 60x60 grid
    auto ms = rate::moments(rate::rate_steady_state(gen));
    const double elapsed = seconds_since(t0);
    c(std::abs(ms.mean_n - 20.0) <= 0.05 * 20.0, "<n> = " + fmt(ms.mean_n) + " not within 20 +- 5%");
    c(std::abs(*ms.g2_n - 1.0125) <= 0.01, "g2 = " + fmt(*ms.g2_n) + " not within 1.0125 +- 0.01");
    c(std::abs(*ms.g_nm - 1.2625) <= 0.02,
      "g_nm = " + fmt(*ms.g_nm) + " not within 1.2625 +- 0.02 (the generator obeys the exact "
      "stationary identity g_nm = g2 + 1/(2<n>) = " + fmt(*ms.g2_n + 0.5 / ms.mean_n) +
      ", incompatible with the quoted closed form; see notes)");
    const double ratio = ms.var_diff / ((ms.mean_n + ms.mean_m) / 2.0);
    c(std::abs(ratio - 1.0) <= 0.01, "Var(n-m)/(<n+m>/2) = " + fmt(ratio) + " not within 1 +- 1%");
    c(elapsed < 10.0, "runtime " + fmt(elapsed) + " s >= 10 s");
    return o;
}

Outcome criterion2() {
    Outcome o;
    Check c{o};
    // the fig. 3 recipe: R pinned by kappa = 0.072 R, mu_out = 10 kappa
    rate::RateParams rp;
    rp.kappa_a = rp.kappa_b = 1.0;
    rp.mu_out = 10.0;
    rp.R_fixed = 1.0 / 0.072;
    double worst_sym = 0, worst_gap = 1e300;
    for (int i = 0; i < 20; ++i) {
        rp.mu_in = 12.0 + (60.0 - 12.0) * i / 19.0;
        auto jd = rate::rate_steady_state(rate::build_rate_generator(rp, 60, 60));
        worst_sym = std::max(worst_sym, (jd.P - jd.P.transpose().eval()).cwiseAbs().maxCoeff());
        auto ms = rate::moments(jd);
        if (ms.g_nm && ms.g2_n) worst_gap = std::min(worst_gap, *ms.g_nm - *ms.g2_n);
    }
    c(worst_sym <= 1e-9, "max |P - P^T| = " + fmt(worst_sym) + " > 1e-9");
    c(worst_gap >= 0, "g_nm - g2 = " + fmt(worst_gap) + " < 0 somewhere on the scan");
    return o;
}

Outcome criterion3() {
    Outcome o;
    Check c{o};
    rate::RateParams rp;
    rp.eta = 14.0;
    rp.kappa_a = rp.kappa_b = 1.0;
    rp.mu_in = 11.5;
    rp.mu_out = 8.5;  // mu_in + mu_out = 20 max(kappa)
    auto s = rate::integrate_reduced_system(rp, rate::ReducedState::vacuum(8, 8), 12.0, 0.004);
    Eigen::MatrixXd P = s.joint();
    P /= P.sum();
    auto jd = rate::rate_steady_state(rate::build_rate_generator(rp, 8, 8));
    const double tv = 0.5 * (P - jd.P).cwiseAbs().sum();
    c(tv <= 0.05, "TV = " + fmt(tv) + " > 0.05");
    o.detail = o.detail.empty() ? "TV = " + fmt(tv) : o.detail;
    return o;
}

Outcome criterion4() {
    Outcome o;
    Check c{o};
    const auto t0 = std::chrono::steady_clock::now();
    rate::RateParams rp;
    rp.eta = 30.0;
    rp.kappa_a = rp.kappa_b = 1.0;
    rp.mu_in = 21.0;
    rp.mu_out = 19.0;  // mu_in/kappa >= 20
    auto jd = rate::rate_steady_state(rate::build_rate_generator(rp, 5, 5));

    ModelParams p;
    p.eta = rp.eta;
    p.kappa_a = p.kappa_b = 1.0;
    p.pump = PumpModel::incoherent(rp.mu_in, rp.mu_out);
    Truncation t{5, 5, 1};  // 6x6x2 levels
    auto ss = fock::steady_state(fock::build_liouvillian(p, t));
    auto obs = fock::observables(ss.rho, t, p);
    const double tv = 0.5 * (obs.joint - jd.P).cwiseAbs().sum();
    const double elapsed = seconds_since(t0);
    c(tv <= 0.08, "TV = " + fmt(tv) + " > 0.08");
    c(ss.trace_error <= 1e-10, "trace error " + fmt(ss.trace_error) + " > 1e-10");
    c(ss.residual <= 1e-9, "residual " + fmt(ss.residual) + " > 1e-9");
    c(elapsed < 60.0, "runtime " + fmt(elapsed) + " s >= 60 s");
    if (o.pass) o.detail = "TV = " + fmt(tv) + ", " + fmt(elapsed) + " s";
    return o;
}

Outcome criterion5() {
    Outcome o;
    Check c{o};
    ModelParams p;
    p.eta = 1.0;
    p.kappa_b = 0.2;
    p.kappa_cb = 1.0 / 80.0;
    p.pump = PumpModel::incoherent(0.375 / 0.9, 0.375);  // mu_out = 0.9 mu_in = 3 eta/8
    Truncation t{10, 10, 8};
    std::vector<double> emission, g2b, nc;
    for (int i = 0; i < 8; ++i) {
        p.kappa_a = 60.0 * std::pow(7.0 / 60.0, i / 7.0);  // decreasing kappa_a
        auto ss = fock::steady_state(fock::build_liouvillian(p, t));
        auto obs = fock::observables(ss.rho, t, p);
        emission.push_back(obs.atom_emission);
        g2b.push_back(*obs.g2_b);
        nc.push_back(obs.n_c);
    }
    for (std::size_t i = 1; i < emission.size(); ++i) {
        c(emission[i] >= emission[i - 1] - 1e-9, "atom emission not non-decreasing at step " + std::to_string(i));
        c(g2b[i] <= g2b[i - 1] + 1e-9, "g2_b not non-increasing at step " + std::to_string(i));
        c(nc[i] <= nc[i - 1] + 1e-9, "<c^+c> not non-increasing at step " + std::to_string(i));
    }
    c(g2b.front() > 1.7 && g2b.front() < 2.05, "g2_b start " + fmt(g2b.front()) + " not close to 2");
    c(g2b.back() < 1.45, "g2_b end " + fmt(g2b.back()) + " not heading toward 1");
    if (o.pass)
        o.detail = "g2_b: " + fmt(g2b.front()) + " -> " + fmt(g2b.back()) + ", emission: " +
                   fmt(emission.front()) + " -> " + fmt(emission.back());
    return o;
}

Outcome criterion6() {
    Outcome o;
    Check c{o};
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        ModelParams p;
        p.kappa_a = u(rng);
        p.kappa_b = u(rng);
        p.kappa_c = u(rng);
        p.kappa_bc = (i % 2) ? 0.0 : 0.3 * u(rng);
        p.eta = std::sqrt(p.kappa_a * p.kappa_bc) + u(rng);
        p.pump = PumpModel::coherent(0.0);
        // mu_th reduction at kappa_bc = 0
        if (p.kappa_bc == 0.0) {
            const double direct = semiclassical::threshold(p);
            const double reduced = p.kappa_c * std::sqrt(p.kappa_a * p.kappa_b) / p.eta;
            c(std::abs(direct - reduced) <= 1e-14 * reduced, "mu_th formula mismatch");
        }
        const double eps = 1.0 + 10.0 * u(rng) / 3.0;
        auto s = semiclassical::steady_branch(p, eps * semiclassical::threshold(p));
        auto d = semiclassical::drift(p, s.mu, {s.alpha0, s.beta0, s.gamma0, s.alpha0, s.beta0, s.gamma0});
        for (double x : d) worst = std::max(worst, std::abs(x));
    }
    c(worst <= 1e-12, "max drift residual " + fmt(worst) + " > 1e-12");
    if (o.pass) o.detail = "max residual " + fmt(worst) + " over 100 draws";
    return o;
}

Outcome criterion7() {
    Outcome o;
    Check c{o};
    std::vector<fluctuations::FluctuationModel> points;
    for (double eps : {1.2, 2.0, 4.0, 10.0})  // fig. 4(a) family
        points.push_back(model_at(fig4a_model(), eps));
    {
        ModelParams p = fig5a_model();
        for (double k : {1.0, 0.5, 0.2, 0.1}) {  // fig. 4(b) family
            p.kappa_a = p.kappa_b = k;
            auto ss = semiclassical::steady_branch(p, semiclassical::mu_for_intensity(p, 1.0));
            points.push_back(fluctuations::build_fluctuation_model(p, ss));
        }
    }
    for (double eps : {1.5, 2.7, 20.0}) points.push_back(model_at(fig5a_model(), eps));
    for (double kbc : {0.05, 0.2, 0.4}) points.push_back(model_at(fig5a_model(kbc), 4.0));

    double worst = 0, slowest = 0;
    for (const auto& fm : points) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto Sq = fluctuations::covariance_by_quadrature(fm);
        slowest = std::max(slowest, seconds_since(t0));
        const auto Sl = fluctuations::covariance_by_lyapunov(fm);
        worst = std::max(worst, (Sq - Sl).cwiseAbs().maxCoeff() / Sl.cwiseAbs().maxCoeff());
    }
    c(worst <= 1e-6, "max relative deviation " + fmt(worst) + " > 1e-6");
    c(slowest < 0.1, "slowest point " + fmt(slowest) + " s >= 0.1 s");
    if (o.pass) o.detail = fmt(points.size()) + " points, worst " + fmt(worst);
    return o;
}

Outcome criterion8() {
    Outcome o;
    Check c{o};
    // g2 anchors are quoted at the unit-intensity normalization that the
    // paper's fixed-intensity figure uses (see notes): g2 = 1 + <dx^2>
    auto ns27 = fluctuations::number_statistics(model_at(fig5a_model(), 2.7));
    c(std::abs(ns27.g2_unit_a - 1.0) <= 0.02,
      "g2(eps=2.7) = " + fmt(ns27.g2_unit_a) + " not within 1.00 +- 0.02");
    auto ns20 = fluctuations::number_statistics(model_at(fig5a_model(), 20.0));
    c(std::abs(ns20.g2_unit_a - 0.85) <= 0.02,
      "g2(eps=20) = " + fmt(ns20.g2_unit_a) + " not within 0.85 +- 0.02");

    auto fm15 = model_at(fig5a_model(), 1.5);
    auto grid = fluctuations::default_omega_grid(fm15, 20.0, 241);
    auto V15 = fluctuations::output_spectrum(fm15, fluctuations::LaserMode::A, grid);
    bool above = true;
    for (double v : V15) above = above && v > 1.0;
    c(above, "V_a(omega) dips to or below 1 at eps = 1.5");

    auto fm20 = model_at(fig5a_model(), 20.0);
    auto V20 = fluctuations::output_spectrum(fm20, fluctuations::LaserMode::A, {0.0});
    c(V20[0] < 1.0, "V_a(0) = " + fmt(V20[0]) + " not below 1 at eps = 20");
    if (o.pass)
        o.detail = "g2(2.7) = " + fmt(ns27.g2_unit_a) + ", g2(20) = " + fmt(ns20.g2_unit_a) +
                   ", V(0; 20) = " + fmt(V20[0]);
    return o;
}

Outcome criterion9() {
    Outcome o;
    Check c{o};
    auto S_eq = fluctuations::intensity_difference_spectrum(model_at(fig5a_model(), 4.0), {0.0});
    c(std::abs(S_eq.S_over_shot[0]) <= 1e-6,
      "S(0)/shot = " + fmt(S_eq.S_over_shot[0]) + " (equal kappas, kappa_bc = 0)");
    ModelParams uneq = fig5a_model();
    uneq.kappa_b = 0.5;
    auto S_un = fluctuations::intensity_difference_spectrum(model_at(uneq, 4.0), {0.0});
    c(std::abs(S_un.S_over_shot[0]) <= 1e-6,
      "S(0)/shot = " + fmt(S_un.S_over_shot[0]) + " (unequal kappas)");
    auto Sh = fluctuations::intensity_difference_spectrum(model_at(fig5a_model(0.2), 4.0),
                                                          {0.0, 100 * 0.2});
    c(Sh.S_over_shot[0] > 0.0 && Sh.S_over_shot[0] < 1.0,
      "S(0)/shot = " + fmt(Sh.S_over_shot[0]) + " outside (0, 1) at kappa_bc = kappa_a");
    c(std::abs(Sh.S_over_shot[1] - 1.0) <= 1e-3,
      "S/shot at 100 kappa_a = " + fmt(Sh.S_over_shot[1]) + " not 1 +- 1e-3");
    if (o.pass)
        o.detail = "S(0)/shot: " + fmt(S_eq.S_over_shot[0]) + " / " + fmt(S_un.S_over_shot[0]) +
                   " / " + fmt(Sh.S_over_shot[0]);
    return o;
}

Outcome criterion10() {
    Outcome o;
    Check c{o};
    ModelParams p = fig5a_model();
    std::vector<double> g2s, gabs;
    for (int i = 0; i < 15; ++i) {
        const double k = 1.0 * std::pow(0.1, i / 14.0);  // kappa_a = kappa_b decreasing
        p.kappa_a = p.kappa_b = k;
        auto ss = semiclassical::steady_branch(p, semiclassical::mu_for_intensity(p, 1.0));
        auto ns = fluctuations::number_statistics(fluctuations::build_fluctuation_model(p, ss));
        g2s.push_back(ns.g2_a);
        gabs.push_back(ns.g_ab);
    }
    for (std::size_t i = 1; i < g2s.size(); ++i)
        c(g2s[i] < g2s[i - 1], "g2 not monotone decreasing at step " + std::to_string(i));
    c(g2s.front() > 1.0, "g2 start " + fmt(g2s.front()) + " not above 1");
    c(g2s.back() < 1.0, "g2 end " + fmt(g2s.back()) + " does not cross below 1");
    for (std::size_t i = 0; i < g2s.size(); ++i)
        c(gabs[i] >= g2s[i], "g_ab < g2 at step " + std::to_string(i));
    if (o.pass) o.detail = "g2: " + fmt(g2s.front()) + " -> " + fmt(g2s.back());
    return o;
}

Outcome criterion11() {
    Outcome o;
    Check c{o};
    const auto t0 = std::chrono::steady_clock::now();
    ModelParams p = fig4a_model(2.0);  // eps = 4
    auto ss = semiclassical::steady_branch(p, p.pump.mu);
    sde::SdeOptions opts;
    opts.n_traj = 10000;
    opts.t_total = 1.0;
    opts.t_burn = 0.5;
    opts.dt = 1e-3;
    opts.seed = 20240809;
    auto es = sde::sde_trajectories(p, ss, opts);
    auto es2 = sde::sde_trajectories(p, ss, opts);
    const double elapsed = seconds_since(t0);

    auto fm = fluctuations::build_fluctuation_model(p, ss);
    auto pc = fluctuations::population_correction(fm);
    auto qv = fluctuations::quadrature_variance(fm);

    const double dev_I = std::abs(es.mean_I_a - pc.total_a);
    c(dev_I <= 3.0 * es.sem_I_a,
      "<I_a> = " + fmt(es.mean_I_a) + " +- " + fmt(es.sem_I_a) + " vs linearized " +
      fmt(pc.total_a) + " (" + fmt(dev_I / es.sem_I_a) + " sigma; the linearized mean misses "
      "the true quantum correction at these sub-photon intensities -- the same ensemble "
      "matches the exact master-equation mean, see notes)");
    const double dev_x = std::abs(es.dx2_a - qv.xx_a);
    c(dev_x <= 3.0 * es.sem_dx2_a,
      "<dx_a^2> = " + fmt(es.dx2_a) + " +- " + fmt(es.sem_dx2_a) + " vs linearized " +
      fmt(qv.xx_a) + " (" + fmt(dev_x / es.sem_dx2_a) + " sigma)");
    c(double(es.n_divergent) <= 0.01 * opts.n_traj,
      "divergent fraction " + fmt(es.n_divergent / double(opts.n_traj)) + " > 1%");
    c(std::memcmp(&es.mean_I_a, &es2.mean_I_a, sizeof(double)) == 0 && es.dx2_a == es2.dx2_a,
      "fixed seed did not reproduce byte-identical statistics");
    c(elapsed < 120.0, "runtime " + fmt(elapsed) + " s >= 120 s");
    return o;
}

Outcome criterion12() {
    Outcome o;
    Check c{o};
#ifndef PAIRLASER_CLI_PATH
    c(false, "CLI path not configured");
    return o;
#else
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "pairlaser_acceptance";
    fs::remove_all(base);
    for (int i = 1; i <= 2; ++i) {
        const std::string cmd = std::string(PAIRLASER_CLI_PATH) + " figure fig3 --out " +
                                (base / ("run" + std::to_string(i))).string() + " >/dev/null 2>&1";
        c(std::system(cmd.c_str()) == 0, "CLI run " + std::to_string(i) + " failed");
    }
    if (!o.pass) return o;
    int compared = 0;
    for (const auto& e : fs::directory_iterator(base / "run1")) {
        std::ifstream a(e.path(), std::ios::binary);
        std::ifstream b(base / "run2" / e.path().filename(), std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        c(b.good() && sa.str() == sb.str(), e.path().filename().string() + " differs between runs");
        ++compared;
    }
    c(compared >= 2, "expected at least a data file and a manifest");
    if (o.pass) o.detail = std::to_string(compared) + " files bit-identical";
    return o;
#endif
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1  rate-equation analytics (fig. 3 regime)", criterion1},
        {"2  symmetry and Cauchy-Schwarz violation", criterion2},
        {"3  adiabatic-elimination oracle", criterion3},
        {"4  master-equation cross-check", criterion4},
        {"5  fig. 2 trends along decreasing kappa_a", criterion5},
        {"6  threshold formula and drift fixed point", criterion6},
        {"7  spectral/Lyapunov equivalence", criterion7},
        {"8  fig. 5(a) anchors", criterion8},
        {"9  fig. 5(b) anchors", criterion9},
        {"10 fig. 4(b) trend", criterion10},
        {"11 SDE consistency", criterion11},
        {"12 harness determinism", criterion12},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %s%s%s\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                    o.detail.empty() ? "" : " -- ", o.detail.c_str());
        std::fflush(stdout);
    }
    if (failures)
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    else
        std::printf("all %zu criteria passed\n", criteria.size());
    return failures == 0 ? 0 : 1;
}
