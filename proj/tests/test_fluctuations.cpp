#include <doctest.h>

#include <cmath>

#include "pairlaser/fluctuations.hpp"

using namespace pairlaser;
using namespace pairlaser::fluctuations;

namespace {

ModelParams fig4a_params() {
    ModelParams p;
    p.eta = 4.0;
    p.kappa_a = p.kappa_b = 1.0;
    p.kappa_c = 2.0;
    p.pump = PumpModel::coherent(0.0);
    return p;
}

ModelParams fig5a_params(double kappa_bc = 0.0) {
    ModelParams p;
    p.eta = 10.0;
    p.kappa_a = p.kappa_b = 0.2;
    p.kappa_c = 1.0;
    p.kappa_bc = kappa_bc;
    p.pump = PumpModel::coherent(0.0);
    return p;
}

FluctuationModel model_at(const ModelParams& p, double eps) {
    auto ss = semiclassical::steady_branch(p, eps * semiclassical::threshold(p));
    return build_fluctuation_model(p, ss);
}

int count_zero_modes(const FluctuationModel& fm) {
    int n = 0;
    for (int i = 0; i < 6; ++i)
        if (std::abs(fm.lambda[i]) < 1e-9 * fm.rate_scale()) ++n;
    return n;
}

// hand-derived stationary x-quadrature variance for kappa_a = kappa_b = k,
// kappa_bc = 0 (the +/- mode decomposition):
//   <dx^2> = (k/kc + kc/(2 v^2) - 1/2) / 2 with v^2 = k kc (eps-1)
double dx2_closed_form(double k, double kc, double eps) {
    const double v2 = k * kc * (eps - 1.0);
    return 0.5 * (k / kc + kc * k / (2.0 * v2) - 0.5);
}

}  // namespace

TEST_CASE("drift matrix keeps the [[A,B],[B,A]] block form and D is symmetric") {
    ModelParams p = fig5a_params(0.15);
    auto fm = model_at(p, 3.0);
    CHECK((fm.M.topLeftCorner<3, 3>() - fm.M.bottomRightCorner<3, 3>()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((fm.M.topRightCorner<3, 3>() - fm.M.bottomLeftCorner<3, 3>()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((fm.D - fm.D.transpose().eval()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fm.M(2, 2) == doctest::Approx(-p.kappa_c + p.kappa_bc * fm.ss.beta0 * fm.ss.beta0));
}

TEST_CASE("kappa_bc = 0 leaves only the pair-creation noise") {
    auto fm = model_at(fig5a_params(), 2.0);
    const double w = fm.params.eta * fm.ss.gamma0;
    Matrix6d expect = Matrix6d::Zero();
    expect(0, 1) = expect(1, 0) = expect(3, 4) = expect(4, 3) = w;
    CHECK((fm.D - expect).cwiseAbs().maxCoeff() == 0.0);
    // B block reduces to the eta*gamma0 couplings
    CHECK(fm.M(0, 4) == doctest::Approx(w));
    CHECK(fm.M(1, 5) == 0.0);
}

TEST_CASE("below threshold: diagonal A block, no symmetry mode, spectra refused") {
    ModelParams p = fig5a_params();
    auto ss = semiclassical::steady_branch(p, 0.5 * semiclassical::threshold(p));
    auto fm = build_fluctuation_model(p, ss);
    CHECK(fm.M(0, 2) == 0.0);
    CHECK(fm.M(2, 0) == 0.0);
    CHECK(fm.M(0, 4) == doctest::Approx(p.eta * ss.gamma0));
    CHECK(fm.zero_mode == -1);
    CHECK(fm.damped);
    CHECK_THROWS_AS(covariance_by_quadrature(fm), std::invalid_argument);
    CHECK_THROWS_AS(output_spectrum(fm, LaserMode::A, {0.0}), std::invalid_argument);
}

TEST_CASE("one exact symmetry zero mode above threshold, rest damped") {
    for (double eps : {1.05, 2.0, 5.0, 20.0, 50.0}) {
        auto fm4 = model_at(fig4a_params(), eps);
        CHECK(count_zero_modes(fm4) == 1);
        CHECK(fm4.damped);
        auto fm5 = model_at(fig5a_params(), eps);
        CHECK(count_zero_modes(fm5) == 1);
        CHECK(fm5.damped);
    }
    // with heating too
    auto fmh = model_at(fig5a_params(0.2), 4.0);
    CHECK(count_zero_modes(fmh) == 1);
    CHECK(fmh.damped);
    // M annihilates the phase tangent exactly
    auto fm = model_at(fig4a_params(), 3.0);
    CHECK((fm.M * fm.v0).cwiseAbs().maxCoeff() < 1e-12 * fm.rate_scale());
}

TEST_CASE("scalar analogue is a lorentzian") {
    FluctuationModel fm;
    const double kappa = 0.8, d = 1.7;
    fm.M = -kappa * Matrix6d::Identity();
    fm.D = Matrix6d::Zero();
    fm.D(0, 0) = d;
    fm.ss.branch = semiclassical::Branch::Above;
    analyze(fm);
    CHECK(fm.zero_mode == -1);
    for (double w : {0.0, 0.3, 1.7, 12.0}) {
        auto C = correlation_matrix(fm, w);
        CHECK(C(0, 0).real() == doctest::Approx(d / (kappa * kappa + w * w)).epsilon(1e-12));
        CHECK(std::abs(C(0, 0).imag()) < 1e-14);
    }
    // stationary covariance d/(2 kappa) both ways
    CHECK(covariance_by_quadrature(fm)(0, 0) == doctest::Approx(d / (2 * kappa)).epsilon(1e-8));
    CHECK(covariance_by_lyapunov(fm)(0, 0) == doctest::Approx(d / (2 * kappa)).epsilon(1e-12));
}

TEST_CASE("correlations fall off as 1/omega^2") {
    auto fm = model_at(fig4a_params(), 4.0);
    const double w = 300.0;
    const double big = correlation_matrix(fm, w).cwiseAbs().maxCoeff();
    CHECK(big < 2.0 * fm.D.cwiseAbs().maxCoeff() / (w * w));
}

TEST_CASE("frequency integral equals the lyapunov covariance") {
    for (double eps : {1.5, 2.7, 4.0, 20.0}) {
        for (auto p : {fig4a_params(), fig5a_params(), fig5a_params(0.2)}) {
            auto fm = model_at(p, eps);
            const Matrix6d Sq = covariance_by_quadrature(fm);
            const Matrix6d Sl = covariance_by_lyapunov(fm);
            const double scale = Sl.cwiseAbs().maxCoeff();
            CHECK((Sq - Sl).cwiseAbs().maxCoeff() < 1e-6 * scale);
        }
    }
}

TEST_CASE("quadrature variances match the closed forms") {
    SUBCASE("fig. 5(a) family") {
        for (double eps : {1.5, 8.0 / 3.0, 2.7, 20.0}) {
            auto fm = model_at(fig5a_params(), eps);
            auto qv = quadrature_variance(fm);
            CHECK(qv.xx_a == doctest::Approx(dx2_closed_form(0.2, 1.0, eps)).epsilon(1e-7));
            CHECK(qv.xx_b == doctest::Approx(qv.xx_a).epsilon(1e-9));
            // cross - direct = w/(kappa+w) = 1/2 for kappa_a = kappa_b
            CHECK(qv.cross_ab - qv.xx_a == doctest::Approx(0.5).epsilon(1e-7));
        }
        // the area null point sits at eps = 8/3 exactly
        auto fm = model_at(fig5a_params(), 8.0 / 3.0);
        CHECK(std::abs(quadrature_variance(fm).xx_a) < 1e-10);
        // frozen value at eps = 20
        auto fm20 = model_at(fig5a_params(), 20.0);
        CHECK(quadrature_variance(fm20).xx_a == doctest::Approx(-0.13684210526315788).epsilon(1e-8));
    }
    SUBCASE("fig. 4(a) at eps = 4: dx^2 = 1/12") {
        auto fm = model_at(fig4a_params(), 4.0);
        CHECK(quadrature_variance(fm).xx_a == doctest::Approx(1.0 / 12.0).epsilon(1e-8));
        CHECK(quadrature_variance(fm).xx_a > 0);  // super-poissonian side
    }
}

TEST_CASE("population correction: deflated integral, lyapunov-consistent") {
    auto fm = model_at(fig4a_params(), 4.0);
    auto pc = population_correction(fm);
    // x-sector <dx^2> = 1/12, deflated phase sector <dy^2> = 5/16 (the
    // damped phase-sum mode hybridized with gamma): (1/12 - 5/16)/4 = -7/384
    CHECK(pc.mode_a == doctest::Approx(-7.0 / 384.0).epsilon(1e-7));
    CHECK(pc.mode_a == doctest::Approx(covariance_by_lyapunov(fm)(3, 0)).epsilon(1e-6));
    CHECK(pc.total_a == doctest::Approx(fm.ss.n_a() + pc.mode_a));

    // far above threshold the correction is small against the mean field
    auto far = model_at(fig4a_params(), 20.0);
    auto pcf = population_correction(far);
    CHECK(std::abs(pcf.mode_a) < 0.05 * far.ss.n_a());
}

TEST_CASE("number statistics anchors of fig. 5(a)") {
    // unit-intensity normalization, the convention of the paper's quotes
    auto ns27 = number_statistics(model_at(fig5a_params(), 2.7));
    CHECK(ns27.g2_unit_a == doctest::Approx(0.99705882352941178).epsilon(1e-7));
    CHECK(std::abs(ns27.g2_unit_a - 1.0) < 0.02);
    auto ns20 = number_statistics(model_at(fig5a_params(), 20.0));
    CHECK(ns20.g2_unit_a == doctest::Approx(0.86315789473684212).epsilon(1e-7));
    CHECK(std::abs(ns20.g2_unit_a - 0.85) < 0.02);
    // these points sit at sub-photon mean fields; the x0^2-normalized op
    // output must carry the validity flag
    CHECK(ns20.validity_flag);
    CHECK(ns20.g_ab_unit > ns20.g2_unit_a);
}

TEST_CASE("g_ab stays above g2 along the fixed-intensity kappa scan") {
    ModelParams p = fig5a_params();
    for (double k = 1.0; k > 0.09; k *= 0.8) {
        p.kappa_a = p.kappa_b = k;
        const double mu = semiclassical::mu_for_intensity(p, 1.0);
        auto ss = semiclassical::steady_branch(p, mu);
        CHECK(ss.n_a() == doctest::Approx(1.0));
        auto ns = number_statistics(build_fluctuation_model(p, ss));
        CHECK(ns.g_ab > ns.g2_a);
        CHECK(ns.g2_a == doctest::Approx(ns.g2_unit_a).epsilon(1e-9));  // x0^2 = 1 here
    }
}

TEST_CASE("output spectrum anchors") {
    SUBCASE("V -> 1 at large frequency") {
        auto fm = model_at(fig5a_params(), 4.0);
        auto V = output_spectrum(fm, LaserMode::A, {100 * fm.params.kappa_a});
        CHECK(std::abs(V[0] - 1.0) < 1e-3);
    }
    SUBCASE("eps = 1.5 lies above shot noise everywhere") {
        auto fm = model_at(fig5a_params(), 1.5);
        auto grid = default_omega_grid(fm, 20.0, 241);
        auto V = output_spectrum(fm, LaserMode::A, grid);
        for (double v : V) CHECK(v > 1.0);
        CHECK(V[(grid.size() - 1) / 2] == doctest::Approx(2.5).epsilon(1e-9));
    }
    SUBCASE("eps = 2.7: attenuation and accentuation nearly cancel") {
        auto fm = model_at(fig5a_params(), 2.7);
        auto grid = default_omega_grid(fm, 20.0, 481);
        auto V = output_spectrum(fm, LaserMode::A, grid);
        double net = 0, total = 0;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            const double dw = grid[i + 1] - grid[i];
            net += 0.5 * (V[i] - 1.0 + V[i + 1] - 1.0) * dw;
            total += 0.5 * (std::abs(V[i] - 1.0) + std::abs(V[i + 1] - 1.0)) * dw;
        }
        // the exact null of the area sits at eps = 8/3; at the quoted 2.7
        // the residual imbalance is ~2.3% of the total area
        CHECK(std::abs(net) < 0.03 * total);
        auto fm0 = model_at(fig5a_params(), 8.0 / 3.0);
        CHECK(std::abs(quadrature_variance(fm0).xx_a) < 1e-10);
    }
    SUBCASE("eps = 20 squeezes at low frequency") {
        auto fm = model_at(fig5a_params(), 20.0);
        auto V = output_spectrum(fm, LaserMode::A, {0.0});
        CHECK(V[0] == doctest::Approx(0.50138504155124654).epsilon(1e-6));
        CHECK(V[0] < 1.0);
    }
}

TEST_CASE("intensity difference spectrum") {
    SUBCASE("perfect noise reduction at zero frequency without heating") {
        auto fm = model_at(fig5a_params(), 4.0);
        auto S = intensity_difference_spectrum(fm, {0.0});
        CHECK(std::abs(S.S_over_shot[0]) < 1e-6);
        // including unequal output couplings
        ModelParams p = fig5a_params();
        p.kappa_b = 0.5;
        auto S2 = intensity_difference_spectrum(model_at(p, 4.0), {0.0});
        CHECK(std::abs(S2.S_over_shot[0]) < 1e-6);
    }
    SUBCASE("heating at kappa_bc = kappa_a leaves partial reduction") {
        auto fm = model_at(fig5a_params(0.2), 4.0);
        auto S = intensity_difference_spectrum(fm, {0.0, 100 * 0.2});
        CHECK(S.S_over_shot[0] > 0.0);
        CHECK(S.S_over_shot[0] < 1.0);
        CHECK(S.S_over_shot[0] == doctest::Approx(0.2597).epsilon(2e-3));  // python cross-check
        CHECK(std::abs(S.S_over_shot[1] - 1.0) < 1e-3);
    }
}

TEST_CASE("default grid is symmetric, includes zero, reaches omega_max") {
    auto fm = model_at(fig5a_params(), 4.0);
    auto g = default_omega_grid(fm, 15.0, 101);
    CHECK(g[(g.size() - 1) / 2] == 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(g[i] == doctest::Approx(-g[g.size() - 1 - i]).epsilon(1e-12));
    CHECK(g.back() == doctest::Approx(15.0));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}
