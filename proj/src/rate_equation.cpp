#include "pairlaser/rate_equation.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

namespace pairlaser::rate {

void RateParams::validate() const {
    if (!(eta >= 0)) throw std::invalid_argument("rate: eta must be >= 0");
    if (kappa_a < 0 || kappa_b < 0) throw std::invalid_argument("rate: kappas must be >= 0");
    if (mu_in < 0 || mu_out < 0) throw std::invalid_argument("rate: pump rates must be >= 0");
    if (!(mu_in + mu_out > 0)) throw std::invalid_argument("rate: mu_in + mu_out must be > 0");
}

std::pair<double, double> emission_absorption_rates(const RateParams& rp, int n, int m) {
    if (n < 0 || m < 0) throw std::invalid_argument("rate: n, m must be >= 0");
    const double s = double(n) * double(m) * rp.R();
    const double f = s / (1.0 + s);
    return {rp.mu_in * f, rp.mu_out * f};
}

RateGenerator build_rate_generator(const RateParams& rp, int N, int M) {
    rp.validate();
    if (N < 2 || M < 2) throw std::invalid_argument("rate: truncation sizes must be >= 2");
    RateGenerator g;
    g.N = N;
    g.M = M;
    std::vector<Eigen::Triplet<double>> t;
    for (int n = 0; n <= N; ++n) {
        for (int m = 0; m <= M; ++m) {
            const Eigen::Index j = g.index(n, m);
            double out = 0;
            if (n < N && m < M) {
                const double A = emission_absorption_rates(rp, n + 1, m + 1).first;
                if (A != 0) { t.emplace_back(g.index(n + 1, m + 1), j, A); out += A; }
            } else if (rp.mu_in > 0 && n > 0 && m > 0) {
                g.edge_flux_suppressed = true;
            }
            if (n > 0 && m > 0) {
                const double B = emission_absorption_rates(rp, n, m).second;
                if (B != 0) { t.emplace_back(g.index(n - 1, m - 1), j, B); out += B; }
            }
            if (n > 0) { t.emplace_back(g.index(n - 1, m), j, 2.0 * rp.kappa_a * n); out += 2.0 * rp.kappa_a * n; }
            if (m > 0) { t.emplace_back(g.index(n, m - 1), j, 2.0 * rp.kappa_b * m); out += 2.0 * rp.kappa_b * m; }
            if (out != 0) t.emplace_back(j, j, -out);
        }
    }
    g.matrix.resize(Eigen::Index(N + 1) * (M + 1), Eigen::Index(N + 1) * (M + 1));
    g.matrix.setFromTriplets(t.begin(), t.end());
    g.matrix.makeCompressed();
    return g;
}

void JointDistribution::check_invariants() const {
    if (P.minCoeff() < -1e-12)
        throw std::runtime_error("joint distribution: negative entry " +
                                 std::to_string(P.minCoeff()));
    if (std::abs(P.sum() - 1.0) > 1e-10)
        throw std::runtime_error("joint distribution: normalization off by " +
                                 std::to_string(P.sum() - 1.0));
}

JointDistribution rate_steady_state(const RateGenerator& gen) {
    const Eigen::Index n = gen.matrix.rows();
    // Trace-replaced solve: first row becomes the normalization.
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < gen.matrix.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(gen.matrix, k); it; ++it)
            if (it.row() != 0) t.emplace_back(int(it.row()), int(it.col()), it.value());
    for (Eigen::Index j = 0; j < n; ++j) t.emplace_back(0, int(j), 1.0);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("rate_steady_state: singular generator (degenerate nullspace?)");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[0] = 1.0;
    Eigen::VectorXd x = lu.solve(rhs);

    double scale = 0;
    for (int k = 0; k < gen.matrix.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(gen.matrix, k); it; ++it)
            scale = std::max(scale, std::abs(it.value()));
    const double resid = (gen.matrix * x).norm() / (scale > 0 ? scale : 1.0);
    if (resid > 1e-10)
        throw std::runtime_error("rate_steady_state: residual " + std::to_string(resid));

    JointDistribution out;
    out.P = Eigen::Map<const Eigen::MatrixXd>(x.data(), gen.M + 1, gen.N + 1).transpose();
    // map: x[index(n,m)] with m fastest; Map reads column-major so columns
    // run over m. Transpose puts n on rows.
    out.residual = resid;
    out.edge_mass_n = out.P.row(gen.N).sum();
    out.edge_mass_m = out.P.col(gen.M).sum();
    out.truncation_flag = out.edge_mass_n > 1e-4 || out.edge_mass_m > 1e-4;
    out.check_invariants();
    return out;
}

MomentSet moments(const JointDistribution& jd) {
    const auto& P = jd.P;
    MomentSet ms;
    double g2num_n = 0, g2num_m = 0;
    for (Eigen::Index n = 0; n < P.rows(); ++n) {
        for (Eigen::Index m = 0; m < P.cols(); ++m) {
            const double p = P(n, m);
            ms.mean_n += n * p;
            ms.mean_m += m * p;
            ms.n2 += double(n) * n * p;
            ms.m2 += double(m) * m * p;
            ms.nm += double(n) * m * p;
            g2num_n += double(n) * (n - 1) * p;
            g2num_m += double(m) * (m - 1) * p;
        }
    }
    ms.var_diff = ms.n2 + ms.m2 - 2 * ms.nm -
                  (ms.mean_n - ms.mean_m) * (ms.mean_n - ms.mean_m);
    if (ms.mean_n > 1e-9) ms.g2_n = g2num_n / (ms.mean_n * ms.mean_n);
    if (ms.mean_m > 1e-9) ms.g2_m = g2num_m / (ms.mean_m * ms.mean_m);
    if (ms.mean_n > 1e-9 && ms.mean_m > 1e-9) ms.g_nm = ms.nm / (ms.mean_n * ms.mean_m);
    return ms;
}

MomentSet analytic_above_threshold(const RateParams& rp) {
    rp.validate();
    if (!(rp.mu_in > rp.mu_out))
        throw std::invalid_argument("analytic_above_threshold: requires mu_in > mu_out");
    const double gain = rp.mu_in - rp.mu_out;
    const double sum = rp.mu_in + rp.mu_out;

    MomentSet ms;
    ms.mean_n = gain / (2.0 * rp.kappa_a);
    ms.mean_m = gain / (2.0 * rp.kappa_b);
    ms.n2 = (2.0 * (gain + rp.kappa_a) * ms.mean_n + sum) / (4.0 * rp.kappa_a);
    ms.m2 = (2.0 * (gain + rp.kappa_b) * ms.mean_m + sum) / (4.0 * rp.kappa_b);
    ms.nm = (gain * (ms.mean_n + ms.mean_m) + sum) / (2.0 * (rp.kappa_a + rp.kappa_b));
    ms.var_diff = ms.n2 + ms.m2 - 2 * ms.nm -
                  (ms.mean_n - ms.mean_m) * (ms.mean_n - ms.mean_m);
    if (rp.kappa_a == rp.kappa_b) {
        // The paper's displayed equal-kappa forms.
        const double k = rp.kappa_a;
        ms.g2_n = 1.0 + (rp.mu_out / (2.0 * k)) / (ms.mean_n * ms.mean_n);
        ms.g2_m = ms.g2_n;
        ms.g_nm = *ms.g2_n + (rp.mu_out / (2.0 * k)) / ms.mean_n;
        ms.var_diff = (ms.mean_n + ms.mean_m) / 2.0;
    } else {
        ms.g2_n = (ms.n2 - ms.mean_n) / (ms.mean_n * ms.mean_n);
        ms.g2_m = (ms.m2 - ms.mean_m) / (ms.mean_m * ms.mean_m);
        ms.g_nm = ms.nm / (ms.mean_n * ms.mean_m);
    }
    ms.validity_flag = gain > 2.0 * std::min(rp.kappa_a, rp.kappa_b) * rp.validity_ratio;
    return ms;
}

ReducedState ReducedState::vacuum(int N, int M) {
    ReducedState s;
    s.p0 = Eigen::MatrixXd::Zero(N + 1, M + 1);
    s.p1 = Eigen::MatrixXd::Zero(N + 1, M + 1);
    s.V = Eigen::MatrixXd::Zero(N + 1, M + 1);
    s.p0(0, 0) = 1.0;
    return s;
}

void reduced_derivative(const RateParams& rp, const ReducedState& s,
                        Eigen::MatrixXd& dp0, Eigen::MatrixXd& dp1, Eigen::MatrixXd& dV) {
    const int N = int(s.p0.rows()) - 1, M = int(s.p0.cols()) - 1;
    dp0.setZero(N + 1, M + 1);
    dp1.setZero(N + 1, M + 1);
    dV.setZero(N + 1, M + 1);
    const double ka = rp.kappa_a, kb = rp.kappa_b;
    const double mi = rp.mu_in, mo = rp.mu_out;

    for (int n = 0; n <= N; ++n) {
        for (int m = 0; m <= M; ++m) {
            const double sq = std::sqrt(double(n) * m);
            double d0 = rp.eta * sq * s.V(n, m);
            double d1 = 0;
            if (n < N && m < M)
                d1 -= rp.eta * std::sqrt(double(n + 1) * (m + 1)) * s.V(n + 1, m + 1);
            // photon loss / atom out-coupling act identically on both sheets
            double loss0 = 0, loss1 = 0;
            if (n < N) {
                loss0 += 2 * ka * (n + 1) * s.p0(n + 1, m);
                loss1 += 2 * ka * (n + 1) * s.p1(n + 1, m);
            }
            loss0 -= 2 * ka * n * s.p0(n, m);
            loss1 -= 2 * ka * n * s.p1(n, m);
            if (m < M) {
                loss0 += 2 * kb * (m + 1) * s.p0(n, m + 1);
                loss1 += 2 * kb * (m + 1) * s.p1(n, m + 1);
            }
            loss0 -= 2 * kb * m * s.p0(n, m);
            loss1 -= 2 * kb * m * s.p1(n, m);
            dp0(n, m) = d0 + loss0 - 2 * mi * s.p0(n, m) + 2 * mo * s.p1(n, m);
            dp1(n, m) = d1 + loss1 + 2 * mi * s.p0(n, m) - 2 * mo * s.p1(n, m);

            if (n >= 1 && m >= 1) {
                double dv = -(mi + mo) * s.V(n, m);
                dv += 2 * rp.eta * sq * (s.p1(n - 1, m - 1) - s.p0(n, m));
                if (n < N) dv += 2 * ka * std::sqrt(double(n) * (n + 1)) * s.V(n + 1, m);
                dv -= (2 * n - 1) * ka * s.V(n, m);
                if (m < M) dv += 2 * kb * std::sqrt(double(m) * (m + 1)) * s.V(n, m + 1);
                dv -= (2 * m - 1) * kb * s.V(n, m);
                dV(n, m) = dv;
            }
        }
    }
}

ReducedState integrate_reduced_system(const RateParams& rp, const ReducedState& s0,
                                      double t, double dt) {
    rp.validate();
    if (!(dt > 0) || dt * (rp.mu_in + rp.mu_out) > 0.1)
        throw std::invalid_argument("integrate_reduced_system: dt must resolve mu_in+mu_out "
                                    "(dt*(mu_in+mu_out) <= 0.1)");
    ReducedState s = s0;
    const double norm0 = s.norm();
    const long steps = std::lround(t / dt);
    Eigen::MatrixXd k0, k1, kv, a0, a1, av, b0, b1, bv, c0, c1, cv, t0, t1, tv;
    for (long step = 0; step < steps; ++step) {
        reduced_derivative(rp, s, k0, k1, kv);
        ReducedState h{s.p0 + 0.5 * dt * k0, s.p1 + 0.5 * dt * k1, s.V + 0.5 * dt * kv};
        reduced_derivative(rp, h, a0, a1, av);
        h = ReducedState{s.p0 + 0.5 * dt * a0, s.p1 + 0.5 * dt * a1, s.V + 0.5 * dt * av};
        reduced_derivative(rp, h, b0, b1, bv);
        h = ReducedState{s.p0 + dt * b0, s.p1 + dt * b1, s.V + dt * bv};
        reduced_derivative(rp, h, c0, c1, cv);
        s.p0 += dt / 6.0 * (k0 + 2 * a0 + 2 * b0 + c0);
        s.p1 += dt / 6.0 * (k1 + 2 * a1 + 2 * b1 + c1);
        s.V += dt / 6.0 * (kv + 2 * av + 2 * bv + cv);
    }
    if (std::abs(s.norm() - norm0) > 1e-6)
        throw std::runtime_error("integrate_reduced_system: normalization drifted by " +
                                 std::to_string(s.norm() - norm0));
    return s;
}

}  // namespace pairlaser::rate
