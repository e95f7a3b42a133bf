#include "pairlaser/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pairlaser::fluctuations {

namespace {

constexpr Complex kImag(0.0, 1.0);

// 24-point Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre24 {
    static const double nodes[12];
    static const double weights[12];
    template <class F>
    static auto integrate(double a, double b, F&& f) {
        using R = std::decay_t<decltype(f(0.0))>;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        R acc = R(f(mid + half * nodes[0]) * weights[0]);
        acc += f(mid - half * nodes[0]) * weights[0];
        for (int i = 1; i < 12; ++i) {
            acc += f(mid + half * nodes[i]) * weights[i];
            acc += f(mid - half * nodes[i]) * weights[i];
        }
        return R(acc * half);
    }
};
const double GaussLegendre24::nodes[12] = {
    0.0640568928626056260850430826247450385909,
    0.1911188674736163091586398207570696318404,
    0.3150426796961633743867932913198102407864,
    0.4337935076260451384870842319133497124524,
    0.5454214713888395356583756172183723700107,
    0.6480936519369755692524957869107476266696,
    0.7401241915785543642438281030999784255232,
    0.8200019859739029219539498726697452080761,
    0.8864155270044010342131543419821967550873,
    0.9382745520027327585236490017087214496548,
    0.9747285559713094981983919930081690617411,
    0.9951872199970213601799974097007368118745};
const double GaussLegendre24::weights[12] = {
    0.1279381953467521569740561652246953718517,
    0.1258374563468282961213753825111836887264,
    0.1216704729278033912044631534762624256070,
    0.1155056680537256013533444839067835598622,
    0.1074442701159656347825773424466062227946,
    0.0976186521041138882698806644642471544279,
    0.0861901615319532759171852029837426671850,
    0.0733464814110803057340336152531165181193,
    0.0592985849154367807463677585001085845412,
    0.0442774388174198061686027482113382288593,
    0.0285313886289336631813078159518782864491,
    0.0123412297999871995468056670700372915759};

Matrix6c resolvent_product(const FluctuationModel& fm, double omega) {
    // (-iw - M)^-1 D_defl (iw - M)^-T via two LU solves; omega must avoid
    // the exact symmetry pole at 0 (handled by the eigenbasis path there).
    Matrix6c left = (-kImag * omega * Matrix6c::Identity()) - fm.M.cast<Complex>();
    Matrix6c right = (kImag * omega * Matrix6c::Identity()) - fm.M.cast<Complex>();
    Eigen::PartialPivLU<Matrix6c> lu_l(left), lu_r(right);
    Matrix6c X = lu_l.solve(fm.D_deflated.cast<Complex>());
    // X (iw - M)^-T  ==  ((iw - M)^-1 X^T)^T
    return lu_r.solve(X.transpose()).transpose();
}

void require_spectra_allowed(const FluctuationModel& fm, const char* what) {
    if (fm.ss.branch != semiclassical::Branch::Above)
        throw std::invalid_argument(std::string(what) +
                                    ": stationary spectra are defined on the lasing branch only");
    if (!fm.damped)
        throw std::runtime_error(std::string(what) +
                                 ": drift matrix is not Hurwitz on the damped subspace");
}

double q_entry(const Matrix6c& C, int x, int y, double* max_imag = nullptr) {
    // C_ji(w) = conj(C_ij(w)) for real (M, D), so the symmetrized cross
    // spectrum is exactly real; the raw cross entries carry an odd
    // imaginary part that cancels between the xy and yx orderings.
    const Complex q = 0.5 * (C(x, y) + C(x, y + 3) + C(x + 3, y) + C(x + 3, y + 3) +
                             C(y, x) + C(y, x + 3) + C(y + 3, x) + C(y + 3, x + 3));
    if (max_imag) *max_imag = std::max(*max_imag, std::abs(q.imag()));
    return q.real();
}

}  // namespace

double FluctuationModel::rate_scale() const {
    double s = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) s = std::max(s, std::abs(M(i, j)));
    return s > 0 ? s : 1.0;
}

FluctuationModel build_fluctuation_model(const ModelParams& p,
                                         const semiclassical::SemiclassicalState& ss) {
    p.validate();
    FluctuationModel fm;
    fm.params = p;
    fm.ss = ss;
    const double a0 = ss.alpha0, b0 = ss.beta0, g0 = ss.gamma0;
    const double eta = p.eta, kbc = p.kappa_bc;

    Eigen::Matrix3d A, B;
    A << -p.kappa_a, 0, eta * b0,
         0, -p.kappa_b - kbc * (g0 * g0 + 1), eta * a0 - kbc * b0 * g0,
         -eta * b0, -eta * a0 + kbc * b0 * g0, -p.kappa_c + kbc * b0 * b0;
    B << 0, eta * g0, 0,
         eta * g0, 0, -kbc * b0 * g0,
         0, kbc * b0 * g0, 0;
    fm.M.topLeftCorner<3, 3>() = A;
    fm.M.bottomRightCorner<3, 3>() = A;
    fm.M.topRightCorner<3, 3>() = B;
    fm.M.bottomLeftCorner<3, 3>() = B;

    fm.D(0, 1) = fm.D(1, 0) = eta * g0;
    fm.D(3, 4) = fm.D(4, 3) = eta * g0;
    fm.D(1, 2) = fm.D(2, 1) = -kbc * b0 * g0;
    fm.D(4, 5) = fm.D(5, 4) = -kbc * b0 * g0;
    fm.D(2, 5) = fm.D(5, 2) = kbc * b0 * b0;

    analyze(fm);
    return fm;
}

void analyze(FluctuationModel& fm) {
    const double a0 = fm.ss.alpha0, b0 = fm.ss.beta0;
    Eigen::EigenSolver<Matrix6d> es(fm.M);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("build_fluctuation_model: eigendecomposition failed");
    fm.V = es.eigenvectors();
    fm.lambda = es.eigenvalues();
    fm.Vinv = fm.V.inverse();

    const double scale = fm.rate_scale();
    int zi = -1;
    double zmin = 1e-9 * scale;
    for (int i = 0; i < 6; ++i) {
        if (std::abs(fm.lambda[i]) < zmin) { zmin = std::abs(fm.lambda[i]); zi = i; }
    }
    fm.zero_mode = zi;
    fm.damped = true;
    for (int i = 0; i < 6; ++i)
        if (i != zi && fm.lambda[i].real() >= -1e-12 * scale) fm.damped = false;

    fm.D_deflated = fm.D;
    if (zi >= 0) {
        // phase rotation tangent; exact above threshold
        fm.v0 << a0, -b0, 0, -a0, b0, 0;
        // left null vector: rows of V^-1 are the left eigenvectors
        Vector6c u = fm.Vinv.row(zi).transpose();
        // the zero eigenvalue is real so the vector can be made real
        double nrm = 0;
        for (int i = 0; i < 6; ++i) nrm = std::max(nrm, std::abs(u[i]));
        Complex phase = 1.0;
        for (int i = 0; i < 6; ++i)
            if (std::abs(u[i]) > 0.5 * nrm) { phase = u[i] / std::abs(u[i]); break; }
        for (int i = 0; i < 6; ++i) fm.u0[i] = (u[i] / phase).real();
        const double uv = fm.u0.dot(fm.v0);
        if (std::abs(uv) < 1e-12)
            throw std::runtime_error("build_fluctuation_model: defective symmetry mode");
        Matrix6d P = Matrix6d::Identity() - (fm.v0 * fm.u0.transpose()) / uv;
        fm.D_deflated = P * fm.D * P.transpose();
    }
}

Matrix6c correlation_matrix(const FluctuationModel& fm, double omega) {
    // Eigenbasis evaluation; the deflated numerator keeps it regular at 0.
    Matrix6c Dt = fm.Vinv * fm.D_deflated.cast<Complex>() * fm.Vinv.transpose();
    Matrix6c G;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            if (fm.zero_mode >= 0 && (i == fm.zero_mode || j == fm.zero_mode)) {
                G(i, j) = 0;
                continue;
            }
            const Complex den = (-kImag * omega - fm.lambda[i]) * (kImag * omega - fm.lambda[j]);
            G(i, j) = Dt(i, j) / den;
        }
    }
    return fm.V * G * fm.V.transpose();
}

Matrix6d covariance_by_quadrature(const FluctuationModel& fm) {
    require_spectra_allowed(fm, "covariance_by_quadrature");
    double rmin = std::numeric_limits<double>::max(), smax = 0;
    for (int i = 0; i < 6; ++i) {
        if (i == fm.zero_mode) continue;
        rmin = std::min(rmin, std::abs(fm.lambda[i].real()));
        smax = std::max(smax, std::abs(fm.lambda[i]));
    }
    const double cut = 20.0 * smax;
    // geometric panels from rmin/32 out to the cut, then a 1/w tail map
    std::vector<double> edges{0.0};
    double e = std::max(rmin, 1e-8 * smax) / 32.0;
    while (e < cut) { edges.push_back(e); e *= 1.9; }
    edges.push_back(cut);

    auto eval = [&](double w) -> Matrix6c { return resolvent_product(fm, w); };
    Matrix6c acc = Matrix6c::Zero();
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        acc += GaussLegendre24::integrate(edges[k], edges[k + 1], eval);
        acc += GaussLegendre24::integrate(-edges[k + 1], -edges[k], eval);
    }
    // tails: substitute u = 1/w, dw = du/u^2; the residual beyond
    // w = 1e9*cut is O(1e-9) relative and is dropped to avoid overflow
    auto tail = [&](double u) -> Matrix6c {
        const double w = 1.0 / u;
        return eval(w) * (w * w);
    };
    acc += GaussLegendre24::integrate(1e-9 / cut, 1.0 / cut, tail);
    auto tail_neg = [&](double u) -> Matrix6c {
        const double w = -1.0 / u;
        return eval(w) * (w * w);
    };
    acc += GaussLegendre24::integrate(1e-9 / cut, 1.0 / cut, tail_neg);

    Matrix6d out = acc.real() / (2.0 * M_PI);
    const double im = acc.imag().cwiseAbs().maxCoeff();
    if (im > 1e-8 * std::max(1.0, acc.real().cwiseAbs().maxCoeff()))
        throw std::runtime_error("covariance_by_quadrature: nonreal covariance");
    return out;
}

Matrix6d covariance_by_lyapunov(const FluctuationModel& fm) {
    require_spectra_allowed(fm, "covariance_by_lyapunov");
    using M36 = Eigen::Matrix<double, 36, 36>;
    using V36 = Eigen::Matrix<double, 36, 1>;
    M36 K = M36::Zero();
    const Matrix6d I = Matrix6d::Identity();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 6; ++k)
                for (int l = 0; l < 6; ++l)
                    // (I (x) M + M (x) I) acting on column-stacked S
                    K(i + 6 * j, k + 6 * l) = I(j, l) * fm.M(i, k) + fm.M(j, l) * I(i, k);
    V36 rhs;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) rhs(i + 6 * j) = -fm.D_deflated(i, j);
    Eigen::CompleteOrthogonalDecomposition<M36> cod(K);
    V36 x = cod.solve(rhs);
    Matrix6d S;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) S(i, j) = x(i + 6 * j);
    S = 0.5 * (S + S.transpose().eval());
    if (fm.zero_mode >= 0) {
        // pick the solution with no symmetry-mode component
        const double uv = fm.u0.dot(fm.v0);
        const double c = fm.u0.transpose() * S * fm.u0;
        S -= (c / (uv * uv)) * (fm.v0 * fm.v0.transpose());
    }
    return S;
}

PopulationCorrection population_correction(const FluctuationModel& fm) {
    const Matrix6d S = covariance_by_quadrature(fm);
    PopulationCorrection pc;
    pc.mode_a = S(3, 0);
    pc.mode_b = S(4, 1);
    pc.mode_c = S(5, 2);
    pc.total_a = fm.ss.n_a() + pc.mode_a;
    pc.total_b = fm.ss.n_b() + pc.mode_b;
    pc.total_c = fm.ss.n_c() + pc.mode_c;
    return pc;
}

QuadratureVariance quadrature_variance(const FluctuationModel& fm) {
    const Matrix6d S = covariance_by_quadrature(fm);
    QuadratureVariance qv;
    auto q = [&](int x, int y) { return S(x, y) + S(x, y + 3) + S(x + 3, y) + S(x + 3, y + 3); };
    qv.xx_a = q(0, 0);
    qv.xx_b = q(1, 1);
    qv.xx_c = q(2, 2);
    qv.cross_ab = q(0, 1);
    return qv;
}

NumberStatistics number_statistics(const FluctuationModel& fm) {
    const Matrix6d S = covariance_by_quadrature(fm);
    auto q = [&](int x, int y) { return S(x, y) + S(x, y + 3) + S(x + 3, y) + S(x + 3, y + 3); };
    const double dx2a = q(0, 0), dx2b = q(1, 1), cross = q(0, 1);
    const double Ia = fm.ss.n_a(), Ib = fm.ss.n_b();

    NumberStatistics ns;
    ns.g2_a = 1.0 + dx2a / Ia;
    ns.g2_b = 1.0 + dx2b / Ib;
    ns.g_ab = 1.0 + cross / (fm.ss.alpha0 * fm.ss.beta0);
    ns.g2_unit_a = 1.0 + dx2a;
    ns.g2_unit_b = 1.0 + dx2b;
    ns.g_ab_unit = 1.0 + cross;
    const double corr = S(3, 0);
    ns.validity = corr * corr / (Ia * std::abs(dx2a) + 1e-300);
    ns.validity_flag = ns.validity > 0.1;
    return ns;
}

std::vector<double> output_spectrum(const FluctuationModel& fm, LaserMode mode,
                                    const std::vector<double>& omega) {
    require_spectra_allowed(fm, "output_spectrum");
    const int x = (mode == LaserMode::A) ? 0 : 1;
    const double kap = (mode == LaserMode::A) ? fm.params.kappa_a : fm.params.kappa_b;
    std::vector<double> V;
    V.reserve(omega.size());
    double max_imag = 0;
    for (double w : omega) {
        const Matrix6c C = correlation_matrix(fm, w);
        V.push_back(1.0 + 2.0 * kap * q_entry(C, x, x, &max_imag));
    }
    if (max_imag > 1e-10)
        throw std::runtime_error("output_spectrum: nonreal spectrum, |Im| = " +
                                 std::to_string(max_imag));
    return V;
}

IntensityDifferenceSpectrum intensity_difference_spectrum(const FluctuationModel& fm,
                                                          const std::vector<double>& omega) {
    require_spectra_allowed(fm, "intensity_difference_spectrum");
    const double ka = fm.params.kappa_a, kb = fm.params.kappa_b;
    const double a0 = fm.ss.alpha0, b0 = fm.ss.beta0;
    IntensityDifferenceSpectrum out;
    out.omega = omega;
    out.shot = 2.0 * ka * a0 * a0 + 2.0 * kb * b0 * b0;
    double max_imag = 0;
    for (double w : omega) {
        const Matrix6c C = correlation_matrix(fm, w);
        const double Qaa = q_entry(C, 0, 0, &max_imag);
        const double Qbb = q_entry(C, 1, 1, &max_imag);
        const double Qab = q_entry(C, 0, 1, &max_imag);
        const double S = out.shot + (2 * ka * a0) * (2 * ka * a0) * Qaa +
                         (2 * kb * b0) * (2 * kb * b0) * Qbb - 8 * ka * kb * a0 * b0 * Qab;
        out.S.push_back(S);
        out.S_over_shot.push_back(S / out.shot);
    }
    if (max_imag > 1e-10)
        throw std::runtime_error("intensity_difference_spectrum: nonreal spectrum");
    return out;
}

std::vector<double> default_omega_grid(const FluctuationModel& fm, double omega_max,
                                       int points) {
    if (points < 3 || !(omega_max > 0))
        throw std::invalid_argument("default_omega_grid: need points >= 3, omega_max > 0");
    double rmin = std::numeric_limits<double>::max();
    for (int i = 0; i < 6; ++i) {
        if (i == fm.zero_mode) continue;
        rmin = std::min(rmin, std::abs(fm.lambda[i].real()));
    }
    const double inner = std::min(10.0 * rmin, omega_max);
    const int half = (points - 1) / 2;
    const int n_inner = std::max(1, (2 * half) / 3);
    std::vector<double> pos;
    for (int i = 1; i <= n_inner; ++i) pos.push_back(inner * i / n_inner);
    if (inner < omega_max) {
        const int n_outer = half - n_inner;
        for (int i = 1; i <= n_outer; ++i)
            pos.push_back(inner * std::pow(omega_max / inner, double(i) / n_outer));
    }
    std::vector<double> grid;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) grid.push_back(-*it);
    grid.push_back(0.0);
    for (double w : pos) grid.push_back(w);
    return grid;
}

}  // namespace pairlaser::fluctuations
