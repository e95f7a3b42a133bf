#include "pairlaser/fock.hpp"

#include <Eigen/SparseLU>
#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <numeric>
#include <vector>

namespace pairlaser::fock {

namespace {

using Triplet = Eigen::Triplet<Complex>;

SparseC single_mode_ladder(int n_max) {
    SparseC a(n_max + 1, n_max + 1);
    std::vector<Triplet> t;
    t.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) t.emplace_back(n - 1, n, std::sqrt(double(n)));
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SparseC sparse_identity(std::size_t n) {
    SparseC I(n, n);
    I.setIdentity();
    return I;
}

SparseC kron(const SparseC& A, const SparseC& B) {
    SparseC out(A.rows() * B.rows(), A.cols() * B.cols());
    std::vector<Triplet> t;
    t.reserve(std::size_t(A.nonZeros()) * std::size_t(B.nonZeros()));
    for (int ka = 0; ka < A.outerSize(); ++ka)
        for (SparseC::InnerIterator ia(A, ka); ia; ++ia)
            for (int kb = 0; kb < B.outerSize(); ++kb)
                for (SparseC::InnerIterator ib(B, kb); ib; ++ib)
                    t.emplace_back(ia.row() * B.rows() + ib.row(),
                                   ia.col() * B.cols() + ib.col(),
                                   ia.value() * ib.value());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

// vec(A rho B) = (B^T (x) A) vec(rho), column stacking.
SparseC left_right(const SparseC& A, const SparseC& B) {
    return kron(SparseC(B.transpose()), A);
}

// Paper-form dissipator: [J rho, J^+] + [J, rho J^+] = 2 J rho J^+ - {J^+J, rho}.
SparseC dissipator(const SparseC& J) {
    const std::size_t d = J.rows();
    SparseC Jd = J.adjoint();
    SparseC JdJ = Jd * J;
    SparseC I = sparse_identity(d);
    SparseC out = 2.0 * kron(SparseC(J.conjugate()), J);
    out -= left_right(JdJ, I);
    out -= left_right(I, JdJ);
    return out;
}

SparseC commutator_superop(const SparseC& H) {
    const std::size_t d = H.rows();
    SparseC I = sparse_identity(d);
    SparseC out = left_right(H, I);
    out -= left_right(I, H);
    return Complex(0, -1) * out;
}

}  // namespace

int FockSpace::occupation(std::size_t index, Mode m) const {
    const std::size_t db = trunc.n_b + 1, dc = trunc.n_c + 1;
    switch (m) {
        case Mode::A: return int(index / (db * dc));
        case Mode::B: return int((index / dc) % db);
        default: return int(index % dc);
    }
}

SparseC mode_operator(Mode m, const Truncation& trunc) {
    trunc.validate();
    SparseC Ia = sparse_identity(trunc.n_a + 1);
    SparseC Ib = sparse_identity(trunc.n_b + 1);
    SparseC Ic = sparse_identity(trunc.n_c + 1);
    switch (m) {
        case Mode::A: return kron(kron(single_mode_ladder(trunc.n_a), Ib), Ic);
        case Mode::B: return kron(kron(Ia, single_mode_ladder(trunc.n_b)), Ic);
        default: return kron(kron(Ia, Ib), single_mode_ladder(trunc.n_c));
    }
}

DenseC Superoperator::apply(const DenseC& rho) const {
    const auto d = Eigen::Index(hilbert_dim());
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), d * d);
    Eigen::VectorXcd w = matrix * v;
    return Eigen::Map<const DenseC>(w.data(), d, d);
}

double Superoperator::rate_scale() const {
    double s = 0;
    for (int k = 0; k < matrix.outerSize(); ++k)
        for (SparseC::InnerIterator it(matrix, k); it; ++it)
            if (it.row() == it.col()) s = std::max(s, std::abs(it.value()));
    return s;
}

Superoperator build_liouvillian(const ModelParams& p, const Truncation& trunc) {
    p.validate();
    trunc.validate();

    SparseC a = mode_operator(Mode::A, trunc);
    SparseC b = mode_operator(Mode::B, trunc);
    SparseC c = mode_operator(Mode::C, trunc);
    SparseC ad = a.adjoint(), bd = b.adjoint(), cd = c.adjoint();

    // H_int = i eta (a^+ b^+ c - a b c^+)
    SparseC H = Complex(0, 1) * p.eta * SparseC(SparseC(ad * bd) * c - SparseC(a * b) * cd);
    if (p.pump.kind == PumpKind::Coherent && p.pump.mu != 0.0)
        H += Complex(0, 1) * p.pump.mu * SparseC(cd - c);

    SparseC L = commutator_superop(H);
    if (p.kappa_a != 0) L += p.kappa_a * dissipator(a);
    if (p.kappa_b != 0) L += p.kappa_b * dissipator(b);
    if (p.kappa_c != 0) L += p.kappa_c * dissipator(c);
    if (p.kappa_bc != 0) L += p.kappa_bc * dissipator(SparseC(cd * b));
    if (p.kappa_cb != 0) L += p.kappa_cb * dissipator(SparseC(bd * c));
    if (p.pump.kind == PumpKind::Incoherent) {
        if (p.pump.mu_in != 0) L += p.pump.mu_in * dissipator(cd);
        if (p.pump.mu_out != 0) L += p.pump.mu_out * dissipator(c);
    }

    Superoperator out;
    out.matrix = std::move(L);
    out.matrix.makeCompressed();
    out.trunc = trunc;
    out.pair_symmetric = (p.pump.kind == PumpKind::Incoherent);
    return out;
}

namespace {

// Zero-charge sector of the weak U(1)xU(1) symmetry: element |i><j| with
// i=(na,nb,nc), j=(ma,mb,mc) belongs iff na-ma = nb-mb = -(nc-mc).
std::vector<Eigen::Index> sector_indices(const Truncation& tr) {
    const Eigen::Index dim = Eigen::Index(tr.dim());
    const Eigen::Index db = tr.n_b + 1, dc = tr.n_c + 1;
    auto fock = [&](int ia, int ib, int ic) {
        return (Eigen::Index(ia) * db + ib) * dc + ic;
    };
    std::vector<Eigen::Index> idx;
    for (int d = -tr.n_c; d <= tr.n_c; ++d) {
        for (int ia = std::max(0, d); ia <= tr.n_a + std::min(0, d); ++ia)
            for (int ib = std::max(0, d); ib <= tr.n_b + std::min(0, d); ++ib)
                for (int ic = std::max(0, -d); ic <= tr.n_c + std::min(0, -d); ++ic) {
                    const int ja = ia - d, jb = ib - d, jc = ic + d;
                    idx.push_back(fock(ia, ib, ic) + dim * fock(ja, jb, jc));
                }
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

SparseC extract_submatrix(const SparseC& M, const std::vector<Eigen::Index>& idx) {
    std::vector<Eigen::Index> pos(M.rows(), -1);
    for (std::size_t k = 0; k < idx.size(); ++k) pos[idx[k]] = Eigen::Index(k);
    std::vector<Triplet> t;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const Eigen::Index col = idx[k];
        for (SparseC::InnerIterator it(M, col); it; ++it) {
            const Eigen::Index r = pos[it.row()];
            if (r >= 0) t.emplace_back(int(r), int(k), it.value());
        }
    }
    SparseC out(idx.size(), idx.size());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

// Solve L x = 0 with the row `pin` replaced by the trace functional.
// `diag_positions` lists, for every Hilbert index i, the position of the
// diagonal element |i><i| in the unknown vector (or -1 when outside it).
Eigen::VectorXcd pinned_solve(const SparseC& L, const std::vector<Eigen::Index>& diag_positions,
                              Eigen::Index pin) {
    const Eigen::Index n = L.rows();
    std::vector<Triplet> t;
    t.reserve(L.nonZeros() + diag_positions.size());
    for (int k = 0; k < L.outerSize(); ++k)
        for (SparseC::InnerIterator it(L, k); it; ++it)
            if (it.row() != pin) t.emplace_back(int(it.row()), int(it.col()), it.value());
    for (Eigen::Index p : diag_positions)
        if (p >= 0) t.emplace_back(int(pin), int(p), Complex(1, 0));
    SparseC A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();

    Eigen::SparseLU<SparseC> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("steady_state: trace-pinned system is singular "
                                 "(degenerate nullspace?)");
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs[pin] = 1.0;
    Eigen::VectorXcd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("steady_state: linear solve failed");
    return x;
}

double liouvillian_scale(const SparseC& L) {
    double s = 0;
    for (int k = 0; k < L.outerSize(); ++k)
        for (SparseC::InnerIterator it(L, k); it; ++it) s = std::max(s, std::abs(it.value()));
    return s > 0 ? s : 1.0;
}

}  // namespace

SteadyStateResult steady_state(const Superoperator& L, const SteadyStateOptions& opts) {
    const Eigen::Index d = Eigen::Index(L.hilbert_dim());
    const Eigen::Index n = d * d;
    const double scale = liouvillian_scale(L.matrix);

    SteadyStateResult res;
    Eigen::VectorXcd v;

    if (std::size_t(n) <= opts.lu_limit) {
        std::vector<Eigen::Index> diag(d);
        for (Eigen::Index i = 0; i < d; ++i) diag[i] = i * (d + 1);
        // only rows belonging to the trace dependency may be dropped
        v = pinned_solve(L.matrix, diag, diag[0]);
        if (opts.check_degeneracy) {
            Eigen::VectorXcd v2 = pinned_solve(L.matrix, diag, diag[d / 2]);
            if ((v - v2).norm() > 1e-7 * std::max(1.0, v.norm()))
                throw std::runtime_error("steady_state: solutions from two pinned rows "
                                         "disagree; nullspace looks degenerate");
        }
    } else if (L.pair_symmetric) {
        // The steady state of a charge-symmetric Liouvillian lives in the
        // zero-charge sector, which is drastically smaller than the full
        // superoperator. The full residual is still checked below.
        const auto idx = sector_indices(L.trunc);
        SparseC Ls = extract_submatrix(L.matrix, idx);
        std::vector<Eigen::Index> pos(n, -1);
        for (std::size_t k = 0; k < idx.size(); ++k) pos[idx[k]] = Eigen::Index(k);
        std::vector<Eigen::Index> diag(d);
        for (Eigen::Index i = 0; i < d; ++i) diag[i] = pos[i * (d + 1)];
        Eigen::VectorXcd xs = pinned_solve(Ls, diag, diag[0]);
        if (opts.check_degeneracy) {
            Eigen::VectorXcd xs2 = pinned_solve(Ls, diag, diag[d / 2]);
            if ((xs - xs2).norm() > 1e-7 * std::max(1.0, xs.norm()))
                throw std::runtime_error("steady_state: sector solutions disagree; "
                                         "nullspace looks degenerate");
        }
        v = Eigen::VectorXcd::Zero(n);
        for (std::size_t k = 0; k < idx.size(); ++k) v[idx[k]] = xs[k];
        res.used_sector_solver = true;
    } else {
        // Shifted inverse iteration with an iterative inner solver. The
        // shift keeps (L - sigma I) invertible; the iteration converges to
        // the eigenvector nearest the shift, i.e. the stationary state.
        const Complex sigma(scale * 1e-8, 0);
        SparseC A = L.matrix;
        for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) -= sigma;
        A.makeCompressed();
        Eigen::BiCGSTAB<SparseC, Eigen::IncompleteLUT<Complex>> solver;
        solver.preconditioner().setDroptol(1e-6);
        solver.preconditioner().setFillfactor(40);
        solver.setTolerance(1e-12);
        solver.setMaxIterations(4000);
        solver.compute(A);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("steady_state: preconditioner failed on the shifted system");
        // Maximally mixed start has nonzero overlap with the steady state.
        v = Eigen::VectorXcd::Zero(n);
        for (Eigen::Index i = 0; i < d; ++i) v[i * (d + 1)] = 1.0 / double(d);
        double resid = 1.0;
        for (int it = 0; it < 50 && resid > opts.residual_tol; ++it) {
            v = solver.solveWithGuess(v, v).eval();
            if (solver.info() != Eigen::Success && solver.error() > 1e-8)
                throw std::runtime_error("steady_state: inner BiCGSTAB solve failed");
            Complex tr = 0;
            for (Eigen::Index i = 0; i < d; ++i) tr += v[i * (d + 1)];
            if (std::abs(tr) < 1e-300)
                throw std::runtime_error("steady_state: iterate lost its trace");
            v /= tr;
            resid = (L.matrix * v).norm() / scale;
        }
    }

    Complex tr = 0;
    for (Eigen::Index i = 0; i < d; ++i) tr += v[i * (d + 1)];
    v /= tr;

    res.residual = (L.matrix * v).norm() / scale;
    if (res.residual > opts.residual_tol)
        throw std::runtime_error("steady_state: residual " + std::to_string(res.residual) +
                                 " above tolerance");

    DenseC rho = Eigen::Map<const DenseC>(v.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint().eval());  // remove rounding skew
    res.trace_error = std::abs(rho.trace() - Complex(1, 0));

    Eigen::SelfAdjointEigenSolver<DenseC> es(rho, Eigen::EigenvaluesOnly);
    res.min_eigenvalue = es.eigenvalues().minCoeff();
    if (res.min_eigenvalue < opts.positivity_tol)
        throw std::runtime_error("steady_state: negative eigenvalue " +
                                 std::to_string(res.min_eigenvalue) + " beyond tolerance");
    res.rho = std::move(rho);
    return res;
}

EvolveResult evolve(const Superoperator& L, const DenseC& rho0, double t, double dt) {
    if (!(dt > 0) || !(t >= 0)) throw std::invalid_argument("evolve: need dt > 0, t >= 0");
    const double rate = L.rate_scale();
    if (dt * rate > 0.1)
        throw std::invalid_argument("evolve: dt too large, dt*max_rate = " +
                                    std::to_string(dt * rate) + " > 0.1");
    const Eigen::Index d = Eigen::Index(L.hilbert_dim());
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), d * d);
    const double tr0 = std::abs(rho0.trace());

    const long steps = std::lround(t / dt);
    for (long s = 0; s < steps; ++s) {
        Eigen::VectorXcd k1 = L.matrix * v;
        Eigen::VectorXcd k2 = L.matrix * (v + (0.5 * dt) * k1).eval();
        Eigen::VectorXcd k3 = L.matrix * (v + (0.5 * dt) * k2).eval();
        Eigen::VectorXcd k4 = L.matrix * (v + dt * k3).eval();
        v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    EvolveResult out;
    out.rho = Eigen::Map<const DenseC>(v.data(), d, d);
    out.trace_drift = std::abs(std::abs(out.rho.trace()) - tr0);
    if (out.trace_drift > 1e-8)
        throw std::runtime_error("evolve: trace drift " + std::to_string(out.trace_drift) +
                                 " exceeds 1e-8");
    return out;
}

ObservableSet observables(const DenseC& rho, const Truncation& trunc, const ModelParams& p) {
    FockSpace fs(trunc);
    const std::size_t d = fs.dim();
    ObservableSet o;
    o.joint = Eigen::MatrixXd::Zero(trunc.n_a + 1, trunc.n_b + 1);

    double g2num_a = 0, g2num_b = 0, g2num_c = 0, cross_ab = 0;
    for (std::size_t i = 0; i < d; ++i) {
        const double pi = rho(i, i).real();
        const int na = fs.occupation(i, Mode::A);
        const int nb = fs.occupation(i, Mode::B);
        const int nc = fs.occupation(i, Mode::C);
        o.n_a += na * pi;
        o.n_b += nb * pi;
        o.n_c += nc * pi;
        g2num_a += double(na) * (na - 1) * pi;
        g2num_b += double(nb) * (nb - 1) * pi;
        g2num_c += double(nc) * (nc - 1) * pi;
        cross_ab += double(na) * nb * pi;
        o.joint(na, nb) += pi;
        if (na == trunc.n_a) o.edge_mass_a += pi;
        if (nb == trunc.n_b) o.edge_mass_b += pi;
        if (nc == trunc.n_c) o.edge_mass_c += pi;
    }
    o.atom_emission = 2.0 * p.kappa_b * o.n_b;
    o.photon_emission = 2.0 * p.kappa_a * o.n_a;
    if (o.n_a > 1e-12) o.g2_a = g2num_a / (o.n_a * o.n_a);
    if (o.n_b > 1e-12) o.g2_b = g2num_b / (o.n_b * o.n_b);
    if (o.n_c > 1e-12) o.g2_c = g2num_c / (o.n_c * o.n_c);
    if (o.n_a > 1e-12 && o.n_b > 1e-12) o.g_ab = cross_ab / (o.n_a * o.n_b);
    o.truncation_flag = o.edge_mass_a > 1e-4 || o.edge_mass_b > 1e-4 || o.edge_mass_c > 1e-4;
    return o;
}

DenseC coherent_state(double amplitude, int n_max) {
    Eigen::VectorXcd psi(n_max + 1);
    double logfact = 0;
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) logfact += std::log(double(n));
        psi[n] = std::exp(n * std::log(std::abs(amplitude) + 1e-300) - 0.5 * logfact);
    }
    psi.normalize();
    return psi * psi.adjoint();
}

DenseC thermal_state(double mean_occupation, int n_max) {
    const double q = mean_occupation / (1.0 + mean_occupation);
    Eigen::VectorXd pops(n_max + 1);
    for (int n = 0; n <= n_max; ++n) pops[n] = std::pow(q, n);
    pops /= pops.sum();
    DenseC rho = DenseC::Zero(n_max + 1, n_max + 1);
    for (int n = 0; n <= n_max; ++n) rho(n, n) = pops[n];
    return rho;
}

}  // namespace pairlaser::fock
