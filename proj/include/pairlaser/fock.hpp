#pragma once

#include <complex>
#include <optional>
#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pairlaser/model.hpp"

namespace pairlaser::fock {

using Complex = std::complex<double>;
using SparseC = Eigen::SparseMatrix<Complex>;
using DenseC = Eigen::MatrixXcd;

enum class Mode { A, B, C };

// Basis |n_a, n_b, n_c> with the a index slowest and the c index fastest:
// flat index = (n_a*(Nb+1) + n_b)*(Nc+1) + n_c.
struct FockSpace {
    Truncation trunc;
    explicit FockSpace(const Truncation& t) : trunc(t) { t.validate(); }

    std::size_t dim() const { return trunc.dim(); }
    int occupation(std::size_t index, Mode m) const;
};

// Annihilation operator of one mode embedded in the tensor space;
// <n-1|op|n> = sqrt(n).
SparseC mode_operator(Mode m, const Truncation& trunc);

// Superoperator on column-stacked density matrices, vec index = i + dim*j.
struct Superoperator {
    SparseC matrix;             // dim^2 x dim^2
    Truncation trunc;
    bool pair_symmetric = false;  // true when the weak U(1)xU(1) charge
                                  // symmetry holds (incoherent pump), which
                                  // confines the steady state to the
                                  // zero-charge sector

    std::size_t hilbert_dim() const { return trunc.dim(); }
    Eigen::VectorXcd apply_vec(const Eigen::VectorXcd& vrho) const { return matrix * vrho; }
    DenseC apply(const DenseC& rho) const;
    // Largest |diagonal| entry; used to validate integrator steps.
    double rate_scale() const;
};

// Right-hand side of the master equation for the given pump model. The
// paper-form dissipator kappa*([J rho, J^+] + [J, rho J^+]) is used
// throughout, i.e. twice the textbook Lindblad dissipator.
Superoperator build_liouvillian(const ModelParams& p, const Truncation& trunc);

struct ObservableSet {
    double n_a = 0, n_b = 0, n_c = 0;
    double atom_emission = 0;    // 2 kappa_b <b^+ b>
    double photon_emission = 0;  // 2 kappa_a <a^+ a>
    // g2 entries are empty when the mode population is below 1e-12
    std::optional<double> g2_a, g2_b, g2_c;
    std::optional<double> g_ab;  // <a^+a b^+b> / (<a^+a><b^+b>)
    Eigen::MatrixXd joint;       // P_{n,m} = sum_k <n,m,k|rho|n,m,k>
    double edge_mass_a = 0, edge_mass_b = 0, edge_mass_c = 0;
    bool truncation_flag = false;  // any top-edge layer above 1e-4
};

struct SteadyStateResult {
    DenseC rho;
    double residual = 0;       // ||L vec(rho)|| / ||L||_inf-ish, see impl
    double trace_error = 0;
    double min_eigenvalue = 0; // most negative eigenvalue of rho
    bool used_sector_solver = false;
};

struct SteadyStateOptions {
    std::size_t lu_limit = 20000;   // direct LU up to this superoperator dim
    double residual_tol = 1e-9;
    double positivity_tol = -1e-8;
    bool check_degeneracy = true;   // second solve with a different pinned row
};

// Nullspace of L normalized to unit trace. Dense LU below lu_limit, the
// zero-charge sector for symmetric Liouvillians above it, and shifted
// inverse iteration as the fallback.
SteadyStateResult steady_state(const Superoperator& L, const SteadyStateOptions& opts = {});

struct EvolveResult {
    DenseC rho;
    double trace_drift = 0;
};

// RK4 with fixed step. Requires dt * rate_scale <= 0.1 and trace drift
// below 1e-8 over the run.
EvolveResult evolve(const Superoperator& L, const DenseC& rho0, double t, double dt);

ObservableSet observables(const DenseC& rho, const Truncation& trunc, const ModelParams& p);

// Test helpers: normalized single-mode states embedded in nothing (plain
// dense matrices over one mode).
DenseC coherent_state(double amplitude, int n_max);
DenseC thermal_state(double mean_occupation, int n_max);

}  // namespace pairlaser::fock
