#pragma once

#include <array>
#include "pairlaser/model.hpp"

namespace pairlaser::semiclassical {

enum class Branch { Below, Above };

struct SemiclassicalState {
    double alpha0 = 0, beta0 = 0, gamma0 = 0;
    double mu_th = 0;
    double epsilon = 0;  // mu / mu_th
    double mu = 0;
    Branch branch = Branch::Below;

    double n_a() const { return alpha0 * alpha0; }
    double n_b() const { return beta0 * beta0; }
    double n_c() const { return gamma0 * gamma0; }
};

// mu_th = kappa_c sqrt(kappa_a (kappa_b + kappa_bc) / (eta^2 - kappa_a kappa_bc));
// throws when eta^2 <= kappa_a*kappa_bc (no lasing branch).
double threshold(const ModelParams& p);

SemiclassicalState steady_branch(const ModelParams& p, double mu);

// Deterministic drift of the positive-P equations at (alpha, beta, gamma,
// alpha^+, beta^+, gamma^+); used for fixed-point residual checks.
std::array<double, 6> drift(const ModelParams& p, double mu, const std::array<double, 6>& v);

// Pump amplitude that makes the semiclassical photon intensity equal
// `intensity` (used by the kappa scans that hold <I_alpha> fixed).
double mu_for_intensity(const ModelParams& p, double intensity);

}  // namespace pairlaser::semiclassical
