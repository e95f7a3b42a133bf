#pragma once

#include <cstdint>
#include <vector>

#include "pairlaser/model.hpp"
#include "pairlaser/semiclassical.hpp"

namespace pairlaser::sde {

struct SdeOptions {
    int n_traj = 10000;
    double t_total = 1.0;   // kept short: positive-P trajectories of this
                            // model escape at long times (see README)
    double dt = 1e-3;
    double t_burn = 0.5;    // averaging starts here
    std::uint64_t seed = 0;
    double divergence_norm = 1e6;
    double abort_divergence_fraction = 0.01;
    bool noise = true;
    int threads = 0;        // 0 = hardware concurrency
};

struct EnsembleStats {
    // time-averaged ensemble means over [t_burn, t_total]
    double mean_I_a = 0, mean_I_b = 0, mean_I_c = 0;
    double sem_I_a = 0, sem_I_b = 0, sem_I_c = 0;  // trajectory-spread errors
    // c-number quadrature variances <(dx)^2> around the semiclassical point
    double dx2_a = 0, dx2_b = 0;
    double sem_dx2_a = 0, sem_dx2_b = 0;
    int n_divergent = 0;
    int n_used = 0;
};

// Positive-P trajectories of the coherently pumped model, Euler-Maruyama
// with state-dependent diffusion factored pairwise. Trajectories start at
// the semiclassical point. Divergent trajectories (norm above the bound)
// are excluded and counted; a fraction above the abort threshold throws.
// Statistics are reproducible for a fixed seed independent of threading.
EnsembleStats sde_trajectories(const ModelParams& p, const semiclassical::SemiclassicalState& ss,
                               const SdeOptions& opts);

}  // namespace pairlaser::sde
