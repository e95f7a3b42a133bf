#include "pairlaser/sde.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <thread>

namespace pairlaser::sde {

namespace {

using Complex = std::complex<double>;

// splitmix64; decorrelates the per-trajectory streams from the seed
struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ with a Box-Muller cache; one instance per trajectory
struct TrajectoryRng {
    std::uint64_t s[4];
    bool have_cached = false;
    double cached = 0;

    explicit TrajectoryRng(std::uint64_t seed, std::uint64_t traj) {
        SplitMix sm{seed ^ (0x2545f4914f6cdd1dull * (traj + 1))};
        for (auto& x : s) x = sm.next();
    }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t next() {
        const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0]; s[3] ^= s[1]; s[1] ^= s[2]; s[0] ^= s[3];
        s[2] ^= t; s[3] = rotl(s[3], 45);
        return result;
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53 + 0x1.0p-54; }
    double gauss() {
        if (have_cached) { have_cached = false; return cached; }
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached = r * std::sin(2.0 * M_PI * u2);
        have_cached = true;
        return r * std::cos(2.0 * M_PI * u2);
    }
};

struct TrajResult {
    double I_a = 0, I_b = 0, I_c = 0;
    double I_a2 = 0;
    double dx2_a = 0, dx2_b = 0;
    bool diverged = false;
};

TrajResult run_trajectory(const ModelParams& p, double mu,
                          const semiclassical::SemiclassicalState& ss, const SdeOptions& o,
                          std::uint64_t index) {
    TrajectoryRng rng(o.seed, index);
    Complex al(ss.alpha0, 0), be(ss.beta0, 0), ga(ss.gamma0, 0);
    Complex ald = al, bed = be, gad = ga;

    const double ka = p.kappa_a, kb = p.kappa_b, kc = p.kappa_c, kbc = p.kappa_bc;
    const double eta = p.eta;
    const double sq = std::sqrt(o.dt);
    const long steps = std::lround(o.t_total / o.dt);
    const long burn = std::lround(o.t_burn / o.dt);

    TrajResult r;
    long n_samp = 0;
    for (long s = 0; s < steps; ++s) {
        const Complex dal = -ka * al + eta * bed * ga;
        const Complex dbe = -kb * be - kbc * be * (gad * ga + 1.0) + eta * ald * ga;
        const Complex dga = -(kc - kbc * bed * be) * ga - eta * al * be + mu;
        const Complex dald = -ka * ald + eta * be * gad;
        const Complex dbed = -kb * bed - kbc * bed * (gad * ga + 1.0) + eta * al * gad;
        const Complex dgad = -(kc - kbc * bed * be) * gad - eta * ald * bed + mu;

        Complex nal = 0, nbe = 0, nga = 0, nald = 0, nbed = 0, ngad = 0;
        if (o.noise) {
            // each symmetric off-diagonal pair {i,j}, D_ij = d, contributes
            // sqrt(d/2) (w1 + i w2) to i and sqrt(d/2) (w1 - i w2) to j
            const Complex r1 = std::sqrt(eta * ga / 2.0);
            const Complex r2 = std::sqrt(eta * gad / 2.0);
            double w1 = rng.gauss(), w2 = rng.gauss();
            nal += r1 * Complex(w1, w2);
            nbe += r1 * Complex(w1, -w2);
            w1 = rng.gauss(); w2 = rng.gauss();
            nald += r2 * Complex(w1, w2);
            nbed += r2 * Complex(w1, -w2);
            if (kbc != 0.0) {
                const Complex r3 = std::sqrt(-kbc * be * ga / 2.0);
                const Complex r4 = std::sqrt(-kbc * bed * gad / 2.0);
                const Complex r5 = std::sqrt(kbc * bed * be / 2.0);
                w1 = rng.gauss(); w2 = rng.gauss();
                nbe += r3 * Complex(w1, w2);
                nga += r3 * Complex(w1, -w2);
                w1 = rng.gauss(); w2 = rng.gauss();
                nbed += r4 * Complex(w1, w2);
                ngad += r4 * Complex(w1, -w2);
                w1 = rng.gauss(); w2 = rng.gauss();
                nga += r5 * Complex(w1, w2);
                ngad += r5 * Complex(w1, -w2);
            }
        }
        al += dal * o.dt + nal * sq;
        be += dbe * o.dt + nbe * sq;
        ga += dga * o.dt + nga * sq;
        ald += dald * o.dt + nald * sq;
        bed += dbed * o.dt + nbed * sq;
        gad += dgad * o.dt + ngad * sq;

        const double nrm = std::abs(al) + std::abs(be) + std::abs(ga) + std::abs(ald) +
                           std::abs(bed) + std::abs(gad);
        if (!std::isfinite(nrm) || nrm > o.divergence_norm) {
            r.diverged = true;
            return r;
        }
        if (s >= burn) {
            const double Ia = (ald * al).real();
            const double Ib = (bed * be).real();
            const double Ic = (gad * ga).real();
            const Complex dxa = al + ald - 2.0 * ss.alpha0;
            const Complex dxb = be + bed - 2.0 * ss.beta0;
            r.I_a += Ia; r.I_b += Ib; r.I_c += Ic;
            r.I_a2 += Ia * Ia;
            r.dx2_a += (dxa * dxa).real();
            r.dx2_b += (dxb * dxb).real();
            ++n_samp;
        }
    }
    if (n_samp > 0) {
        r.I_a /= n_samp; r.I_b /= n_samp; r.I_c /= n_samp;
        r.I_a2 /= n_samp; r.dx2_a /= n_samp; r.dx2_b /= n_samp;
    }
    return r;
}

}  // namespace

EnsembleStats sde_trajectories(const ModelParams& p, const semiclassical::SemiclassicalState& ss,
                               const SdeOptions& o) {
    p.validate();
    if (p.pump.kind != PumpKind::Coherent)
        throw std::invalid_argument("sde_trajectories: coherent pump model required");
    if (ss.branch != semiclassical::Branch::Above)
        throw std::invalid_argument("sde_trajectories: above-threshold state required");
    if (!(o.dt > 0) || !(o.t_total > 0) || o.t_burn >= o.t_total)
        throw std::invalid_argument("sde_trajectories: need dt > 0 and t_burn < t_total");
    if (o.n_traj < 2) throw std::invalid_argument("sde_trajectories: need at least 2 trajectories");

    std::vector<TrajResult> results(o.n_traj);
    int hw = o.threads > 0 ? o.threads : int(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    hw = std::min(hw, o.n_traj);
    std::vector<std::thread> pool;
    std::atomic<int> cursor{0};
    for (int w = 0; w < hw; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = cursor.fetch_add(64);
                if (i >= o.n_traj) return;
                const int end = std::min(i + 64, o.n_traj);
                for (int k = i; k < end; ++k)
                    results[k] = run_trajectory(p, ss.mu, ss, o, std::uint64_t(k));
            }
        });
    for (auto& t : pool) t.join();

    EnsembleStats es;
    // fixed-order reduction keeps the result byte-identical across thread counts
    double sI[3] = {0, 0, 0}, sI2[3] = {0, 0, 0};
    double sx[2] = {0, 0}, sx2[2] = {0, 0};
    for (const auto& r : results) {
        if (r.diverged) { ++es.n_divergent; continue; }
        ++es.n_used;
        sI[0] += r.I_a; sI2[0] += r.I_a * r.I_a;
        sI[1] += r.I_b; sI2[1] += r.I_b * r.I_b;
        sI[2] += r.I_c; sI2[2] += r.I_c * r.I_c;
        sx[0] += r.dx2_a; sx2[0] += r.dx2_a * r.dx2_a;
        sx[1] += r.dx2_b; sx2[1] += r.dx2_b * r.dx2_b;
    }
    if (double(es.n_divergent) > o.abort_divergence_fraction * o.n_traj)
        throw std::runtime_error("sde_trajectories: " + std::to_string(es.n_divergent) + " of " +
                                 std::to_string(o.n_traj) +
                                 " trajectories diverged (above the abort fraction); "
                                 "shorten t_total or reduce dt");
    if (es.n_used < 2) throw std::runtime_error("sde_trajectories: too few usable trajectories");

    const double n = es.n_used;
    auto finalize = [&](double s1, double s2, double& mean, double& sem) {
        mean = s1 / n;
        const double var = std::max(0.0, s2 / n - mean * mean);
        sem = std::sqrt(var / (n - 1));
    };
    finalize(sI[0], sI2[0], es.mean_I_a, es.sem_I_a);
    finalize(sI[1], sI2[1], es.mean_I_b, es.sem_I_b);
    finalize(sI[2], sI2[2], es.mean_I_c, es.sem_I_c);
    finalize(sx[0], sx2[0], es.dx2_a, es.sem_dx2_a);
    finalize(sx[1], sx2[1], es.dx2_b, es.sem_dx2_b);
    return es;
}

}  // namespace pairlaser::sde
