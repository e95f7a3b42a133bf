#include "pairlaser/semiclassical.hpp"

#include <cmath>
#include <stdexcept>

namespace pairlaser::semiclassical {

namespace {
void require_coherent_model(const ModelParams& p) {
    p.validate();
    if (p.pump.kind != PumpKind::Coherent)
        throw std::invalid_argument("semiclassical: coherent pump model required");
}
}  // namespace

double threshold(const ModelParams& p) {
    require_coherent_model(p);
    const double det = p.eta * p.eta - p.kappa_a * p.kappa_bc;
    if (!(det > 0))
        throw std::invalid_argument("threshold: eta^2 <= kappa_a*kappa_bc, coupling too weak "
                                    "for a lasing branch");
    return p.kappa_c * std::sqrt(p.kappa_a * (p.kappa_b + p.kappa_bc) / det);
}

SemiclassicalState steady_branch(const ModelParams& p, double mu) {
    if (!(mu >= 0)) throw std::invalid_argument("steady_branch: mu must be >= 0");
    SemiclassicalState s;
    s.mu_th = threshold(p);
    s.mu = mu;
    s.epsilon = mu / s.mu_th;
    if (s.epsilon <= 1.0) {
        s.branch = Branch::Below;
        s.alpha0 = s.beta0 = 0;
        s.gamma0 = p.kappa_c > 0 ? mu / p.kappa_c : 0.0;
        return s;
    }
    const double det = p.eta * p.eta - p.kappa_a * p.kappa_bc;
    const double root = std::sqrt(s.epsilon - 1.0);
    s.branch = Branch::Above;
    s.alpha0 = p.eta * std::sqrt(p.kappa_c * (p.kappa_b + p.kappa_bc)) / det * root;
    s.beta0 = std::sqrt(p.kappa_a * p.kappa_c / det) * root;
    s.gamma0 = s.mu_th / p.kappa_c;
    return s;
}

std::array<double, 6> drift(const ModelParams& p, double mu, const std::array<double, 6>& v) {
    const double al = v[0], be = v[1], ga = v[2], ald = v[3], bed = v[4], gad = v[5];
    return {
        -p.kappa_a * al + p.eta * bed * ga,
        -p.kappa_b * be - p.kappa_bc * be * (gad * ga + 1.0) + p.eta * ald * ga,
        -(p.kappa_c - p.kappa_bc * bed * be) * ga - p.eta * al * be + mu,
        -p.kappa_a * ald + p.eta * be * gad,
        -p.kappa_b * bed - p.kappa_bc * bed * (gad * ga + 1.0) + p.eta * al * gad,
        -(p.kappa_c - p.kappa_bc * bed * be) * gad - p.eta * ald * bed + mu,
    };
}

double mu_for_intensity(const ModelParams& p, double intensity) {
    if (!(intensity > 0)) throw std::invalid_argument("mu_for_intensity: intensity must be > 0");
    const double mu_th = threshold(p);
    const double det = p.eta * p.eta - p.kappa_a * p.kappa_bc;
    // alpha0^2 = eta^2 kappa_c (kappa_b+kappa_bc) / det^2 * (eps - 1)
    const double slope = p.eta * p.eta * p.kappa_c * (p.kappa_b + p.kappa_bc) / (det * det);
    const double eps = 1.0 + intensity / slope;
    return eps * mu_th;
}

}  // namespace pairlaser::semiclassical
