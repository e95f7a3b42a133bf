#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pairlaser {

// Atoms are injected either incoherently (rates in/out of the source mode)
// or coherently through an effective pump amplitude.
enum class PumpKind { Incoherent, Coherent };

struct PumpModel {
    PumpKind kind = PumpKind::Incoherent;
    double mu_in = 0.0;   // incoherent injection rate
    double mu_out = 0.0;  // incoherent removal rate
    double mu = 0.0;      // coherent pump amplitude (real, >= 0)

    static PumpModel incoherent(double in, double out) {
        PumpModel p; p.kind = PumpKind::Incoherent; p.mu_in = in; p.mu_out = out; return p;
    }
    static PumpModel coherent(double amplitude) {
        PumpModel p; p.kind = PumpKind::Coherent; p.mu = amplitude; return p;
    }
};

// All rates are amplitude rates in units of a common reference; intensity
// decay of a mode with amplitude rate kappa is 2*kappa.
struct ModelParams {
    double eta = 1.0;       // pair coupling
    double kappa_a = 0.0;   // cavity decay
    double kappa_b = 0.0;   // atom out-coupling
    double kappa_c = 0.0;   // source-mode depletion
    double kappa_bc = 0.0;  // heating b -> c
    double kappa_cb = 0.0;  // spontaneous Raman c -> b
    PumpModel pump;

    // Throws std::invalid_argument listing every violated constraint.
    void validate() const;
};

struct Truncation {
    int n_a = 8;  // maximum retained Fock occupation (dimension is n+1)
    int n_b = 8;
    int n_c = 3;
    std::size_t dimension_cap = 20000;

    std::size_t dim() const {
        return std::size_t(n_a + 1) * std::size_t(n_b + 1) * std::size_t(n_c + 1);
    }
    void validate() const;
};

inline void ModelParams::validate() const {
    std::vector<std::string> errs;
    auto nonneg = [&](double v, const char* name) {
        if (!(v >= 0.0)) errs.push_back(std::string(name) + " must be >= 0");
    };
    if (!(eta >= 0.0)) errs.push_back("eta must be >= 0");
    nonneg(kappa_a, "kappa_a");
    nonneg(kappa_b, "kappa_b");
    nonneg(kappa_c, "kappa_c");
    nonneg(kappa_bc, "kappa_bc");
    nonneg(kappa_cb, "kappa_cb");
    if (pump.kind == PumpKind::Incoherent) {
        nonneg(pump.mu_in, "mu_in");
        nonneg(pump.mu_out, "mu_out");
    } else {
        if (!(pump.mu >= 0.0)) errs.push_back("mu must be real >= 0");
        // The coherently pumped model of the tunneling section has no
        // spontaneous-Raman channel; silently ignoring kappa_cb would
        // change the model, so reject it.
        if (kappa_cb != 0.0)
            errs.push_back("kappa_cb must be 0 with a coherent pump");
    }
    if (!errs.empty()) {
        std::string msg;
        for (const auto& e : errs) {
            if (!msg.empty()) msg += "; ";
            msg += e;
        }
        throw std::invalid_argument(msg);
    }
}

inline void Truncation::validate() const {
    if (n_a < 1 || n_b < 1 || n_c < 1)
        throw std::invalid_argument("truncation: every mode needs n_max >= 1");
    if (dim() > dimension_cap)
        throw std::invalid_argument("truncation: Hilbert dimension " + std::to_string(dim()) +
                                    " exceeds cap " + std::to_string(dimension_cap));
}

}  // namespace pairlaser
