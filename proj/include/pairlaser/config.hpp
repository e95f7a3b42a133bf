#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pairlaser/model.hpp"

namespace pairlaser::config {

// Section/key-value text format:
//   [section]
//   key = value     # comment
// Unknown sections or keys are validation errors.
struct RawConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;
    static RawConfig parse(const std::string& text);  // throws with line info
};

enum class Method { MasterEq, RateEq, Semiclassical, Fluctuations, Sde };
enum class Format { Csv, Json };
enum class ScanScale { Linear, Log };
enum class MuMode { Fixed, Epsilon, TargetIntensity };

struct ScanAxis {
    std::string field;   // a ModelParams field name
    double from = 0, to = 0;
    int points = 1;
    ScanScale scale = ScanScale::Linear;
    bool lockstep_kappa_b = false;  // scan kappa_a with kappa_b = kappa_a

    std::vector<double> values() const;
};

struct ScenarioConfig {
    Method method = Method::RateEq;
    Format format = Format::Csv;
    ModelParams params;
    Truncation truncation;
    // rate-equation grid
    int n_max = 60, m_max = 60;
    std::optional<double> saturation_R;  // hold R fixed along the scan
    // reduced-system integration
    double t_total = 0, dt = 0;
    // fluctuation grid
    double omega_max = 20.0;
    int omega_points = 201;
    // sde
    int n_traj = 10000;
    double sde_t_total = 1.0, sde_dt = 1e-3, sde_t_burn = 0.5;
    std::uint64_t seed = 0;
    int threads = 0;
    // coherent pump can be given directly, as epsilon, or via a target
    // semiclassical intensity (recomputed per scan point)
    MuMode mu_mode = MuMode::Fixed;
    double epsilon = 0, target_intensity = 0;
    std::optional<ScanAxis> scan;
    std::string reference;  // field whose value sets the rate unit

    // The normalized config text (canonical serialization).
    std::string serialize() const;
};

// Parse + cross-validate. Collects every error; throws std::invalid_argument
// with one message per line when any are present.
ScenarioConfig validate_config(const std::string& text);

// Apply a scan value to a copy of the scenario's parameters.
ModelParams params_at(const ScenarioConfig& cfg, double scan_value);

// Resolve the coherent pump amplitude per point for the epsilon /
// target-intensity modes.
double resolve_mu(const ScenarioConfig& cfg, const ModelParams& p);

}  // namespace pairlaser::config
