#include "pairlaser/config.hpp"
#include "pairlaser/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pairlaser::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& where,
                    std::vector<std::string>& errs) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        if (!std::isfinite(d)) {
            errs.push_back(where + ": value must be finite");
            return 0;
        }
        return d;
    } catch (...) {
        errs.push_back(where + ": not a number: '" + v + "'");
        return 0;
    }
}

long parse_int(const std::string& v, const std::string& where, std::vector<std::string>& errs) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        errs.push_back(where + ": not an integer: '" + v + "'");
        return 0;
    }
}

}  // namespace

RawConfig RawConfig::parse(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            raw.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        if (section.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (raw.sections[section].count(key))
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": duplicate key '" + key + "'");
        raw.sections[section][key] = val;
    }
    return raw;
}

namespace {

const std::set<std::string> kRateFields = {"eta",      "kappa_a",  "kappa_b", "kappa_c",
                                           "kappa_bc", "kappa_cb", "mu_in",   "mu_out",
                                           "mu"};

double* field_ref(ModelParams& p, const std::string& name) {
    if (name == "eta") return &p.eta;
    if (name == "kappa_a") return &p.kappa_a;
    if (name == "kappa_b") return &p.kappa_b;
    if (name == "kappa_c") return &p.kappa_c;
    if (name == "kappa_bc") return &p.kappa_bc;
    if (name == "kappa_cb") return &p.kappa_cb;
    if (name == "mu_in") return &p.pump.mu_in;
    if (name == "mu_out") return &p.pump.mu_out;
    if (name == "mu") return &p.pump.mu;
    return nullptr;
}

}  // namespace

std::vector<double> ScanAxis::values() const {
    std::vector<double> v;
    if (points == 1) {
        v.push_back(from);
        return v;
    }
    for (int i = 0; i < points; ++i) {
        const double t = double(i) / (points - 1);
        if (scale == ScanScale::Linear)
            v.push_back(from + (to - from) * t);
        else
            v.push_back(from * std::pow(to / from, t));
    }
    return v;
}

ScenarioConfig validate_config(const std::string& text) {
    std::vector<std::string> errs;
    RawConfig raw;
    try {
        raw = RawConfig::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(e.what());
    }

    const std::map<std::string, std::set<std::string>> known = {
        {"scenario", {"method", "format", "seed", "threads"}},
        {"params",
         {"reference", "eta", "kappa_a", "kappa_b", "kappa_c", "kappa_bc", "kappa_cb", "pump",
          "mu_in", "mu_out", "mu", "mu_mode", "epsilon", "target_intensity"}},
        {"truncation", {"n_a", "n_b", "n_c", "dimension_cap"}},
        {"grid",
         {"n_max", "m_max", "saturation_R", "omega_max", "omega_points", "n_traj", "t_total",
          "dt", "t_burn"}},
        {"scan", {"axis", "from", "to", "points", "scale", "lockstep_kappa_b"}},
    };
    for (const auto& [sec, kv] : raw.sections) {
        auto it = known.find(sec);
        if (it == known.end()) {
            errs.push_back("unknown section [" + sec + "]");
            continue;
        }
        for (const auto& [k, v] : kv)
            if (!it->second.count(k)) errs.push_back("[" + sec + "]: unknown key '" + k + "'");
    }

    ScenarioConfig cfg;
    auto get = [&](const std::string& sec, const std::string& key) -> const std::string* {
        auto s = raw.sections.find(sec);
        if (s == raw.sections.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };

    if (const auto* m = get("scenario", "method")) {
        if (*m == "master-eq") cfg.method = Method::MasterEq;
        else if (*m == "rate-eq") cfg.method = Method::RateEq;
        else if (*m == "semiclassical") cfg.method = Method::Semiclassical;
        else if (*m == "fluctuations") cfg.method = Method::Fluctuations;
        else if (*m == "sde") cfg.method = Method::Sde;
        else errs.push_back("[scenario] method: expected one of master-eq, rate-eq, "
                            "semiclassical, fluctuations, sde");
    } else {
        errs.push_back("[scenario] method is required");
    }
    if (const auto* f = get("scenario", "format")) {
        if (*f == "csv") cfg.format = Format::Csv;
        else if (*f == "json") cfg.format = Format::Json;
        else errs.push_back("[scenario] format: expected csv or json");
    }
    if (const auto* s = get("scenario", "seed"))
        cfg.seed = std::uint64_t(parse_int(*s, "[scenario] seed", errs));
    if (const auto* t = get("scenario", "threads"))
        cfg.threads = int(parse_int(*t, "[scenario] threads", errs));

    // pump model first so the rate fields land in the right variant
    std::string pump = "incoherent";
    if (const auto* p = get("params", "pump")) pump = *p;
    if (pump == "incoherent") cfg.params.pump.kind = PumpKind::Incoherent;
    else if (pump == "coherent") cfg.params.pump.kind = PumpKind::Coherent;
    else errs.push_back("[params] pump: expected incoherent or coherent");

    for (const auto& f : kRateFields)
        if (const auto* v = get("params", f))
            *field_ref(cfg.params, f) = parse_double(*v, "[params] " + f, errs);

    if (const auto* r = get("params", "reference")) {
        cfg.reference = *r;
        ModelParams tmp = cfg.params;
        double* ref = field_ref(tmp, *r);
        if (!ref || !kRateFields.count(*r)) {
            errs.push_back("[params] reference: must name a rate field");
        } else if (std::abs(*field_ref(cfg.params, *r) - 1.0) > 1e-12) {
            errs.push_back("[params] " + *r +
                           ": rates are expressed relative to the declared reference; "
                           "the reference rate itself must equal 1");
        }
    } else {
        errs.push_back("[params] reference is required (the rate that defines the unit)");
    }

    if (const auto* m = get("params", "mu_mode")) {
        if (*m == "fixed") cfg.mu_mode = MuMode::Fixed;
        else if (*m == "epsilon") cfg.mu_mode = MuMode::Epsilon;
        else if (*m == "target_intensity") cfg.mu_mode = MuMode::TargetIntensity;
        else errs.push_back("[params] mu_mode: expected fixed, epsilon or target_intensity");
    }
    if (const auto* e = get("params", "epsilon"))
        cfg.epsilon = parse_double(*e, "[params] epsilon", errs);
    if (const auto* t = get("params", "target_intensity"))
        cfg.target_intensity = parse_double(*t, "[params] target_intensity", errs);

    if (const auto* v = get("truncation", "n_a")) cfg.truncation.n_a = int(parse_int(*v, "[truncation] n_a", errs));
    if (const auto* v = get("truncation", "n_b")) cfg.truncation.n_b = int(parse_int(*v, "[truncation] n_b", errs));
    if (const auto* v = get("truncation", "n_c")) cfg.truncation.n_c = int(parse_int(*v, "[truncation] n_c", errs));
    if (const auto* v = get("truncation", "dimension_cap"))
        cfg.truncation.dimension_cap = std::size_t(parse_int(*v, "[truncation] dimension_cap", errs));

    if (const auto* v = get("grid", "n_max")) cfg.n_max = int(parse_int(*v, "[grid] n_max", errs));
    if (const auto* v = get("grid", "m_max")) cfg.m_max = int(parse_int(*v, "[grid] m_max", errs));
    if (const auto* v = get("grid", "saturation_R"))
        cfg.saturation_R = parse_double(*v, "[grid] saturation_R", errs);
    if (const auto* v = get("grid", "omega_max")) cfg.omega_max = parse_double(*v, "[grid] omega_max", errs);
    if (const auto* v = get("grid", "omega_points")) cfg.omega_points = int(parse_int(*v, "[grid] omega_points", errs));
    if (const auto* v = get("grid", "n_traj")) cfg.n_traj = int(parse_int(*v, "[grid] n_traj", errs));
    if (const auto* v = get("grid", "t_total")) {
        cfg.t_total = parse_double(*v, "[grid] t_total", errs);
        cfg.sde_t_total = cfg.t_total;
    }
    if (const auto* v = get("grid", "dt")) {
        cfg.dt = parse_double(*v, "[grid] dt", errs);
        cfg.sde_dt = cfg.dt;
    }
    if (const auto* v = get("grid", "t_burn")) cfg.sde_t_burn = parse_double(*v, "[grid] t_burn", errs);

    if (raw.sections.count("scan")) {
        ScanAxis ax;
        if (const auto* a = get("scan", "axis")) {
            ax.field = *a;
            if (!kRateFields.count(ax.field))
                errs.push_back("[scan] axis: '" + ax.field + "' is not a model parameter");
        } else {
            errs.push_back("[scan] axis is required");
        }
        if (const auto* v = get("scan", "from")) ax.from = parse_double(*v, "[scan] from", errs);
        if (const auto* v = get("scan", "to")) ax.to = parse_double(*v, "[scan] to", errs);
        if (const auto* v = get("scan", "points")) ax.points = int(parse_int(*v, "[scan] points", errs));
        if (const auto* v = get("scan", "scale")) {
            if (*v == "linear") ax.scale = ScanScale::Linear;
            else if (*v == "log") ax.scale = ScanScale::Log;
            else errs.push_back("[scan] scale: expected linear or log");
        }
        if (const auto* v = get("scan", "lockstep_kappa_b"))
            ax.lockstep_kappa_b = (*v == "true" || *v == "1");
        if (ax.points < 1) errs.push_back("[scan] points must be >= 1");
        if (!std::isfinite(ax.from) || !std::isfinite(ax.to))
            errs.push_back("[scan] range must be finite");
        if (ax.scale == ScanScale::Log && (ax.from <= 0 || ax.to <= 0))
            errs.push_back("[scan] log scale needs a positive range");
        cfg.scan = ax;
    }

    // cross-validation
    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        std::istringstream msgs(e.what());
        std::string one;
        while (std::getline(msgs, one, ';')) errs.push_back("[params]" + one);
    }
    if (cfg.method == Method::MasterEq) {
        try {
            cfg.truncation.validate();
        } catch (const std::invalid_argument& e) {
            errs.push_back(std::string("[truncation] ") + e.what());
        }
    }
    const bool needs_coherent = cfg.method == Method::Semiclassical ||
                                cfg.method == Method::Fluctuations || cfg.method == Method::Sde;
    if (needs_coherent && cfg.params.pump.kind != PumpKind::Coherent)
        errs.push_back("[params] pump: method requires the coherent pump model");
    if (cfg.method == Method::RateEq && cfg.params.pump.kind != PumpKind::Incoherent)
        errs.push_back("[params] pump: rate-eq requires the incoherent pump model");
    if (cfg.mu_mode == MuMode::Epsilon && !(cfg.epsilon > 0))
        errs.push_back("[params] epsilon must be > 0 with mu_mode = epsilon");
    if (cfg.mu_mode == MuMode::TargetIntensity && !(cfg.target_intensity > 0))
        errs.push_back("[params] target_intensity must be > 0 with mu_mode = target_intensity");
    if (cfg.method == Method::RateEq && (cfg.n_max < 2 || cfg.m_max < 2))
        errs.push_back("[grid] rate-eq needs n_max, m_max >= 2");
    if (cfg.omega_points < 3) errs.push_back("[grid] omega_points must be >= 3");
    if (!(cfg.omega_max > 0)) errs.push_back("[grid] omega_max must be > 0");
    if (cfg.method == Method::Sde && cfg.n_traj < 2) errs.push_back("[grid] n_traj must be >= 2");
    if (cfg.scan) {
        const auto& ax = cfg.scan->field;
        if (ax == "mu" && cfg.params.pump.kind != PumpKind::Coherent)
            errs.push_back("[scan] axis = mu needs the coherent pump model");
        if (ax == "mu" && cfg.mu_mode != MuMode::Fixed)
            errs.push_back("[scan] axis = mu conflicts with mu_mode");
        if ((ax == "mu_in" || ax == "mu_out") && cfg.params.pump.kind != PumpKind::Incoherent)
            errs.push_back("[scan] axis = " + ax + " needs the incoherent pump model");
    }

    if (!errs.empty()) {
        std::string msg;
        for (const auto& e : errs) msg += e + "\n";
        throw std::invalid_argument(msg);
    }
    return cfg;
}

std::string ScenarioConfig::serialize() const {
    std::ostringstream o;
    o.precision(17);
    o << "[scenario]\n";
    o << "method = ";
    switch (method) {
        case Method::MasterEq: o << "master-eq"; break;
        case Method::RateEq: o << "rate-eq"; break;
        case Method::Semiclassical: o << "semiclassical"; break;
        case Method::Fluctuations: o << "fluctuations"; break;
        case Method::Sde: o << "sde"; break;
    }
    o << "\nformat = " << (format == Format::Csv ? "csv" : "json");
    o << "\nseed = " << seed;
    o << "\nthreads = " << threads << "\n\n";
    o << "[params]\n";
    o << "reference = " << reference << "\n";
    o << "eta = " << params.eta << "\n";
    o << "kappa_a = " << params.kappa_a << "\n";
    o << "kappa_b = " << params.kappa_b << "\n";
    o << "kappa_c = " << params.kappa_c << "\n";
    o << "kappa_bc = " << params.kappa_bc << "\n";
    o << "kappa_cb = " << params.kappa_cb << "\n";
    if (params.pump.kind == PumpKind::Incoherent) {
        o << "pump = incoherent\n";
        o << "mu_in = " << params.pump.mu_in << "\n";
        o << "mu_out = " << params.pump.mu_out << "\n";
    } else {
        o << "pump = coherent\n";
        o << "mu = " << params.pump.mu << "\n";
        switch (mu_mode) {
            case MuMode::Fixed: o << "mu_mode = fixed\n"; break;
            case MuMode::Epsilon:
                o << "mu_mode = epsilon\nepsilon = " << epsilon << "\n";
                break;
            case MuMode::TargetIntensity:
                o << "mu_mode = target_intensity\ntarget_intensity = " << target_intensity << "\n";
                break;
        }
    }
    o << "\n[truncation]\n";
    o << "n_a = " << truncation.n_a << "\nn_b = " << truncation.n_b
      << "\nn_c = " << truncation.n_c << "\ndimension_cap = " << truncation.dimension_cap << "\n";
    o << "\n[grid]\n";
    o << "n_max = " << n_max << "\nm_max = " << m_max << "\n";
    if (saturation_R) o << "saturation_R = " << *saturation_R << "\n";
    o << "omega_max = " << omega_max << "\nomega_points = " << omega_points << "\n";
    o << "n_traj = " << n_traj << "\nt_total = " << sde_t_total << "\ndt = " << sde_dt
      << "\nt_burn = " << sde_t_burn << "\n";
    if (scan) {
        o << "\n[scan]\n";
        o << "axis = " << scan->field << "\nfrom = " << scan->from << "\nto = " << scan->to
          << "\npoints = " << scan->points << "\n";
        o << "scale = " << (scan->scale == ScanScale::Linear ? "linear" : "log") << "\n";
        if (scan->lockstep_kappa_b) o << "lockstep_kappa_b = true\n";
    }
    return o.str();
}

ModelParams params_at(const ScenarioConfig& cfg, double scan_value) {
    ModelParams p = cfg.params;
    if (cfg.scan) {
        double* f = field_ref(p, cfg.scan->field);
        *f = scan_value;
        if (cfg.scan->lockstep_kappa_b && cfg.scan->field == "kappa_a") p.kappa_b = scan_value;
    }
    return p;
}

double resolve_mu(const ScenarioConfig& cfg, const ModelParams& p) {
    switch (cfg.mu_mode) {
        case MuMode::Fixed: return p.pump.mu;
        case MuMode::Epsilon: return cfg.epsilon * semiclassical::threshold(p);
        case MuMode::TargetIntensity:
            return semiclassical::mu_for_intensity(p, cfg.target_intensity);
    }
    return p.pump.mu;
}

}  // namespace pairlaser::config
