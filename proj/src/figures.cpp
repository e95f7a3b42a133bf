#include "pairlaser/scenario.hpp"
#include "pairlaser/version.hpp"

#include <json.hpp>
#include <stdexcept>

namespace pairlaser::scenario {

namespace {

// Figure recipes are pure data: each figure is a list of named scenario
// configs run as-is and written out next to a manifest. Rates are in units
// of the declared reference rate.

const char* kFig2Common = R"(
[scenario]
method = master-eq
format = csv

[params]
reference = eta
eta = 1
kappa_b = {KB}
kappa_cb = 0.0125
pump = incoherent
mu_in = 0.41666666666666669
mu_out = 0.375

[truncation]
n_a = 10
n_b = 10
n_c = 8

[scan]
axis = kappa_a
from = 60
to = 1
points = 10
scale = log
)";

const char* kFig3 = R"(
[scenario]
method = rate-eq
format = csv

[params]
reference = kappa_a
eta = 20
kappa_a = 1
kappa_b = 1
pump = incoherent
mu_out = 10

[grid]
n_max = 60
m_max = 60
saturation_R = 13.888888888888889

[scan]
axis = mu_in
from = 12
to = 60
points = 20
scale = linear
)";

const char* kFig4a = R"(
[scenario]
method = fluctuations
format = csv

[params]
reference = kappa_a
eta = 4
kappa_a = 1
kappa_b = 1
kappa_c = 2
kappa_bc = 0
pump = coherent

[grid]
omega_max = 40
omega_points = 201

[scan]
axis = mu
from = 0.55
to = 2.5
points = 20
scale = linear
)";

const char* kFig4b = R"(
[scenario]
method = fluctuations
format = csv

[params]
reference = kappa_c
eta = 10
kappa_c = 1
kappa_bc = 0
pump = coherent
mu_mode = target_intensity
target_intensity = 1

[grid]
omega_max = 40
omega_points = 201

[scan]
axis = kappa_a
from = 1
to = 0.1
points = 15
scale = log
lockstep_kappa_b = true
)";

const char* kFig5aOne = R"(
[scenario]
method = fluctuations
format = json

[params]
reference = kappa_c
eta = 10
kappa_a = 0.2
kappa_b = 0.2
kappa_c = 1
kappa_bc = 0
pump = coherent
mu_mode = epsilon
epsilon = {EPS}

[grid]
omega_max = 20
omega_points = 241
)";

const char* kFig5bOne = R"(
[scenario]
method = fluctuations
format = json

[params]
reference = kappa_c
eta = 10
kappa_a = 0.2
kappa_b = 0.2
kappa_c = 1
kappa_bc = {KBC}
pump = coherent
mu_mode = epsilon
epsilon = 4

[grid]
omega_max = 40
omega_points = 241
)";

const char* kFig5bInset = R"(
[scenario]
method = fluctuations
format = csv

[params]
reference = kappa_c
eta = 10
kappa_a = 0.2
kappa_b = 0.2
kappa_c = 1
pump = coherent
mu_mode = epsilon
epsilon = 4

[grid]
omega_max = 40
omega_points = 241

[scan]
axis = kappa_bc
from = 0
to = 0.4
points = 9
scale = linear
)";

std::string substitute(std::string text, const std::string& key, const std::string& value) {
    const std::string tag = "{" + key + "}";
    for (auto pos = text.find(tag); pos != std::string::npos; pos = text.find(tag))
        text.replace(pos, tag.size(), value);
    return text;
}

}  // namespace

std::vector<std::string> figure_ids() {
    return {"fig2", "fig3", "fig4a", "fig4b", "fig5a", "fig5b"};
}

std::vector<std::pair<std::string, std::string>> figure_recipes(const std::string& id) {
    std::vector<std::pair<std::string, std::string>> r;
    if (id == "fig2") {
        // three observables over the (kappa_a, kappa_b) plane, assembled
        // from one kappa_a scan per kappa_b value
        for (const char* kb : {"0.1", "0.2", "0.4", "0.8", "1.6"})
            r.emplace_back("kappa_b=" + std::string(kb), substitute(kFig2Common, "KB", kb));
    } else if (id == "fig3") {
        r.emplace_back("scan", kFig3);
    } else if (id == "fig4a") {
        r.emplace_back("scan", kFig4a);
    } else if (id == "fig4b") {
        r.emplace_back("scan", kFig4b);
    } else if (id == "fig5a") {
        for (const char* eps : {"1.5", "2.7", "20"})
            r.emplace_back("epsilon=" + std::string(eps), substitute(kFig5aOne, "EPS", eps));
    } else if (id == "fig5b") {
        r.emplace_back("kappa_bc=0", substitute(kFig5bOne, "KBC", "0"));
        r.emplace_back("kappa_bc=kappa_a", substitute(kFig5bOne, "KBC", "0.2"));
        r.emplace_back("inset", kFig5bInset);
    } else {
        throw std::invalid_argument("unknown figure id '" + id + "' (known: fig2 fig3 fig4a "
                                    "fig4b fig5a fig5b)");
    }
    return r;
}

FigureResult reproduce_figure(const std::string& id, int threads, std::uint64_t seed) {
    const auto recipes = figure_recipes(id);
    FigureResult out;
    out.id = id;

    nlohmann::ordered_json manifest;
    manifest["figure"] = id;
    manifest["schema_version"] = 1;
    manifest["code_version"] = kVersion;
    manifest["seed"] = seed;
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();

    int part = 0;
    for (const auto& [label, text] : recipes) {
        auto cfg = config::validate_config(text);
        cfg.threads = threads;
        cfg.seed = seed;
        auto t = run_scenario(cfg);
        out.had_point_failures = out.had_point_failures || t.any_failures();
        const std::string stem = id + "_" + std::to_string(part++);
        const bool json = cfg.format == config::Format::Json || !t.series.empty();
        // fig2/fig3/fig4 series-free tables go to csv; spectra need json
        std::string name, content;
        if (cfg.format == config::Format::Json) {
            name = stem + ".json";
            content = t.to_json();
        } else {
            name = stem + ".csv";
            content = t.to_csv();
        }
        out.artifacts.push_back({name, std::move(content)});

        nlohmann::ordered_json run;
        run["label"] = label;
        run["artifact"] = name;
        run["config"] = cfg.serialize();
        runs.push_back(std::move(run));
        (void)json;
    }
    manifest["runs"] = std::move(runs);
    out.artifacts.push_back({id + "_manifest.json", manifest.dump(2) + "\n"});
    return out;
}

}  // namespace pairlaser::scenario
