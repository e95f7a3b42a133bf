#pragma once

#include <string>
#include <vector>

#include "pairlaser/config.hpp"
#include "pairlaser/table.hpp"

namespace pairlaser::scenario {

// Dispatches the configured method over the scan grid. Deterministic for a
// given config (and seed); per-point failures are recorded in the row's
// flag column, not thrown.
table::ResultTable run_scenario(const config::ScenarioConfig& cfg);

struct Artifact {
    std::string name;     // file name, e.g. "fig3_scan.csv"
    std::string content;
};

struct FigureResult {
    std::string id;
    std::vector<Artifact> artifacts;  // data files + figure manifest
    bool had_point_failures = false;
};

// Pre-registered parameter recipes for the paper-style figures:
// fig2, fig3, fig4a, fig4b, fig5a, fig5b.
FigureResult reproduce_figure(const std::string& id, int threads, std::uint64_t seed);

std::vector<std::string> figure_ids();

// Embedded recipe text (pure data); throws for unknown ids.
std::vector<std::pair<std::string, std::string>> figure_recipes(const std::string& id);

}  // namespace pairlaser::scenario
