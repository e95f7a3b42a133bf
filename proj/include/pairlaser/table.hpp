#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pairlaser::table {

// Column-oriented result records. Every row carries residual and flag
// columns; NaN never appears without a flag set on the same row. Spectra
// are nested series and only serialize to JSON.
struct Series {
    std::vector<double> omega;
    std::vector<double> value;
};

struct ResultTable {
    std::vector<std::string> columns;                  // flat numeric columns, in order
    std::map<std::string, std::vector<double>> data;   // column -> values
    std::vector<std::string> flags;                    // per-row flag text ("" = clean)
    std::vector<char> ok;                              // per-row success (bit-packed
    // vector<bool> would race under parallel point writes)
    std::map<std::string, std::vector<Series>> series; // nested spectra per row
    std::vector<double> timing_ms;                     // in-memory only, never serialized

    std::size_t rows() const { return ok.size(); }
    void add_column(const std::string& name);
    void set(const std::string& name, std::size_t row, double v);
    std::size_t add_row();
    bool any_failures() const;

    // Deterministic serializations (%.17g floats, fixed order).
    std::string to_csv() const;
    std::string to_json() const;
};

std::string format_double(double v);

}  // namespace pairlaser::table
