#include "pairlaser/table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace pairlaser::table {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ResultTable::add_column(const std::string& name) {
    if (data.count(name)) return;
    columns.push_back(name);
    data[name] = std::vector<double>(rows(), std::nan(""));
}

std::size_t ResultTable::add_row() {
    for (auto& [k, v] : data) v.push_back(std::nan(""));
    flags.emplace_back();
    ok.push_back(1);
    timing_ms.push_back(0.0);
    return rows() - 1;
}

void ResultTable::set(const std::string& name, std::size_t row, double v) {
    auto it = data.find(name);
    if (it == data.end()) throw std::invalid_argument("table: unknown column " + name);
    it->second.at(row) = v;
}

bool ResultTable::any_failures() const {
    for (char b : ok)
        if (!b) return true;
    return false;
}

std::string ResultTable::to_csv() const {
    std::string out;
    for (const auto& c : columns) out += c + ",";
    out += "ok,flags\n";
    for (std::size_t r = 0; r < rows(); ++r) {
        for (const auto& c : columns) {
            const double v = data.at(c)[r];
            out += std::isnan(v) ? "" : format_double(v);
            out += ",";
        }
        out += ok[r] ? "1" : "0";
        out += ",";
        out += "\"" + flags[r] + "\"\n";
    }
    return out;
}

std::string ResultTable::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["rows"] = rows();
    nlohmann::ordered_json cols = nlohmann::ordered_json::object();
    for (const auto& c : columns) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (double v : data.at(c)) {
            if (std::isnan(v))
                arr.push_back(nullptr);
            else
                arr.push_back(v);
        }
        cols[c] = std::move(arr);
    }
    j["columns"] = std::move(cols);
    nlohmann::ordered_json okj = nlohmann::ordered_json::array();
    for (char b : ok) okj.push_back(bool(b));
    j["ok"] = std::move(okj);
    j["flags"] = flags;
    if (!series.empty()) {
        nlohmann::ordered_json s = nlohmann::ordered_json::object();
        for (const auto& [name, per_row] : series) {
            nlohmann::ordered_json rowsj = nlohmann::ordered_json::array();
            for (const auto& ser : per_row) {
                nlohmann::ordered_json one;
                one["omega"] = ser.omega;
                one["value"] = ser.value;
                rowsj.push_back(std::move(one));
            }
            s[name] = std::move(rowsj);
        }
        j["series"] = std::move(s);
    }
    return j.dump(2) + "\n";
}

}  // namespace pairlaser::table
