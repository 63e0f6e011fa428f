#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lsdsim/error.hpp"

namespace lsdsim {

// Minimal CSV plumbing for the fixed numeric schemas used here; no quoting,
// no embedded separators.
inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::vector<std::vector<std::string>> csv_read_file(const std::string& path,
                                                           const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw SimError(Err::SchemaError, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw SimError(Err::SchemaError, path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw SimError(Err::SchemaError,
                       path + ": header mismatch, want '" + expected_header + "' got '" + line + "'");
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    const std::size_t ncols = csv_split(expected_header).size();
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = csv_split(line);
        if (cells.size() != ncols)
            throw SimError(Err::SchemaError,
                           path + ": row " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " columns, want " + std::to_string(ncols));
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline long long csv_ll(const std::string& cell, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw SimError(Err::SchemaError, ctx + ": bad integer '" + cell + "'");
    }
}

} // namespace lsdsim
