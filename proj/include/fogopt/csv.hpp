#pragma once
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "fogopt/errors.hpp"

namespace fogopt {

// A CSV cell: numbers print with 9 significant digits, integers and text verbatim.
using Cell = std::variant<double, long long, std::string>;

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

inline std::string format_cell(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", *d);
        return buf;
    }
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

inline std::string format_table(const Table& t)
{
    std::string out;
    auto line = [&out](const auto& cells, auto fmt) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += fmt(cells[i]);
        }
        out += '\n';
    };
    line(t.header, [](const std::string& s) { return s; });
    for (const auto& r : t.rows) {
        if (r.size() != t.header.size()) throw ValidationError("csv: row width differs from header");
        line(r, format_cell);
    }
    return out;
}

// Writes to a sibling temporary file and renames it over path, so readers
// never observe a partial file.
inline void write_results(const Table& t, const std::string& path)
{
    if (t.rows.empty()) throw ValidationError("write_results: no rows to write");
    const std::string text = format_table(t);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + tmp + "' for writing");
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        f.flush();
        if (!f) throw IoError("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move results into '" + path + "'");
    }
}

} // namespace fogopt
