#include "flevy/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "flevy/errors.hpp"

namespace flevy::cli {

namespace {

// from_chars rather than strtod: strtod flags subnormals as ERANGE.
double parse_cell(const std::string& cell, const std::string& where) {
    double v = 0.0;
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), last, v);
    if (cell.empty() || ec != std::errc() || ptr != last)
        throw ConfigError(where + ": '" + cell + "' is not a number");
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_path_csv(std::ostream& out, const SamplePath& path) {
    out << "t,value\n";
    for (std::size_t i = 0; i < path.size(); ++i)
        out << format_double(path.time(i)) << ',' << format_double(path.values[i]) << '\n';
}

void write_path_csv(const std::string& file, const SamplePath& path) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + file);
    write_path_csv(out, path);
    if (!out) throw ConfigError("write to " + file + " failed");
}

Series read_series_csv(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + file);
    Series s;
    s.label = std::filesystem::path(file).stem().string();
    std::string line;
    if (!std::getline(in, line) || line != "t,value") throw ConfigError(file + ": expected header 't,value'");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = file + ":" + std::to_string(lineno);
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ConfigError(where + ": expected two columns");
        s.t.push_back(parse_cell(line.substr(0, comma), where));
        s.value.push_back(parse_cell(line.substr(comma + 1), where));
    }
    if (s.t.empty()) throw ConfigError(file + ": no data rows");
    return s;
}

void write_long_csv(std::ostream& out, const std::vector<Series>& series) {
    out << "series,t,value\n";
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.t.size(); ++i)
            out << s.label << ',' << format_double(s.t[i]) << ',' << format_double(s.value[i]) << '\n';
}

}  // namespace flevy::cli
