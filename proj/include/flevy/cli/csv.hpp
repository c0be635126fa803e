#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "flevy/sample_path.hpp"

namespace flevy::cli {

/// %.17g: shortest fixed width that round-trips every double.
std::string format_double(double v);

/// Header `t,value`, one row per node.
void write_path_csv(std::ostream& out, const SamplePath& path);
void write_path_csv(const std::string& file, const SamplePath& path);

struct Series {
    std::string label;
    std::vector<double> t;
    std::vector<double> value;
};

/// Reads a `t,value` file; throws ConfigError on malformed input.
Series read_series_csv(const std::string& file);

/// Long format `series,t,value`; rows of each series in file order.
void write_long_csv(std::ostream& out, const std::vector<Series>& series);

}  // namespace flevy::cli
