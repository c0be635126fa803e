#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flevy/analytics.hpp"
#include "flevy/floup.hpp"
#include "flevy/frac_levy.hpp"
#include "flevy/levy_driver.hpp"
#include "flevy/sst.hpp"

namespace flevy::cli {

/// Flat `key = value` configuration with `#` comments. Keys live in the
/// namespaces driver, flp, floup, model, ensemble and output; unknown keys
/// are rejected when the file is parsed.
class RunConfig {
public:
    static RunConfig parse(std::istream& in, const std::string& source = "<config>");
    static RunConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::optional<std::uint64_t> get_u64(const std::string& key) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
    void set(const std::string& key, const std::string& value);

    LevyDriverSpec driver() const;
    FlpParams flp() const;
    /// Seed from ensemble.seed unless overridden; nullopt when neither is set.
    std::optional<std::uint64_t> seed(std::optional<std::uint64_t> override_seed) const;
    std::optional<std::string> model_id() const;
    ModelParams model_params() const;

private:
    std::map<std::string, std::string> values_;
    std::string source_;
};

/// Keys accepted outside the model.* namespace.
const std::vector<std::string>& known_keys();

}  // namespace flevy::cli
