#include "flevy/cli/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "flevy/errors.hpp"

namespace flevy::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const char* last = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), last, v);
    if (t.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ConfigError("key " + key + ": '" + text + "' is not a finite number");
    return v;
}

}  // namespace

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "driver.kind",        "driver.theta",       "driver.jumps",
        "flp.d",              "flp.n",              "flp.past_window_exponent",
        "floup.lambda",       "floup.past_cutoff",  "floup.tau",
        "floup.z",            "model.id",           "ensemble.seed",
        "ensemble.replicates", "ensemble.times",    "ensemble.cf_u",
        "ensemble.origins",   "ensemble.lags",      "ensemble.threads",
        "ensemble.reference_d", "output.t_min",     "output.t_max",
    };
    return keys;
}

RunConfig RunConfig::parse(std::istream& in, const std::string& source) {
    RunConfig cfg;
    cfg.source_ = source;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (cfg.values_.count(key)) throw ConfigError(where + ": duplicate key " + key);
        cfg.values_[key] = value;
    }
    // Model parameters are validated against the catalog entry of model.id.
    const auto& keys = known_keys();
    std::optional<std::string> model;
    if (cfg.has("model.id")) model = cfg.values_.at("model.id");
    for (const auto& [key, value] : cfg.values_) {
        if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
        if (key.rfind("model.", 0) == 0) {
            if (!model) throw ConfigError(source + ": " + key + " given without model.id");
            const auto& defaults = catalog_defaults();
            const auto it = defaults.find(*model);
            if (it == defaults.end()) throw ConfigError(source + ": unknown model '" + *model + "'");
            if (!it->second.count(key.substr(6)))
                throw ConfigError(source + ": model " + *model + " has no parameter '" + key.substr(6) + "'");
            continue;
        }
        throw ConfigError(source + ": unknown key " + key);
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    return parse(in, path);
}

void RunConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
}

long long RunConfig::get_int(const std::string& key, long long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string t = trim(it->second);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError("key " + key + ": '" + it->second + "' is not an integer");
    return v;
}

std::optional<std::uint64_t> RunConfig::get_u64(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    const std::string t = trim(it->second);
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError("key " + key + ": '" + it->second + "' is not an unsigned 64-bit integer");
    return static_cast<std::uint64_t>(v);
}

std::vector<double> RunConfig::get_list(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("key " + key + " is an empty list");
    return out;
}

LevyDriverSpec RunConfig::driver() const {
    const std::string kind = get_string("driver.kind", "compensated_poisson");
    const double theta = get_double("driver.theta", 1.0);
    LevyDriverSpec spec;
    if (kind == "compensated_poisson") {
        if (has("driver.jumps")) throw ConfigError("driver.jumps needs driver.kind = compound_poisson");
        spec = LevyDriverSpec::compensated_poisson(theta);
    } else if (kind == "compound_poisson") {
        // value:probability pairs separated by commas
        std::vector<JumpAtom> atoms;
        std::stringstream ss(get_string("driver.jumps", ""));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) throw ConfigError("driver.jumps entries must be value:probability");
            atoms.push_back({parse_double("driver.jumps", item.substr(0, colon)),
                             parse_double("driver.jumps", item.substr(colon + 1))});
        }
        if (atoms.empty()) throw ConfigError("driver.jumps is required for compound_poisson");
        spec = LevyDriverSpec::compound_poisson(theta, atoms);
    } else {
        throw ConfigError("driver.kind must be compensated_poisson or compound_poisson");
    }
    spec.validate();
    return spec;
}

FlpParams RunConfig::flp() const {
    FlpParams p;
    p.d = get_double("flp.d", p.d);
    const long long n = get_int("flp.n", p.n);
    if (n < 2 || n > 1'000'000) throw ConfigError("flp.n must lie in [2, 1e6]");
    p.n = static_cast<int>(n);
    p.past_window_exponent = get_double("flp.past_window_exponent", p.past_window_exponent);
    p.validate();
    return p;
}

std::optional<std::uint64_t> RunConfig::seed(std::optional<std::uint64_t> override_seed) const {
    if (override_seed) return override_seed;
    return get_u64("ensemble.seed");
}

std::optional<std::string> RunConfig::model_id() const {
    if (!has("model.id")) return std::nullopt;
    return values_.at("model.id");
}

ModelParams RunConfig::model_params() const {
    ModelParams p;
    for (const auto& [key, value] : values_)
        if (key.rfind("model.", 0) == 0 && key != "model.id") p[key.substr(6)] = parse_double(key, value);
    return p;
}

}  // namespace flevy::cli
