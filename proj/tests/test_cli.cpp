#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "flevy/cli/commands.hpp"
#include "flevy/cli/csv.hpp"
#include "flevy/cli/run_config.hpp"
#include "flevy/errors.hpp"

using namespace flevy;
using namespace flevy::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / ("flevy_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return RunConfig::parse(in);
}

struct Run {
    int code;
    std::string out, err;
};

Run simulate(const std::string& kind, const std::string& config_text, std::optional<std::uint64_t> seed = {}) {
    CommandOptions o;
    o.config_path = write_file("sim_" + kind + ".cfg", config_text);
    o.seed = seed;
    std::ostringstream out, err;
    const int code = cmd_simulate(kind, o, out, err);
    return {code, out.str(), err.str()};
}

Run verify(const std::string& suite, const std::string& config_text) {
    CommandOptions o;
    o.config_path = write_file("verify_" + suite + ".cfg", config_text);
    std::ostringstream out, err;
    const int code = cmd_verify(suite, o, out, err);
    return {code, out.str(), err.str()};
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(FLEVY_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kFlp = "driver.theta = 1\nflp.d = 0.25\nflp.n = 20\nflp.past_window_exponent = 1.2\n"
                   "output.t_min = 0\noutput.t_max = 2\n";

}  // namespace

TEST_CASE("configuration parsing") {
    const RunConfig c = parse(
        "# comment line\n"
        "  flp.d = 0.3   # trailing comment\n"
        "flp.n=40\n"
        "ensemble.times = 0, 0.5 ,1\n"
        "model.id = log\n"
        "model.sigma = 0.5\n");
    CHECK(c.flp().d == 0.3);
    CHECK(c.flp().n == 40);
    CHECK(c.get_list("ensemble.times", {}) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(c.model_id() == std::optional<std::string>{"log"});
    CHECK(c.model_params().at("sigma") == 0.5);
    CHECK_FALSE(c.seed(std::nullopt).has_value());
    CHECK(c.seed(std::uint64_t{9}) == std::optional<std::uint64_t>{9});
    CHECK(parse("ensemble.seed = 12\n").seed(std::nullopt) == std::optional<std::uint64_t>{12});
    CHECK(parse("ensemble.seed = 12\n").seed(std::uint64_t{3}) == std::optional<std::uint64_t>{3});

    CHECK_THROWS_AS(parse("flp.dd = 0.3\n"), ConfigError);
    CHECK_THROWS_AS(parse("flp.d = 0.3\nflp.d = 0.2\n"), ConfigError);
    CHECK_THROWS_AS(parse("flp.d 0.3\n"), ConfigError);
    CHECK_THROWS_AS(parse("model.sigma = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("model.id = log\nmodel.gamma = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("flp.d = abc\n").flp(), ConfigError);
    CHECK_THROWS_AS(parse("flp.d = 0.3x\n").flp(), ConfigError);
    CHECK_THROWS_AS(parse("flp.d = 0.6\n").flp(), ConfigError);
    CHECK_THROWS_AS(parse("flp.n = 1\n").flp(), ConfigError);
    CHECK_THROWS_AS(parse("ensemble.seed = -4\n").seed(std::nullopt), ConfigError);
    CHECK_THROWS_AS(RunConfig::load((scratch() / "missing.cfg").string()), ConfigError);
}

TEST_CASE("driver configuration") {
    const LevyDriverSpec d = parse("driver.kind = compound_poisson\ndriver.theta = 2\n"
                                   "driver.jumps = 1:0.25, -0.5:0.75\n")
                                 .driver();
    CHECK(d.theta == 2.0);
    CHECK(second_moment(d) == doctest::Approx(2.0 * (0.25 + 0.25 * 0.75)));
    CHECK(parse("").driver().theta == 1.0);
    CHECK_THROWS_AS(parse("driver.theta = 0\n").driver(), ConfigError);
    CHECK_THROWS_AS(parse("driver.kind = gaussian\n").driver(), ConfigError);
    CHECK_THROWS_AS(parse("driver.kind = compound_poisson\n").driver(), ConfigError);
    CHECK_THROWS_AS(parse("driver.jumps = 1:1\n").driver(), ConfigError);
    CHECK_THROWS_AS(parse("driver.kind = compound_poisson\ndriver.jumps = 1;1\n").driver(), ConfigError);
}

TEST_CASE("CSV round trip is exact") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SamplePath p{-0.5, 0.01, {}};
    for (int i = 0; i < 500; ++i) p.values.push_back(u(rng) * std::pow(10.0, 40 * u(rng)));
    p.values.push_back(0.0);
    p.values.push_back(-0.0);
    p.values.push_back(5e-324);
    const std::string file = (scratch() / "round.csv").string();
    write_path_csv(file, p);
    const Series s = read_series_csv(file);
    CHECK(s.label == "round");
    REQUIRE(s.value.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(s.value[i] == p.values[i]);
        CHECK(s.t[i] == p.time(i));
    }
    CHECK(read_file(file).rfind("t,value\n", 0) == 0);
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);

    for (const char* bad : {"time,value\n0,1\n", "t,value\n0,abc\n", "t,value\n0\n", "t,value\n0,1,2\n", ""}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(read_series_csv(write_file("bad.csv", bad)), ConfigError);
    }
}

TEST_CASE("plot data merges series without resampling") {
    const std::string a = write_file("alpha.csv", "t,value\n0,1\n0.5,2\n1,3\n");
    const std::string b = write_file("beta.csv", "t,value\n0,-1\n0.25,-2\n");
    std::ostringstream out, err;
    CHECK(cmd_plotdata({a}, "", out, err) == kOk);
    CHECK(out.str() == "series,t,value\nalpha,0,1\nalpha,0.5,2\nalpha,1,3\n");

    std::ostringstream both;
    CHECK(cmd_plotdata({a, b}, "", both, err) == kOk);
    CHECK(both.str() == "series,t,value\nalpha,0,1\nalpha,0.5,2\nalpha,1,3\nbeta,0,-1\nbeta,0.25,-2\n");

    const std::string merged = (scratch() / "merged.csv").string();
    CHECK(cmd_plotdata({a, b}, merged, out, err) == kOk);
    CHECK(read_file(merged) == both.str());

    std::ostringstream e2;
    CHECK(cmd_plotdata({write_file("broken.csv", "t,value\n1,x\n")}, "", out, e2) == kConfigError);
    CHECK_FALSE(e2.str().empty());
    CHECK(cmd_plotdata({(scratch() / "nope.csv").string()}, "", out, err) == kConfigError);
    CHECK(cmd_plotdata({}, "", out, err) == kConfigError);
}

TEST_CASE("simulate: every kind, deterministic, validated") {
    const std::string floup = std::string(kFlp) + "floup.lambda = 1\n";
    const std::string anchored = floup + "floup.tau = 0.5\nfloup.z = 0.2\n";
    const std::string sde = std::string(kFlp) + "model.id = log\nmodel.lambda = 1.5\n";
    const std::string sde_anchored = sde + "floup.tau = 0\nfloup.z = 2\n";
    const std::string sq = std::string(kFlp) + "model.id = squared-floup\nfloup.past_cutoff = -30\nfloup.tau = 0\nfloup.z = 0.5\n";
    const std::vector<std::pair<std::string, std::string>> runs{
        {"driver", kFlp}, {"flp", kFlp},  {"floup", floup}, {"floup", anchored},
        {"sde", sde},     {"sde", sde_anchored}, {"sde", sq}};
    for (const auto& [kind, text] : runs) {
        CAPTURE(kind);
        CAPTURE(text);
        const Run a = simulate(kind, text, 5), b = simulate(kind, text, 5), c = simulate(kind, text, 6);
        CHECK(a.code == kOk);
        CHECK(a.err.empty());
        CHECK(a.out == b.out);
        CHECK(a.out != c.out);
        std::istringstream in(a.out);
        std::string line;
        std::getline(in, line);
        CHECK(line == "t,value");
        std::size_t rows = 0;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == 41);
    }
    const Run anchored_run = simulate("floup", anchored, 5);
    CHECK(anchored_run.out.find("\n0.5,0.20000000000000001\n") != std::string::npos);

    CHECK(simulate("flp", kFlp).code == kConfigError);  // no seed
    CHECK(simulate("flp", std::string(kFlp) + "ensemble.seed = 3\n").code == kOk);
    CHECK(simulate("driver", "driver.theta = 0\n", 1).code == kConfigError);
    CHECK(simulate("brownian", kFlp, 1).code == kConfigError);
    CHECK(simulate("sde", std::string(kFlp) + "model.id = power\nmodel.gamma = 0.3\n", 1).code == kConfigError);
    CHECK(simulate("sde", sde + "floup.lambda = 1\n", 1).code == kConfigError);
    CHECK(simulate("floup", floup + "floup.tau = 0.5\n", 1).code == kConfigError);
    CHECK(simulate("floup", floup + "floup.past_cutoff = -500\n", 1).code == kConfigError);
    const Run bad = simulate("flp", "output.t_min = 3\noutput.t_max = 1\n", 1);
    CHECK(bad.code == kConfigError);
    CHECK(bad.err.find("config error") != std::string::npos);
}

TEST_CASE("simulate: figure-style FLOUP path") {
    const Run r = simulate("floup",
                           "driver.theta = 0.5\nflp.d = 0.35\nflp.n = 50\nflp.past_window_exponent = 1.2\n"
                           "floup.lambda = 2.5\noutput.t_max = 10\n",
                           2024);
    REQUIRE(r.code == kOk);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    double last = -INFINITY;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const double t = std::stod(line.substr(0, comma)), v = std::stod(line.substr(comma + 1));
        CHECK(t > last);
        CHECK(std::isfinite(v));
        last = t;
        ++rows;
    }
    CHECK(rows == 501);
}

TEST_CASE("plot data for three log-model paths") {
    std::vector<std::string> files;
    for (const char* sigma : {"0.5", "1", "2"}) {
        CommandOptions o;
        o.config_path = write_file("log.cfg", std::string("driver.theta = 1\nflp.d = 0.35\nflp.n = 20\n"
                                                          "flp.past_window_exponent = 1.2\noutput.t_max = 5\n"
                                                          "model.id = log\nmodel.lambda = 2.5\nmodel.sigma = ") +
                                                  sigma + "\n");
        o.out_path = (scratch() / (std::string("log_sigma_") + sigma + ".csv")).string();
        o.seed = 8;
        std::ostringstream out, err;
        REQUIRE(cmd_simulate("sde", o, out, err) == kOk);
        files.push_back(o.out_path);
    }
    std::ostringstream out, err;
    REQUIRE(cmd_plotdata(files, "", out, err) == kOk);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    std::set<std::string> labels;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        labels.insert(line.substr(0, line.find(',')));
        ++rows;
    }
    CHECK(labels.size() == 3);
    CHECK(rows == 3 * 101);
}

TEST_CASE("verify: exit codes") {
    const Run g = verify("gamma_identities", "");
    CHECK(g.code == kOk);
    CHECK(g.out.find("FAIL") == std::string::npos);
    CHECK(g.out.find("gripenberg") != std::string::npos);

    const Run a = verify("appendix_calculus", "ensemble.replicates = 50\n");
    CHECK(a.code == kOk);
    CHECK(a.out.find("density") != std::string::npos);

    const std::string cov = "driver.theta = 1\nflp.d = 0.25\nflp.n = 10\nflp.past_window_exponent = 1.5\n"
                            "ensemble.replicates = 1000\nensemble.seed = 4\n";
    const Run ok = verify("covariance", cov);
    CHECK(ok.code == kOk);
    const Run neg = verify("covariance", cov + "ensemble.reference_d = 0.4\n");
    CHECK(neg.code == kVerifyFailed);
    CHECK(neg.out.find("FAIL") != std::string::npos);

    CHECK(verify("spectral", "").code == kConfigError);
    CHECK(verify("covariance", "flp.d = 0.7\n").code == kConfigError);
    CommandOptions missing;
    missing.config_path = (scratch() / "absent.cfg").string();
    std::ostringstream out, err;
    CHECK(cmd_verify("gamma_identities", missing, out, err) == kConfigError);
}

TEST_CASE("command-line binary") {
    CHECK(run_binary("") == kConfigError);
    CHECK(run_binary("simulate") == kConfigError);
    CHECK(run_binary("verify gamma_identities --bogus") == kConfigError);
    CHECK(run_binary("--help") == 0);
    const std::string cfg = write_file("bin.cfg", std::string(kFlp) + "ensemble.seed = 1\n");
    const std::string out1 = (scratch() / "bin1.csv").string(), out2 = (scratch() / "bin2.csv").string();
    CHECK(run_binary("simulate flp --config " + cfg + " --out " + out1) == kOk);
    CHECK(run_binary("simulate flp --config " + cfg + " --out " + out2) == kOk);
    CHECK(read_file(out1) == read_file(out2));
    CHECK(run_binary("simulate flp --config " + cfg + " --seed 2 --out " + out2) == kOk);
    CHECK(read_file(out1) != read_file(out2));
    CHECK(run_binary("simulate driver --config " + write_file("zero.cfg", "driver.theta = 0\nensemble.seed = 1\n")) ==
          kConfigError);
    CHECK(run_binary("verify gamma_identities") == kOk);
    CHECK(run_binary("plotdata " + write_file("junk.csv", "nonsense")) == kConfigError);
}
