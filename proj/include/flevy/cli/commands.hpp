#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace flevy::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericalError = 3 };

struct CommandOptions {
    std::string config_path;
    std::string out_path;  // empty: standard output
    std::optional<std::uint64_t> seed;
};

/// kind: driver, flp, floup or sde. Writes a `t,value` CSV.
int cmd_simulate(const std::string& kind, const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// suite: covariance, lrd, langevin, sst_residual, appendix_calculus or
/// gamma_identities. Prints the check table; exit 0 iff every check passes.
int cmd_verify(const std::string& suite, const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Merges `t,value` files into one `series,t,value` file.
int cmd_plotdata(const std::vector<std::string>& inputs, const std::string& out_path, std::ostream& out,
                 std::ostream& err);

}  // namespace flevy::cli
