#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace graphwave::cli {

/// Everything needed to replay one run. Unset model fields are NaN / 0 and
/// are rejected before dispatch.
struct RunConfig {
    std::string command;
    double p = std::numeric_limits<double>::quiet_NaN();
    double omega = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
    int N = 0;
    int M = 0;  // points per edge, 0 = command default
    std::string kind = "symmetric";
    int k = 0;

    // evolve
    double dt = 1e-3;
    double T = 1.0;
    int sample_every = 10;
    std::string base = "sampled";  // or "discrete"
    double scale = 1.0;
    double perturb = 0.0;
    unsigned seed = 1;
    bool zero_sum = false;
    bool linear = false;
    double escape = std::numeric_limits<double>::infinity();
    double wall_tol = 1e-6;

    std::string out;  // empty = stdout

    bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);
/// Accepts either a bare config object or any emitted JSON with a "config" key.
RunConfig config_from_json(const nlohmann::json& j);

/// Points per edge used when the config leaves M at 0.
int default_points(const std::string& command);

/// JSON text with every double at 17 significant digits.
std::string dump(const nlohmann::json& j);

/// Exit codes: 0 ok, 1 unknown subcommand, 2 precondition or bad flags,
/// 3 NoRoot / Unresolved.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Executes an already-validated config.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Worker count for --sweep: GRAPHWAVE_THREADS if set and positive, else the
/// hardware count.
unsigned sweep_threads();

}  // namespace graphwave::cli
