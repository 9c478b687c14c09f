#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "capillary/constraints.hpp"
#include "capillary/energy.hpp"
#include "capillary/optimizer.hpp"

namespace capillary {

enum class Command { Minimize, SweepDelta, SweepEps, Steiner, Energy, Check, Counterexample, Recovery };

std::string to_string(Command c);

struct RunConfig {
    Command command = Command::Steiner;
    ConstraintSpec spec{{}, 1e-2, 1e-9, 1e-8};
    EnergyParams params;
    OptimizerConfig optimizer;
    std::size_t n = 256;
    std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
    std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
    std::vector<double> s_values{0.4, 0.6};
    std::vector<std::size_t> levels{16, 32, 64, 128};
    /// "tangential" or "crossing".
    std::string geometry = "tangential";
    std::size_t samples = 1000;
    /// Input curve file (energy, check, recovery, and optionally minimize).
    std::string curve;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
};

/// Flat "key = value" lines; '#' starts a comment line. Lists are comma
/// separated, point lists "x,y;x,y". Unknown keys, malformed values and
/// out-of-range values raise ConfigError carrying the line number.
RunConfig parse_config(const std::string& text);

/// Every key, in a fixed order; parse_config(serialize(c)) reproduces c.
std::string serialize(const RunConfig& config);

/// Runs the command, writing files under config.out_dir and a short report to
/// `out`. Returns 0, or the error kind's code after printing one
/// "error code=<k> kind=<name> message=<text>" line to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Exit code and error line for an exception escaping before `run`.
int report_error(const std::exception& e, std::ostream& err);

} // namespace capillary
