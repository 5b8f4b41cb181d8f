#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "weakflux/scatter1d.hpp"
#include "weakflux/sterngerlach.hpp"

namespace weakflux {

enum class Command {
    SgDensity,
    SgPt,
    SgPhaseGrid,
    SgMax,
    ScatterReport,
    TeReport,
    UncCheck,
};

const char* command_name(Command c);
Command command_from_name(std::string_view name);

/// Grid controls for the figure commands. Negative extents mean
/// "derive from the model" (t_max = 2*t_bar, symmetric z0 range).
struct GridSpec {
    int n_chi = 101;
    int n_t = 501;
    double t_min = 0.0;
    double t_max = -1.0;
    int n_z0 = 161;
    double z0_min = 0.0;
    double z0_max = -1.0;
    bool z0_auto = true;
};

struct RunConfig {
    Command command = Command::SgMax;
    SGConfig sg;
    ScatterConfig scatter;
    QuadratureSpec quad;
    GridSpec grid;
    std::string out;  // empty: stdout
    std::uint64_t seed = 1;
    int cases = 200;
    int threads = 0;  // 0: machine parallelism
    std::vector<std::string> warnings;
};

/// Parses the sectioned key=value config format ('#' comments, lowercase
/// snake-case keys, one [section] per nested record). Unknown keys are
/// rejected; all physical invariants are enforced here.
RunConfig parse_config(std::string_view text);

struct UncCheckReport {
    std::string csv;
    int cases = 0;
    int checks = 0;
    int failures = 0;
    std::string summary;
};

/// Samples random pre/post pairs (coherent states and spinors) and verifies
/// the uncertainty-gap, identity, bound and equality properties case by
/// case. Deterministic for a fixed seed.
UncCheckReport unc_check(const RunConfig& cfg);

/// Executes a figure/report command and returns the CSV payload.
std::string run_figure(const RunConfig& cfg);

/// Full command dispatch: writes the artifact to cfg.out (or stdout) and
/// returns the process exit code (0 ok, 2 validation, 3 numerical,
/// 4 property failure).
int run_command(const RunConfig& cfg, std::ostream& status);

}  // namespace weakflux
