#pragma once

#include "hycurv/problem.hpp"

#include <limits>
#include <string>
#include <vector>

namespace hycurv {

struct ScheduleConfig {
    std::vector<double> eps_list;
    double eps0 = 0.0;         // reference level for the C1 diagnostic
    double bracket_eps0 = 0.0; // inner level for domain bracketing
    double verify_eps = 0.0;   // solve level used by the verify command
};

struct CompatConfig {
    double sigma = 0.0;
    std::vector<double> sigma_list; // aligned with eps_list when present
    double r0 = std::numeric_limits<double>::infinity();
    double c0 = 0.0;                // enclosing half-ball radius; 0 = unset
};

struct OutputConfig {
    std::string dir = "out";
};

/// Run configuration: flat key = value sections or the equivalent JSON.
struct RunConfig {
    ProblemSpec problem;
    ScheduleConfig schedule;
    CompatConfig compat;
    OutputConfig output;
    std::string psi_text;
    std::string ubar_text;

    double sigma_for(double eps) const;
};

/// Load from file; a leading '{' selects the JSON reader. Configuration
/// problems (including expression syntax errors) surface as config/parse
/// errors, which the CLI maps to exit code 1.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_json(const std::string& text);

} // namespace hycurv
