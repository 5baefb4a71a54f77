#pragma once

#include "hycurv/compat.hpp"
#include "hycurv/config.hpp"
#include "hycurv/probes.hpp"
#include "hycurv/sweep.hpp"

#include <string>
#include <vector>

namespace hycurv {

/// JSON renderers with stable key order; identical inputs give identical
/// bytes. Timestamps never appear here (they go to the run metadata file).

std::string render_solve_summary(const RunConfig& rc, double eps, const SolutionSummary& sm,
                                 double delta, int continuation_steps, int newton_iterations);

std::string render_sweep_report(const RunConfig& rc, const SweepReport& report,
                                const BracketReport* bracket,
                                const std::vector<BoundaryGradientReport>& boundary);

struct VerifyBundle {
    const CompatibilityReport* compat = nullptr;
    const SolutionSummary* summary = nullptr;
    const ViscosityProbeReport* viscosity = nullptr;
    const TouchingReport* touching = nullptr;
    const SandwichReport* sandwich = nullptr;
    double sandwich_c0 = 0.0;
    const JacobianSpotCheck* jacobian = nullptr;
    const ConditionStatus* sigma_on_solution = nullptr;
    bool compat_fatal = false;
    bool all_passed = false;
};

std::string render_verify_report(const RunConfig& rc, double eps, const VerifyBundle& b);

std::string render_log_line(double eps, const ContinuationLogEntry& e);

std::string render_run_meta(const std::string& command, const std::string& config_path);

} // namespace hycurv
