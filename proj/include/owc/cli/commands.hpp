#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "owc/cli/config.hpp"
#include "owc/relay.hpp"

namespace owc::cli {

enum ExitCode : int { kOk = 0, kInvariantFailure = 1, kConfigError = 2, kNonConvergence = 3 };

/// Every requested metric at one configuration.
struct PointResult {
    std::optional<MetricReport> relay_cf;
    std::optional<MetricReport> relay_quad;
    std::optional<MetricReport> relay_mc;
    std::optional<MetricReport> direct_cf;
    std::optional<MetricReport> direct_quad;
    std::optional<MetricReport> direct_mc;
    std::vector<std::string> notes;
};

/// Evaluates the relay (and, when cfg.baseline is set, the direct link) with every method in
/// cfg.methods. Closed forms that do not apply leave their cells empty and add a note.
/// NonConvergence propagates.
///
/// Relay closed-form outage: the symmetric closed form when the relay sits at the midpoint;
/// the min-bound CDF F1 + F2 - F1F2 of the two hop CDFs when d_r is given explicitly.
/// Relay closed-form average SNR and rate: the k = 2 expressions when k = 2, else the general-k
/// approximations.
PointResult evaluate_point(const RunConfig& cfg);

struct SweepTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::optional<std::string> failed_integral;  ///< first non-converged integral, if any
};

/// Runs the configured sweep. Grid points run concurrently; rows come back in grid order.
SweepTable run_sweep(const RunConfig& cfg);

std::string to_csv(const SweepTable& t);
std::string to_json_rows(const SweepTable& t);

/// Formats a finite double with 10 significant digits; empty string for non-finite values.
std::string format_number(double x);

int cmd_metrics(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// One line of the validate report.
struct CheckResult {
    std::string name;
    bool pass = false;
    bool skipped = false;  ///< not applicable to this configuration; does not fail the run
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

std::vector<CheckResult> run_validation(const RunConfig& cfg);

/// Informational lines printed after the checks (pointing parameters under both conventions).
std::vector<std::string> validation_info(const RunConfig& cfg);

}  // namespace owc::cli
