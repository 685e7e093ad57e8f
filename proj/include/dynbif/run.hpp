// Scenario runner: orchestrates spectrum -> hypotheses -> bifurcation values
// -> index profile -> branch graph -> classification and writes the
// machine-readable artifacts.
#ifndef DYNBIF_RUN_HPP
#define DYNBIF_RUN_HPP

#include <string>

#include "dynbif/config.hpp"
#include "dynbif/report.hpp"

namespace dynbif {

// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitHypothesisFailed = 2;
inline constexpr int kExitUndeterminedBudget = 3;
inline constexpr int kExitConsistencyFlag = 4;

struct RunResult {
    int exit_code = kExitOk;
    Json report;
    std::string summary;  // one-line outcome for the console
};

// subcommands: spectrum | check | bifvalues | profile | branch | sweep | simulate
RunResult run_subcommand(const std::string& subcommand, const RunConfig& cfg);

// writes `text` under cfg.out_dir, creating the directory; returns the path
std::string write_artifact(const RunConfig& cfg, const std::string& filename,
                           const std::string& text);

}  // namespace dynbif

#endif
