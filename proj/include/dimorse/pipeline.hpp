#pragma once

#include "dimorse/scenario.hpp"

#include <string>
#include <vector>

namespace dimorse {

// Output directory: the explicit override if nonempty, else the
// DIMORSE_OUTPUT_DIR environment variable, else the scenario's own.
std::string resolve_output_dir(const Scenario& sc, const std::string& override_dir = "");

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Each stage reads the artifacts of the previous one from `out` and writes
// its own; returns the checks it evaluated.
std::vector<CheckResult> stage_graph(const Scenario& sc, const std::string& out);
std::vector<CheckResult> stage_morse(const Scenario& sc, const std::string& out);
std::vector<CheckResult> stage_lyapunov(const Scenario& sc, const std::string& out);
std::vector<CheckResult> stage_homology(const Scenario& sc, const std::string& out);
std::vector<CheckResult> stage_report(const Scenario& sc, const std::string& out);
std::vector<CheckResult> stage_robustness(const Scenario& sc, const std::string& out);

// Writes manifest.json: the artifacts present in `out` and the checks
// recorded by every stage run so far.
void write_manifest(const Scenario& sc, const std::string& out);

// All stages in order (robustness only when δ values are configured), then
// the manifest. Returns 0 when every check passes and check_failed else;
// stage errors propagate as Error.
int run_pipeline(const Scenario& sc, const std::string& out);

struct VerifyResult {
  bool ranks_equal = true;
  bool identical = true;
  std::vector<std::string> rank_differences;
  std::vector<std::string> cell_differences;
  std::string json() const;
};

// Compares the report (and, when both exist, the decomposition) in `out`
// against a golden report file or a directory holding report.json.
// Raises missing_golden when the golden report does not exist.
VerifyResult verify_against(const std::string& out, const std::string& golden);

// One-line JSON error record for a failed run.
std::string error_record(const std::string& stage, const Error& e);

}  // namespace dimorse
