#include "dimorse/pipeline.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

namespace {

using namespace dimorse;

int report_error(const std::string& stage, const Error& e, const std::string& out) {
  const std::string rec = error_record(stage, e);
  std::cerr << rec << '\n';
  // Configuration problems leave no artifacts behind; later failures are
  // recorded next to whatever the earlier stages produced.
  if (e.code() != ErrorCode::config && !out.empty() && std::filesystem::is_directory(out)) {
    std::ofstream f(std::filesystem::path(out) / "error.json");
    f << rec << '\n';
  }
  return static_cast<int>(e.code());
}

int print_checks(const std::vector<CheckResult>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.passed;
  }
  return ok ? 0 : static_cast<int>(ErrorCode::check_failed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attractors, Morse decompositions, Lyapunov functions and critical groups of differential inclusions"};
  app.require_subcommand(1);
  int threads = 0;
  std::string log_level = "info";
  app.add_option("--threads", threads, "Worker thread cap (0 = all hardware threads)")->check(CLI::NonNegativeNumber);
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, critical or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  std::string scenario_path, out_override, golden;
  using Stage = std::function<std::vector<CheckResult>(const Scenario&, const std::string&)>;
  const std::map<std::string, std::pair<Stage, std::string>> stages = {
      {"graph", {stage_graph, "Build and persist the transition graph"}},
      {"morse", {stage_morse, "Global attractor and Morse decomposition from the persisted graph"}},
      {"lyapunov", {stage_lyapunov, "Graph Morse-Lyapunov function and its decrease certificate"}},
      {"homology", {stage_homology, "Critical groups of every Morse set"}},
      {"report", {stage_report, "Morse type numbers, inequalities and equation; writes the manifest"}},
      {"robustness", {stage_robustness, "Attractors of the inflated systems and their Hausdorff distances"}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, st] : stages) {
    auto* s = app.add_subcommand(name, st.second);
    s->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    s->add_option("--out", out_override, "Output directory (overrides DIMORSE_OUTPUT_DIR and the scenario)");
    subs[name] = s;
  }
  auto* run = app.add_subcommand("run", "Run every stage in order");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_override, "Output directory (overrides DIMORSE_OUTPUT_DIR and the scenario)");
  auto* verify = app.add_subcommand("verify", "Compare the persisted report against a golden report");
  verify->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  verify->add_option("--golden", golden, "Golden report.json or a directory containing one")->required();
  verify->add_option("--out", out_override, "Output directory (overrides DIMORSE_OUTPUT_DIR and the scenario)");

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("dimorse");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));
  if (threads > 0) set_thread_count(threads);

  std::string stage = "config";
  std::string out;
  try {
    const Scenario sc = load_scenario(scenario_path);
    out = resolve_output_dir(sc, out_override);
    if (run->parsed()) {
      stage = "run";
      const int code = run_pipeline(sc, out);
      std::cout << "artifacts in " << out << (code == 0 ? ", all checks passed" : ", some checks failed") << '\n';
      return code;
    }
    if (verify->parsed()) {
      stage = "verify";
      const VerifyResult r = verify_against(out, golden);
      std::cout << r.json() << '\n';
      return r.ranks_equal ? 0 : static_cast<int>(ErrorCode::check_failed);
    }
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) {
        stage = name;
        return print_checks(stages.at(name).first(sc, out));
      }
  } catch (const Error& e) {
    return report_error(stage, e, out);
  } catch (const std::exception& e) {
    return report_error(stage, Error(ErrorCode::io, e.what()), out);
  }
  return 0;
}
