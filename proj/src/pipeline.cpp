#include "dimorse/pipeline.hpp"

#include "dimorse/critical_groups.hpp"
#include "dimorse/morse_report.hpp"
#include "dimorse/robustness.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dimorse {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct ArtifactKind {
  const char* file;
  const char* format;
  const char* stage;
};

constexpr ArtifactKind kArtifacts[] = {
    {"graph.bin", "graph", "graph"},
    {"decomposition.json", "json", "morse"},
    {"morse_graph.dot", "dot", "morse"},
    {"condensation.dot", "dot", "morse"},
    {"lyapunov.csv", "csv", "lyapunov"},
    {"lyapunov.json", "json", "lyapunov"},
    {"critical_groups.json", "json", "homology"},
    {"critical_groups.csv", "csv", "homology"},
    {"report.json", "json", "report"},
    {"robustness.json", "json", "robustness"},
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read " + p.string() + " (run the earlier stages first)");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  if (ec) fail(ErrorCode::io, "cannot create " + p.parent_path().string() + ": " + ec.message());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + tmp.string());
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    if (!out) fail(ErrorCode::io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, p, ec);
  if (ec) fail(ErrorCode::io, "cannot move " + tmp.string() + " into place: " + ec.message());
}

ojson parse_json_file(const fs::path& p) {
  try {
    return ojson::parse(read_text(p));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, p.string() + " does not parse: " + e.what());
  }
}

// Checks are stored per stage so that stages run separately still add up
// to one manifest.
void record_checks(const fs::path& out, const std::string& stage, const std::vector<CheckResult>& checks) {
  const fs::path file = out / "checks.json";
  ojson all = fs::exists(file) ? parse_json_file(file) : ojson::object();
  ojson arr = ojson::array();
  for (const auto& c : checks) arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  all[stage] = arr;
  // Keep the stage order stable regardless of execution order.
  ojson sorted = ojson::object();
  for (const char* s : {"graph", "morse", "lyapunov", "homology", "report", "robustness"})
    if (all.contains(s)) sorted[s] = all[s];
  write_text(file, sorted.dump(1));
}

TransitionGraph load_graph(const fs::path& out, const Scenario& sc) {
  const fs::path p = out / "graph.bin";
  if (!fs::exists(p)) fail(ErrorCode::io, "missing " + p.string() + " (run the graph stage first)");
  TransitionGraph g = read_graph(p.string());
  const CubicalGrid grid = sc.grid();
  if (g.grid().depth() != grid.depth() || g.grid().dim() != grid.dim() || !g.grid().lo().isApprox(grid.lo()) ||
      !g.grid().hi().isApprox(grid.hi()))
    fail(ErrorCode::config, "persisted graph does not match the scenario grid");
  return g;
}

MorseDecomposition load_decomposition(const fs::path& out, const GraphAnalysis& ga) {
  return decomposition_from_json(ga, read_text(out / "decomposition.json"));
}

std::string ranks_text(const std::vector<int>& r) {
  std::string s = "(";
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
  return s + ")";
}

}  // namespace

std::string resolve_output_dir(const Scenario& sc, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("DIMORSE_OUTPUT_DIR"); env && *env) return env;
  return sc.output_dir;
}

std::vector<CheckResult> stage_graph(const Scenario& sc, const std::string& out) {
  const CubicalGrid grid = sc.grid();
  spdlog::info("[{}] building transition graph: {} cells, tau={}", sc.name, grid.size(), sc.graph.tau);
  const TransitionGraph g = build_graph(sc.system, grid, sc.graph);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + out + ": " + ec.message());
  const fs::path p = fs::path(out) / "graph.bin";
  write_graph(g, p.string() + ".tmp");
  fs::rename(p.string() + ".tmp", p, ec);
  if (ec) fail(ErrorCode::io, "cannot move graph into place: " + ec.message());
  std::size_t exits = 0;
  for (std::int32_t c = 0; c < g.size(); ++c) exits += g.exits(c);
  spdlog::info("[{}] graph: {} edges, {} exit cells", sc.name, g.edge_count(), exits);
  std::vector<CheckResult> checks;
  record_checks(out, "graph", checks);
  return checks;
}

std::vector<CheckResult> stage_morse(const Scenario& sc, const std::string& out) {
  const TransitionGraph g = load_graph(out, sc);
  GraphAnalysis ga(g);
  const CellSet global = global_attractor(ga);
  if (global.empty()) fail(ErrorCode::no_attractor_certificate, "every cell reaches the exit; no attractor in the box");
  MorseOptions opt;
  if (sc.prune) opt.prune = PruneOptions{std::make_shared<SpecRhs>(sc.system), sc.graph, sc.prune_max_diameter_cells};
  const MorseDecomposition d = morse_decomposition(ga, global, opt);
  verify_decomposition(ga, d);
  spdlog::info("[{}] global attractor {} cells, {} Morse sets, {} pruning merges", sc.name, global.size(), d.size(),
               d.pruned_merges);
  write_text(fs::path(out) / "decomposition.json", decomposition_json(g, d));
  write_text(fs::path(out) / "morse_graph.dot", decomposition_dot(g, d));
  write_text(fs::path(out) / "condensation.dot", condensation_dot(ga));

  std::vector<CheckResult> checks;
  checks.push_back({"decomposition_invariants", true, "disjointness, filtration, ordering and invariance re-verified"});
  if (sc.checks.morse_sets) {
    const bool ok = d.size() == *sc.checks.morse_sets;
    checks.push_back({"morse_set_count", ok,
                      std::to_string(d.size()) + " sets, expected " + std::to_string(*sc.checks.morse_sets)});
  }
  record_checks(out, "morse", checks);
  return checks;
}

std::vector<CheckResult> stage_lyapunov(const Scenario& sc, const std::string& out) {
  const TransitionGraph g = load_graph(out, sc);
  GraphAnalysis ga(g);
  const MorseDecomposition d = load_decomposition(out, ga);
  LyapunovField f = graph_ml_function(d, g);

  std::vector<CheckResult> checks;
  bool ladder = true, strict = true, margin = true;
  std::size_t edges = 0;
  for (auto c : f.region) {
    const int k = d.morse_index[c];
    if (k > 0) {
      ladder = ladder && f.V[c] == k - 1.0;
      margin = margin && f.w[c] == 0.0;
      continue;
    }
    margin = margin && f.w[c] > 0.0;
    for (auto w : g.successors(c)) {
      ++edges;
      strict = strict && f.V[w] < f.V[c];
    }
  }
  checks.push_back({"value_ladder", ladder, "V(M_k) = k - 1 on every Morse cell"});
  checks.push_back({"strict_decrease", strict, std::to_string(edges) + " edges leaving transient cells"});
  checks.push_back({"margin_support", margin, "w = 0 exactly on Morse cells"});

  CertificateReport cert;
  const CertificateReport* cert_ptr = nullptr;
  if (sc.certificate_samples > 0) {
    cert = decrease_certificate(f, sc.system, g, sc.certificate_samples, hash_combine(sc.seed, 0x1ea9u),
                                sc.certificate_tolerance);
    cert_ptr = &cert;
    const bool ok = cert.evaluated > 0 && cert.pass_rate() >= sc.checks.certificate_min_rate;
    checks.push_back({"decrease_certificate", ok,
                      format_double(cert.pass_rate(), 6) + " of " + std::to_string(cert.evaluated) +
                          " samples, required " + format_double(sc.checks.certificate_min_rate, 6)});
    spdlog::info("[{}] certificate pass rate {} (tolerance {})", sc.name, cert.pass_rate(), cert.tolerance);
  }
  write_text(fs::path(out) / "lyapunov.csv", lyapunov_csv(f, g));
  write_text(fs::path(out) / "lyapunov.json", lyapunov_json(f, cert_ptr));
  record_checks(out, "lyapunov", checks);
  return checks;
}

std::vector<CheckResult> stage_homology(const Scenario& sc, const std::string& out) {
  const TransitionGraph g = load_graph(out, sc);
  GraphAnalysis ga(g);
  const MorseDecomposition d = load_decomposition(out, ga);
  const LyapunovField f = graph_ml_function(d, g);
  CriticalGroupOptions opt;
  opt.coefficients = sc.coefficients;
  opt.ring = sc.neighborhood_depth;
  opt.max_ring = sc.neighborhood_max_depth;

  ojson j;
  j["coefficients"] = coefficients_name(sc.coefficients);
  ojson sets = ojson::array();
  std::ostringstream csv;
  csv << "k,method";
  for (int q = 0; q <= g.grid().dim(); ++q) csv << ",C" << q;
  csv << '\n';
  bool agree = true;
  std::vector<std::vector<int>> all;
  for (int k = 1; k <= d.size(); ++k) {
    const CriticalGroupResult r = critical_groups(ga, d, k, opt);
    const BettiVector lv = critical_groups_levelset(f, k - 1.5, k - 0.5, g.grid(), sc.coefficients);
    const bool same = lv == r.ranks;
    agree = agree && same;
    spdlog::info("[{}] C(M_{}) = {} (depth {}), level sets {}", sc.name, k, ranks_text(r.ranks.ranks), r.ring,
                 ranks_text(lv.ranks));
    ojson e;
    e["k"] = k;
    e["ranks"] = r.ranks.ranks;
    e["torsion"] = r.ranks.torsion;
    e["neighborhood_depth"] = r.ring;
    e["W_cells"] = r.w_cells;
    e["U_cells"] = r.u_cells;
    e["second_ranks"] = r.second.ranks;
    e["second_W_cells"] = r.w2_cells;
    e["second_U_cells"] = r.u2_cells;
    e["levelset_interval"] = {k - 1.5, k - 0.5};
    e["levelset_ranks"] = lv.ranks;
    e["levelset_agrees"] = same;
    sets.push_back(e);
    all.push_back(r.ranks.ranks);
    for (const auto* row : {&r.ranks, &r.second, &lv}) {
      csv << k << ',' << (row == &r.ranks ? "pair" : row == &r.second ? "larger_pair" : "levelset");
      for (int q = 0; q <= g.grid().dim(); ++q) csv << ',' << (*row)[q];
      csv << '\n';
    }
  }
  j["morse_sets"] = sets;
  write_text(fs::path(out) / "critical_groups.json", j.dump(1));
  write_text(fs::path(out) / "critical_groups.csv", csv.str());

  std::vector<CheckResult> checks;
  checks.push_back({"neighborhood_pairs_agree", true, "each Morse set matched a strictly larger neighborhood pair"});
  checks.push_back({"levelset_agreement", agree, "sublevel pairs (k - 1.5, k - 0.5) against neighborhood pairs"});
  if (sc.checks.critical_groups) {
    const bool ok = all == *sc.checks.critical_groups;
    std::string got;
    for (const auto& r : all) got += ranks_text(r);
    checks.push_back({"critical_groups_expected", ok, "computed " + got});
  }
  record_checks(out, "homology", checks);
  return checks;
}

std::vector<CheckResult> stage_report(const Scenario& sc, const std::string& out) {
  const TransitionGraph g = load_graph(out, sc);
  GraphAnalysis ga(g);
  const MorseDecomposition d = load_decomposition(out, ga);
  const ojson cg = parse_json_file(fs::path(out) / "critical_groups.json");
  std::vector<BettiVector> groups;
  try {
    if (cg.at("coefficients").get<std::string>() != coefficients_name(sc.coefficients))
      fail(ErrorCode::config, "critical groups were computed with other coefficients");
    for (const auto& e : cg.at("morse_sets")) {
      BettiVector b;
      b.coefficients = sc.coefficients;
      b.ranks = e.at("ranks").get<std::vector<int>>();
      b.torsion = e.at("torsion").get<std::vector<std::vector<long>>>();
      groups.push_back(b);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, std::string("critical_groups.json is malformed: ") + e.what());
  }
  if (static_cast<int>(groups.size()) != d.size())
    fail(ErrorCode::config, "critical groups do not match the decomposition");
  const CellSet region = ga.basin(d.region);
  const BettiVector beta = relative_betti(g.grid(), region, {}, sc.coefficients);
  const MorseReport rep = morse_report(groups, beta);
  write_text(fs::path(out) / "report.json", morse_report_json(rep));
  spdlog::info("[{}] type numbers {}, betti {}, Q {}", sc.name,
               ranks_text(std::vector<int>(rep.type_numbers.begin(), rep.type_numbers.end())), ranks_text(beta.ranks),
               ranks_text(std::vector<int>(rep.Q.begin(), rep.Q.end())));

  std::vector<CheckResult> checks;
  if (sc.checks.require_report_pass) {
    checks.push_back({"morse_inequalities", rep.inequalities_pass, "partial alternating sums"});
    checks.push_back({"morse_equation", rep.equation_pass,
                      "remainder " + std::to_string(rep.remainder) + ", Q coefficients nonnegative"});
  }
  record_checks(out, "report", checks);
  write_manifest(sc, out);
  return checks;
}

std::vector<CheckResult> stage_robustness(const Scenario& sc, const std::string& out) {
  std::vector<CheckResult> checks;
  if (sc.robustness_deltas.empty()) {
    record_checks(out, "robustness", checks);
    return checks;
  }
  const CubicalGrid grid = sc.grid();
  const auto entries = inflated_robustness(sc.system, grid, sc.graph, sc.robustness_deltas, sc.inflation_slack);
  write_text(fs::path(out) / "robustness.json", robustness_json(entries, grid.max_width()));
  checks.push_back({"robustness_monotone", distances_monotone(entries, grid.max_width()),
                    "non-decreasing in delta up to one cell width"});
  record_checks(out, "robustness", checks);
  return checks;
}

void write_manifest(const Scenario& sc, const std::string& out) {
  const fs::path dir(out);
  ojson m;
  m["scenario"] = sc.name;
  m["seed"] = sc.seed;
  ojson arts = ojson::array();
  for (const auto& a : kArtifacts)
    if (fs::exists(dir / a.file)) arts.push_back({{"file", a.file}, {"format", a.format}, {"stage", a.stage}});
  m["artifacts"] = arts;
  const ojson checks = fs::exists(dir / "checks.json") ? parse_json_file(dir / "checks.json") : ojson::object();
  bool all = true;
  for (const auto& [stage, list] : checks.items())
    for (const auto& c : list) all = all && c.at("passed").get<bool>();
  m["checks"] = checks;
  m["all_checks_passed"] = all;
  write_text(dir / "manifest.json", m.dump(1));
}

int run_pipeline(const Scenario& sc, const std::string& out) {
  std::error_code ec;
  fs::remove(fs::path(out) / "checks.json", ec);
  fs::remove(fs::path(out) / "error.json", ec);
  std::vector<CheckResult> all;
  auto add = [&](std::vector<CheckResult> c) { all.insert(all.end(), c.begin(), c.end()); };
  add(stage_graph(sc, out));
  add(stage_morse(sc, out));
  add(stage_lyapunov(sc, out));
  add(stage_homology(sc, out));
  add(stage_robustness(sc, out));
  add(stage_report(sc, out));
  bool ok = true;
  for (const auto& c : all) {
    if (!c.passed) spdlog::warn("[{}] check {} failed: {}", sc.name, c.name, c.detail);
    ok = ok && c.passed;
  }
  return ok ? 0 : static_cast<int>(ErrorCode::check_failed);
}

namespace {

bool numbers_close(const ojson& a, const ojson& b) {
  if (a.is_number_integer() && b.is_number_integer()) return a.get<long long>() == b.get<long long>();
  const double x = a.get<double>(), y = b.get<double>();
  return std::fabs(x - y) <= 1e-9 + 1e-9 * std::max(std::fabs(x), std::fabs(y));
}

void diff_json(const ojson& a, const ojson& b, const std::string& path, std::vector<std::string>& out) {
  if (a.is_number() && b.is_number()) {
    if (!numbers_close(a, b)) out.push_back(path + ": " + a.dump() + " != " + b.dump());
    return;
  }
  if (a.type() != b.type()) {
    out.push_back(path + ": " + a.dump() + " != " + b.dump());
    return;
  }
  if (a.is_object()) {
    for (const auto& [k, v] : a.items()) {
      if (!b.contains(k))
        out.push_back(path + "." + k + ": missing in golden");
      else
        diff_json(v, b.at(k), path + "." + k, out);
    }
    for (const auto& [k, v] : b.items())
      if (!a.contains(k)) out.push_back(path + "." + k + ": missing in current report");
    return;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) out.push_back(path + ": length " + std::to_string(a.size()) + " != " + std::to_string(b.size()));
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) diff_json(a[i], b[i], path + "[" + std::to_string(i) + "]", out);
    return;
  }
  if (a != b) out.push_back(path + ": " + a.dump() + " != " + b.dump());
}

}  // namespace

std::string VerifyResult::json() const {
  ojson j;
  j["identical"] = identical;
  j["ranks_equal"] = ranks_equal;
  j["rank_differences"] = rank_differences;
  j["cell_differences"] = cell_differences;
  return j.dump(1);
}

VerifyResult verify_against(const std::string& out, const std::string& golden) {
  fs::path gpath(golden);
  if (fs::is_directory(gpath)) gpath /= "report.json";
  if (!fs::exists(gpath)) fail(ErrorCode::missing_golden, "golden report " + gpath.string() + " does not exist");
  const fs::path cur = fs::path(out) / "report.json";
  if (!fs::exists(cur)) fail(ErrorCode::io, "no report in " + out + " (run the report stage first)");
  VerifyResult r;
  diff_json(parse_json_file(cur), parse_json_file(gpath), "report", r.rank_differences);
  r.ranks_equal = r.rank_differences.empty();

  const fs::path dcur = fs::path(out) / "decomposition.json", dgold = gpath.parent_path() / "decomposition.json";
  if (fs::exists(dcur) && fs::exists(dgold) && fs::canonical(dcur) != fs::canonical(dgold)) {
    const ojson a = parse_json_file(dcur), b = parse_json_file(dgold);
    if (a.at("grid") != b.at("grid")) r.cell_differences.push_back("grid: " + a.at("grid").dump() + " vs " + b.at("grid").dump());
    const auto& sa = a.at("morse_sets");
    const auto& sb = b.at("morse_sets");
    for (std::size_t k = 0; k < std::min(sa.size(), sb.size()); ++k)
      if (sa[k].at("cells") != sb[k].at("cells"))
        r.cell_differences.push_back("M" + std::to_string(k + 1) + ": " + std::to_string(sa[k].at("cells").size()) +
                                     " cells vs " + std::to_string(sb[k].at("cells").size()) + " cells");
    if (sa.size() != sb.size())
      r.cell_differences.push_back("Morse set count " + std::to_string(sa.size()) + " vs " + std::to_string(sb.size()));
  }
  r.identical = r.ranks_equal && r.cell_differences.empty();
  return r;
}

std::string error_record(const std::string& stage, const Error& e) {
  ojson j;
  j["stage"] = stage;
  j["code"] = static_cast<int>(e.code());
  j["error"] = error_code_name(e.code());
  j["message"] = e.what();
  return j.dump();
}

}  // namespace dimorse
