#include "dimorse/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dimorse {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorCode::config, "scenario " + where + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) bad(where, "unknown key \"" + it.key() + "\"");
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(where, "expected a finite number");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

Vec vector_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a nonempty array of numbers");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = number(j[i], where);
  return v;
}

Mat matrix_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) bad(where, "rows must be nonempty arrays");
  Mat m(static_cast<int>(j.size()), static_cast<int>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad(where, "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<int>(r), static_cast<int>(c)) = number(j[r][c], where);
  }
  return m;
}

SetValuedMapSpec parse_system(const json& j, std::string& kind) {
  if (!j.is_object() || !j.contains("type")) bad("system", "needs a \"type\"");
  kind = j.at("type").get<std::string>();
  try {
    if (kind == "chua") {
      only_keys(j, "system", {"type", "alpha", "beta", "b", "k"});
      return SetValuedMapSpec::chua(number(j.at("alpha"), "system.alpha"), number(j.at("beta"), "system.beta"),
                                    number(j.at("b"), "system.b"), number(j.at("k"), "system.k"));
    }
    if (kind == "affine") {
      only_keys(j, "system", {"type", "A", "c", "switches", "regions"});
      const Mat A = matrix_of(j.at("A"), "system.A");
      if (A.rows() != A.cols()) bad("system.A", "must be square");
      const int m = static_cast<int>(A.rows());
      Vec c = j.contains("c") ? vector_of(j.at("c"), "system.c") : Vec::Zero(m);
      std::vector<SwitchingTerm> terms;
      for (const auto& s : j.value("switches", json::array())) {
        only_keys(s, "system.switches", {"coord", "gain"});
        terms.push_back({integer(s.at("coord"), "system.switches.coord"), vector_of(s.at("gain"), "system.switches.gain")});
      }
      std::vector<PiecewiseRegion> regions;
      for (const auto& r : j.value("regions", json::array())) {
        only_keys(r, "system.regions", {"normals", "offsets", "generators"});
        PiecewiseRegion reg;
        reg.normals = matrix_of(r.at("normals"), "system.regions.normals");
        reg.offsets = vector_of(r.at("offsets"), "system.regions.offsets");
        for (const auto& gtr : r.at("generators")) {
          only_keys(gtr, "system.regions.generators", {"matrix", "offset"});
          reg.generators.push_back({matrix_of(gtr.at("matrix"), "system.regions.generators.matrix"),
                                    vector_of(gtr.at("offset"), "system.regions.generators.offset")});
        }
        regions.push_back(std::move(reg));
      }
      return SetValuedMapSpec(A, c, terms, regions);
    }
  } catch (const json::exception& e) {
    bad("system", e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    bad("system", e.what());
  }
  bad("system.type", "must be \"chua\" or \"affine\"");
}

Selection parse_selection(const json& j, std::uint64_t seed, std::size_t index) {
  only_keys(j, "graph.selections", {"strategy", "seed", "vertex", "target"});
  Selection s;
  try {
    s.strategy = parse_strategy(j.at("strategy").get<std::string>());
  } catch (const Error& e) {
    bad("graph.selections", e.what());
  }
  s.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : hash_combine(seed, index);
  if (j.contains("vertex")) s.vertex = integer(j.at("vertex"), "graph.selections.vertex");
  if (j.contains("target")) s.target = vector_of(j.at("target"), "graph.selections.target");
  return s;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("scenario is not valid JSON: ") + e.what());
  }
  Scenario sc;
  try {
    only_keys(j, "root", {"name", "system", "grid", "graph", "morse", "lyapunov", "homology", "robustness", "output_dir",
                          "seed", "checks", "description"});
    if (!j.contains("name") || !j.at("name").is_string()) bad("name", "a string name is required");
    sc.name = j.at("name").get<std::string>();
    if (sc.name.empty() || sc.name.find('/') != std::string::npos) bad("name", "must be a nonempty plain name");
    if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) bad("seed", "a nonnegative integer seed is required");
    sc.seed = j.at("seed").get<std::uint64_t>();
    if (!j.contains("system")) bad("system", "missing");
    sc.system = parse_system(j.at("system"), sc.system_kind);
    const int m = sc.system.dim();

    const json& g = j.at("grid");
    only_keys(g, "grid", {"lo", "hi", "depth"});
    sc.lo = vector_of(g.at("lo"), "grid.lo");
    sc.hi = vector_of(g.at("hi"), "grid.hi");
    sc.depth = integer(g.at("depth"), "grid.depth");
    if (sc.lo.size() != m || sc.hi.size() != m) bad("grid", "box dimension differs from the system dimension");
    for (int i = 0; i < m; ++i)
      if (!(sc.lo[i] < sc.hi[i])) bad("grid", "box must satisfy lo < hi on every axis");
    if (sc.depth < 0 || sc.depth * m > 30) bad("grid.depth", "must be in [0, 30/m] so cell indices fit 32 bits");

    const json& gp = j.at("graph");
    only_keys(gp, "graph", {"tau", "h", "rho", "points_per_cell", "selections"});
    sc.graph.tau = number(gp.at("tau"), "graph.tau");
    if (!(sc.graph.tau > 0)) bad("graph.tau", "must be positive");
    if (gp.contains("h")) {
      sc.graph.h = number(gp.at("h"), "graph.h");
      if (!(sc.graph.h > 0) || sc.graph.h > sc.graph.tau) bad("graph.h", "must be in (0, tau]");
    }
    if (gp.contains("rho")) {
      sc.graph.rho = number(gp.at("rho"), "graph.rho");
      if (sc.graph.rho < 0) bad("graph.rho", "must be nonnegative (omit it for one cell width)");
    }
    if (gp.contains("points_per_cell")) {
      sc.graph.sampling.points_per_cell = integer(gp.at("points_per_cell"), "graph.points_per_cell");
      if (sc.graph.sampling.points_per_cell < 0) bad("graph.points_per_cell", "must be nonnegative");
    }
    sc.graph.sampling.seed = sc.seed;
    if (gp.contains("selections")) {
      const json& sel = gp.at("selections");
      if (!sel.is_array() || sel.empty()) bad("graph.selections", "must be a nonempty array");
      for (std::size_t i = 0; i < sel.size(); ++i)
        sc.graph.sampling.selections.push_back(parse_selection(sel[i], sc.seed, i));
    }

    if (j.contains("morse")) {
      const json& mo = j.at("morse");
      only_keys(mo, "morse", {"prune", "max_diameter_cells"});
      sc.prune = mo.value("prune", false);
      if (mo.contains("max_diameter_cells")) {
        sc.prune_max_diameter_cells = number(mo.at("max_diameter_cells"), "morse.max_diameter_cells");
        if (!(sc.prune_max_diameter_cells > 0)) bad("morse.max_diameter_cells", "must be positive");
      }
    }
    if (j.contains("lyapunov")) {
      const json& ly = j.at("lyapunov");
      only_keys(ly, "lyapunov", {"samples", "tolerance"});
      if (ly.contains("samples")) {
        const int n = integer(ly.at("samples"), "lyapunov.samples");
        if (n < 0) bad("lyapunov.samples", "must be nonnegative");
        sc.certificate_samples = static_cast<std::size_t>(n);
      }
      if (ly.contains("tolerance")) {
        sc.certificate_tolerance = number(ly.at("tolerance"), "lyapunov.tolerance");
        if (sc.certificate_tolerance < 0) bad("lyapunov.tolerance", "must be nonnegative (omit for one slope unit)");
      }
    }
    if (j.contains("homology")) {
      const json& ho = j.at("homology");
      only_keys(ho, "homology", {"coefficients", "neighborhood_depth", "max_neighborhood_depth"});
      if (ho.contains("coefficients")) {
        try {
          sc.coefficients = parse_coefficients(ho.at("coefficients").get<std::string>());
        } catch (const Error& e) {
          bad("homology.coefficients", e.what());
        }
      }
      if (ho.contains("neighborhood_depth")) sc.neighborhood_depth = integer(ho.at("neighborhood_depth"), "homology.neighborhood_depth");
      if (ho.contains("max_neighborhood_depth"))
        sc.neighborhood_max_depth = integer(ho.at("max_neighborhood_depth"), "homology.max_neighborhood_depth");
      if (sc.neighborhood_depth < 1 || sc.neighborhood_max_depth <= sc.neighborhood_depth)
        bad("homology", "need 1 <= neighborhood_depth < max_neighborhood_depth");
    }
    if (j.contains("robustness")) {
      const json& ro = j.at("robustness");
      only_keys(ro, "robustness", {"deltas", "slack"});
      if (ro.contains("deltas")) {
        for (const auto& d : ro.at("deltas")) sc.robustness_deltas.push_back(number(d, "robustness.deltas"));
        if (sc.robustness_deltas.empty() || sc.robustness_deltas.front() != 0.0)
          bad("robustness.deltas", "must start at 0");
        for (std::size_t i = 1; i < sc.robustness_deltas.size(); ++i)
          if (!(sc.robustness_deltas[i] > sc.robustness_deltas[i - 1])) bad("robustness.deltas", "must be strictly ascending");
      }
      if (ro.contains("slack")) {
        sc.inflation_slack = number(ro.at("slack"), "robustness.slack");
        if (!(sc.inflation_slack > 0)) bad("robustness.slack", "must be positive");
      }
    }
    if (j.contains("checks")) {
      const json& ch = j.at("checks");
      only_keys(ch, "checks", {"morse_sets", "critical_groups", "certificate_min_rate", "require_report_pass"});
      if (ch.contains("morse_sets")) sc.checks.morse_sets = integer(ch.at("morse_sets"), "checks.morse_sets");
      if (ch.contains("critical_groups"))
        sc.checks.critical_groups = ch.at("critical_groups").get<std::vector<std::vector<int>>>();
      if (ch.contains("certificate_min_rate")) {
        sc.checks.certificate_min_rate = number(ch.at("certificate_min_rate"), "checks.certificate_min_rate");
        if (sc.checks.certificate_min_rate < 0 || sc.checks.certificate_min_rate > 1)
          bad("checks.certificate_min_rate", "must be in [0, 1]");
      }
      sc.checks.require_report_pass = ch.value("require_report_pass", true);
    }
    sc.output_dir = j.value("output_dir", "out/" + sc.name);
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("scenario: ") + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace dimorse
