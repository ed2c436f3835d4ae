#include <doctest.h>

#include "dimorse/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace dimorse;
namespace fs = std::filesystem;

namespace {

const std::string kScenarios = DIMORSE_SCENARIO_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dimorse_test_" + name);
  fs::remove_all(d);
  return d;
}

ErrorCode parse_code(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::check_failed;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DIMORSE_CLI_PATH) + " --log-level off " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kMinimal = R"({
  "name": "mini", "seed": 1,
  "system": {"type": "affine", "A": [[-1]]},
  "grid": {"lo": [-2], "hi": [2], "depth": 4},
  "graph": {"tau": 1.5}
})";

}  // namespace

TEST_CASE("a minimal scenario parses with defaults") {
  const Scenario sc = parse_scenario(kMinimal);
  CHECK(sc.name == "mini");
  CHECK(sc.depth == 4);
  CHECK(sc.system.dim() == 1);
  CHECK(sc.coefficients == Coefficients::z2);
  CHECK(sc.output_dir == "out/mini");
  CHECK(sc.checks.certificate_min_rate == doctest::Approx(0.99));
}

TEST_CASE("malformed scenarios are configuration errors") {
  CHECK(parse_code("{") == ErrorCode::config);
  CHECK(parse_code("[]") == ErrorCode::config);
  std::string s = kMinimal;
  CHECK(parse_code(s.replace(s.find("\"seed\": 1,"), 10, "")) == ErrorCode::config);
  s = kMinimal;
  CHECK(parse_code(s.replace(s.find("\"name\""), 6, "\"nmae\"")) == ErrorCode::config);
  s = kMinimal;
  CHECK(parse_code(s.replace(s.find("\"depth\": 4"), 10, "\"depth\": -1")) == ErrorCode::config);
  s = kMinimal;
  CHECK(parse_code(s.replace(s.find("[[-1]]"), 6, "[[-1, 0]]")) == ErrorCode::config);
  s = kMinimal;
  CHECK(parse_code(s.replace(s.find("\"tau\": 1.5"), 10, "\"tau\": 0")) == ErrorCode::config);
  s = kMinimal;
  CHECK(parse_code(s.replace(s.find("\"depth\": 4"), 10, "\"depth\": 40")) == ErrorCode::config);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), Error);
}

TEST_CASE("every bundled scenario parses") {
  int n = 0;
  for (const auto& e : fs::directory_iterator(kScenarios))
    if (e.path().extension() == ".json") {
      CHECK_NOTHROW(load_scenario(e.path().string()));
      ++n;
    }
  CHECK(n >= 5);
}

TEST_CASE("output directory resolution order") {
  const Scenario sc = parse_scenario(kMinimal);
  unsetenv("DIMORSE_OUTPUT_DIR");
  CHECK(resolve_output_dir(sc) == "out/mini");
  setenv("DIMORSE_OUTPUT_DIR", "/tmp/elsewhere", 1);
  CHECK(resolve_output_dir(sc) == "/tmp/elsewhere");
  CHECK(resolve_output_dir(sc, "/tmp/explicit") == "/tmp/explicit");
  unsetenv("DIMORSE_OUTPUT_DIR");
}

TEST_CASE("pipeline runs are deterministic and complete") {
  const Scenario sc = load_scenario(kScenarios + "/doublewell1d.json");
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  CHECK(run_pipeline(sc, a.string()) == 0);
  CHECK(run_pipeline(sc, b.string()) == 0);
  for (const char* f : {"report.json", "decomposition.json", "critical_groups.json", "lyapunov.csv", "graph.bin"})
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);

  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["all_checks_passed"].get<bool>());
  CHECK(manifest["artifacts"].size() >= 8);
  for (const auto& art : manifest["artifacts"]) {
    const fs::path p = a / art["file"].get<std::string>();
    CHECK(fs::exists(p));
    if (art["format"] == "json") CHECK(nlohmann::json::accept(slurp(p)));
  }
  const auto report = nlohmann::json::parse(slurp(a / "report.json"));
  CHECK(report["equation_pass"].get<bool>());
  CHECK(report["critical_groups"] == nlohmann::json::parse("[[1,0],[1,0],[0,1]]"));

  const VerifyResult v = verify_against(a.string(), (b / "report.json").string());
  CHECK(v.ranks_equal);
  CHECK(v.identical);
  CHECK(v.rank_differences.empty());
  CHECK(v.cell_differences.empty());
  CHECK(verify_against(a.string(), b.string()).identical);
  fs::remove_all(b);
}

TEST_CASE("verify reports differing ranks and a missing golden") {
  const Scenario sc = load_scenario(kScenarios + "/contraction1d.json");
  const fs::path a = fresh_dir("verify");
  REQUIRE(run_pipeline(sc, a.string()) == 0);
  auto report = nlohmann::json::parse(slurp(a / "report.json"));
  report["critical_groups"][0][0] = 2;
  const fs::path golden = a / "golden.json";
  std::ofstream(golden) << report.dump();
  const VerifyResult v = verify_against(a.string(), golden.string());
  CHECK_FALSE(v.ranks_equal);
  CHECK_FALSE(v.rank_differences.empty());
  try {
    verify_against(a.string(), (a / "absent.json").string());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_golden);
  }
  fs::remove_all(a);
}

TEST_CASE("stages rerun from persisted artifacts") {
  const Scenario sc = load_scenario(kScenarios + "/contraction1d.json");
  const fs::path a = fresh_dir("stages");
  stage_graph(sc, a.string());
  stage_morse(sc, a.string());
  stage_lyapunov(sc, a.string());
  stage_homology(sc, a.string());
  stage_report(sc, a.string());
  const std::string first = slurp(a / "report.json");
  for (const auto& c : stage_report(sc, a.string())) CHECK_MESSAGE(c.passed, c.name);
  CHECK(slurp(a / "report.json") == first);
  const auto rob = stage_robustness(sc, a.string());
  CHECK(fs::exists(a / "robustness.json"));
  CHECK(!rob.empty());
  fs::remove_all(a);
}

TEST_CASE("a stage without its inputs fails with io") {
  const Scenario sc = load_scenario(kScenarios + "/contraction1d.json");
  const fs::path a = fresh_dir("noinput");
  fs::create_directories(a);
  try {
    stage_morse(sc, a.string());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
  fs::remove_all(a);
}

TEST_CASE("command-line exit codes and error records") {
  const fs::path a = fresh_dir("cli");
  fs::create_directories(a);
  const fs::path bad = a / "bad.json";
  std::ofstream(bad) << "{ \"name\": ";
  const fs::path out = a / "bad_out";
  CHECK(run_cli("run " + bad.string() + " --out " + out.string()) == static_cast<int>(ErrorCode::config));
  CHECK_FALSE(fs::exists(out));

  const fs::path empty = a / "empty";
  fs::create_directories(empty);
  const std::string sc = kScenarios + "/contraction1d.json";
  CHECK(run_cli("morse " + sc + " --out " + empty.string()) == static_cast<int>(ErrorCode::io));
  REQUIRE(fs::exists(empty / "error.json"));
  const auto err = nlohmann::json::parse(slurp(empty / "error.json"));
  CHECK(err["stage"] == "morse");
  CHECK(err["code"] == static_cast<int>(ErrorCode::io));

  const fs::path good = a / "good";
  CHECK(run_cli("--threads 2 run " + sc + " --out " + good.string()) == 0);
  CHECK(run_cli("verify " + sc + " --out " + good.string() + " --golden " + (good / "report.json").string()) == 0);
  CHECK(run_cli("verify " + sc + " --out " + good.string() + " --golden " + (a / "nothing.json").string()) ==
        static_cast<int>(ErrorCode::missing_golden));
  CHECK(run_cli("frobnicate") != 0);
  fs::remove_all(a);
}

TEST_CASE("error records carry stage and code") {
  const auto j = nlohmann::json::parse(error_record("graph", Error(ErrorCode::divergence, "boom")));
  CHECK(j["stage"] == "graph");
  CHECK(j["code"] == 6);
  CHECK(j["error"] == "divergence");
  CHECK(j["message"] == "boom");
}
