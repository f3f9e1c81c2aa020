#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "snumlab/error.hpp"
#include "snumlab/report.hpp"

using namespace snumlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("snumlab_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "t.yaml");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing") {
  const SweepConfig c = parse_config(R"(
gammas: [[2, 2], [3]]
grid: {s1: [3, "9/2"], p1: ["4/3"], p2: [4, inf]}
k_grid: {from: 5, to: 12}
tolerance: {alpha: 0.2, beta: 0.5}
)");
  CHECK(c.gammas.size() == 2);
  CHECK(c.grid.s1 == std::vector<std::string>{"3", "9/2"});
  CHECK(c.grid.p2 == std::vector<std::string>{"4", "inf"});
  CHECK(c.k_grid.from == 5);
  CHECK(c.k_grid.to == 12);
  CHECK(c.tol_alpha == 0.2);
  CHECK(c.tol_beta == 0.5);
}

TEST_CASE("config errors carry position and field") {
  const std::string unknown = config_error("gammas: [[2, 2]]\nbogus: 1\n");
  CHECK(unknown.find("t.yaml:2:") == 0);
  CHECK(unknown.find("bogus") != std::string::npos);
  CHECK(config_error("k_grid: {from: 9, to: 3}\n").find("k_grid") != std::string::npos);
  CHECK(config_error("grid: {p1: [\"4/x\"]}\n").find("p1") != std::string::npos);
  CHECK(config_error("gammas: [[1, 2]]\n") != "");
  CHECK(config_error("grid: {s1: []}\n") != "");
  CHECK(config_error("tolerance: {alpha: -1}\n") != "");
  CHECK(config_error("gammas: [[2, 2]\n") != "");
}

TEST_CASE("format names") {
  CHECK(parse_format("csv") == OutputFormat::csv);
  CHECK(parse_format("json") == OutputFormat::json);
  CHECK(parse_format("all") == OutputFormat::all);
  CHECK_THROWS_AS(parse_format("xml"), Error);
}

TEST_CASE("one grid point gives one row and one record") {
  const SweepConfig c = parse_config(R"(
gamma: [2, 2]
grid: {s1: [3], p1: ["4/3"], p2: [4]}
k_grid: {from: 6, to: 14}
)");
  const fs::path out = scratch("rates");
  const RunSummary s = run_command("rates", c, out, 5, OutputFormat::all);
  CHECK(s.points == 1);
  CHECK(s.failures == 0);
  CHECK(s.exit_code == 0);
  const std::string csv = slurp(out / "rates.csv");
  CHECK(lines(csv) == 2);
  CHECK(csv.find(",B,3/4,1/2,") != std::string::npos);
  const std::string json = slurp(out / "rates.json");
  CHECK(json.find("\"schema\": \"snumlab/1\"") != std::string::npos);
  CHECK(json.find("\"seed\": 5") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("non-compact point has null rate fields") {
  const SweepConfig c = parse_config("gamma: [2, 2]\ngrid: {s1: [3], p1: [2], p2: [2]}\n");
  const fs::path out = scratch("noncompact");
  const RunSummary s = run_command("rates", c, out, 0, OutputFormat::json);
  CHECK(s.exit_code == 0);
  CHECK_FALSE(fs::exists(out / "rates.csv"));
  const std::string json = slurp(out / "rates.json");
  CHECK(json.find("\"compact\": false") != std::string::npos);
  CHECK(json.find("\"alpha_out\": null") != std::string::npos);
  CHECK(json.find("\"status\": \"not_compact\"") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("failed points set the exit code") {
  const fs::path out = scratch("diag");
  SweepConfig some = parse_config("diag: {alpha: [\"1/2\"], p1: [2], p2: [2, 1]}\n");
  CHECK(run_command("diag", some, out, 0, OutputFormat::csv).exit_code == 4);
  SweepConfig all = parse_config("diag: {alpha: [\"1/4\"], p1: [2], p2: [1]}\n");
  CHECK(run_command("diag", all, out, 0, OutputFormat::csv).exit_code == 3);
  CHECK(fs::exists(out / "diag_profile.csv"));
  CHECK_THROWS_AS(run_command("nope", all, out, 0, OutputFormat::csv), Error);
  fs::remove_all(out);
}

TEST_CASE("reports are deterministic across thread counts") {
  SweepConfig c = parse_config(R"(
gamma: [2, 2]
grid: {s1: [3], p1: ["4/3", 2], p2: [4]}
equiv: {box_radius: [16], samples: 20}
)");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  c.threads = 1;
  run_command("equiv", c, a, 11, OutputFormat::all);
  c.threads = 4;
  run_command("equiv", c, b, 11, OutputFormat::all);
  CHECK(slurp(a / "equiv.csv") == slurp(b / "equiv.csv"));
  CHECK(slurp(a / "equiv.json") == slurp(b / "equiv.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}
