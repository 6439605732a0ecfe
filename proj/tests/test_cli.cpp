#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kCli = EDMLAB_CLI_PATH;
constexpr const char* kData = EDMLAB_DATA_DIR;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("edmlab_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string str(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const TempDir& dir, const std::string& args) {
  const std::string out_path = dir.str("stdout.txt");
  const std::string err_path = dir.str("stderr.txt");
  const std::string cmd = std::string("'") + kCli + "' " + args + " > '" + out_path +
                          "' 2> '" + err_path + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (status == -1) ? -1 : (WIFEXITED(status) ? WEXITSTATUS(status) : -2);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

// First check entry with the given name whose observed map satisfies pred.
const json* find_check(const json& report, const std::string& name) {
  for (const auto& entry : report.at("checks")) {
    if (entry.at("name") == name) return &entry;
  }
  return nullptr;
}

double observed(const json& entry, const std::string& key) {
  return entry.at("observed").at(key).get<double>();
}

}  // namespace

TEST_CASE("check runs the full scenario suite and reports pass") {
  TempDir dir;
  const std::string report_path = dir.str("report.json");
  const RunResult r = run_cli(dir, "check --out '" + report_path + "'");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("example1: pass") != std::string::npos);
  CHECK(r.out.find("theorem1: pass") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);

  const json report = json::parse(slurp(report_path));
  REQUIRE(report.contains("checks"));
  // 3 sizes of example1, 3 gauge instances, 4 coupling constants, theorem1.
  CHECK(report["checks"].size() == 11);
  for (const auto& entry : report["checks"]) CHECK(entry.at("passed") == true);

  const json* th = find_check(report, "theorem1");
  REQUIRE(th != nullptr);
  CHECK(std::abs(observed(*th, "log_pseudo_grad_s2") - (-0.2451769213971144)) <= 1e-12);
  CHECK(observed(*th, "bc_gradient") == 0.0);
  CHECK(std::abs(observed(*th, "edm_total_gradient")) > 0.03);

  // The full run is deterministic: a second invocation writes identical bytes.
  const std::string report2 = dir.str("report2.json");
  const RunResult r2 = run_cli(dir, "check --out '" + report2 + "'");
  CHECK(r2.exit_code == 0);
  CHECK(slurp(report2) == slurp(report_path));
}

TEST_CASE("check --only narrows the suite and --k pins the coupling") {
  TempDir dir;
  const std::string report_path = dir.str("r.json");
  const RunResult r =
      run_cli(dir, "check --only example3 --k 0.5 --out '" + report_path + "'");
  CHECK(r.exit_code == 0);
  const json report = json::parse(slurp(report_path));
  REQUIRE(report["checks"].size() == 1);
  const auto& entry = report["checks"][0];
  CHECK(entry["name"] == "example3");
  CHECK(observed(entry, "k") == 0.5);
  CHECK(observed(entry, "log_pseudo_grad_s2") == -0.125);

  // k = 1: the boundary case still passes (no pull either way).
  const RunResult r1 = run_cli(dir, "check --only example3 --k 1 --out '" + report_path + "'");
  CHECK(r1.exit_code == 0);
  const json rep1 = json::parse(slurp(report_path));
  CHECK(observed(rep1["checks"][0], "log_pseudo_grad_s2") == 0.0);
  CHECK(rep1["checks"][0]["passed"] == true);

  const RunResult re1 = run_cli(dir, "check --only example1 --out '" + report_path + "'");
  CHECK(re1.exit_code == 0);
  CHECK(json::parse(slurp(report_path))["checks"].size() == 3);

  const RunResult bad = run_cli(dir, "check --only nosuch --out '" + report_path + "'");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("train on the matching objective converges; on the combined it does not") {
  TempDir dir;
  const std::string trace_path = dir.str("trace.csv");
  const RunResult bc = run_cli(dir, "train --objective bc --out '" + trace_path + "'");
  CHECK(bc.exit_code == 0);
  REQUIRE(bc.out.find("final_theta=") != std::string::npos);
  const double bc_final = std::strtod(bc.out.c_str() + bc.out.find("final_theta=") + 12, nullptr);
  CHECK(std::abs(bc_final - 1.0) < 1e-3);

  // Trace: header plus one row per step plus the starting row.
  const std::string csv = slurp(trace_path);
  CHECK(csv.rfind("step,theta,bc_loss,edm_loss,grad_total\n", 0) == 0);
  int lines = 0;
  for (char ch : csv) lines += (ch == '\n');
  CHECK(lines == 5002);

  const RunResult edm = run_cli(dir, "train --objective edm --out '" + trace_path + "'");
  CHECK(edm.exit_code == 0);
  const double edm_final =
      std::strtod(edm.out.c_str() + edm.out.find("final_theta=") + 12, nullptr);
  CHECK(std::abs(edm_final - 1.0) > 0.05);
  CHECK(std::abs(edm_final - 0.8077020994330006) <= 1e-9);

  // Weighting flags reshape the objective (all mass on s2 steepens the pull).
  const RunResult s2 =
      run_cli(dir, "train --objective edm --weights s2 --out '" + trace_path + "'");
  CHECK(s2.exit_code == 0);
  const double s2_final = std::strtod(s2.out.c_str() + s2.out.find("final_theta=") + 12, nullptr);
  CHECK(std::abs(s2_final - 1.0) > std::abs(edm_final - 1.0));
}

TEST_CASE("train rejects bad usage and reports divergence distinctly") {
  TempDir dir;
  CHECK(run_cli(dir, "train --objective bc --lr 0 --out '" + dir.str("t.csv") + "'").exit_code ==
        2);
  CHECK(run_cli(dir, "train --out '" + dir.str("t.csv") + "'").exit_code == 2);
  CHECK(run_cli(dir, "train --objective nosuch").exit_code == 2);
  CHECK(run_cli(dir, "train --objective bc --weights 0:0").exit_code == 2);
  CHECK(run_cli(dir, "train --objective bc --weights junk").exit_code == 2);
  CHECK(run_cli(dir, "--no-such-flag").exit_code == 2);
  CHECK(run_cli(dir, "").exit_code == 2);
  CHECK(run_cli(dir, "--help").exit_code == 0);

  const RunResult div = run_cli(
      dir, "train --objective bc --lr 1e8 --steps 50 --out '" + dir.str("t.csv") + "'");
  CHECK(div.exit_code == 3);
  CHECK(div.err.find("parameter reached") != std::string::npos);
}

TEST_CASE("visitation solves the packaged fixtures") {
  TempDir dir;
  const std::string out = dir.str("v.json");
  const std::string selfloop = std::string(kData) + "/mdps/selfloop3.json";
  const std::string uniform3 = std::string(kData) + "/policies/uniform3.json";
  const RunResult r = run_cli(
      dir, "visitation --mdp '" + selfloop + "' --policy '" + uniform3 + "' --out '" + out + "'");
  CHECK(r.exit_code == 0);
  const json d = json::parse(slurp(out));
  REQUIRE(d.size() == 3);
  CHECK(std::abs(d[0].get<double>() - 1.0) <= 1e-12);
  CHECK(std::abs(d[1].get<double>()) <= 1e-12);

  // Stationary mode on the two-state chain: (2/3, 1/3).
  const std::string chain2 = std::string(kData) + "/mdps/chain2.json";
  const std::string uniform2 = std::string(kData) + "/policies/uniform2.json";
  const RunResult rs =
      run_cli(dir, "visitation --mdp '" + chain2 + "' --policy '" + uniform2 +
                       "' --mode stationary --out '" + out + "'");
  CHECK(rs.exit_code == 0);
  const json ds = json::parse(slurp(out));
  CHECK(std::abs(ds[0].get<double>() - 2.0 / 3.0) <= 1e-10);
  CHECK(std::abs(ds[1].get<double>() - 1.0 / 3.0) <= 1e-10);

  CHECK(run_cli(dir, "visitation --mdp '" + chain2 + "' --policy '" + uniform2 +
                         "' --mode bogus").exit_code == 2);

  // A malformed MDP file is a usage error with a diagnostic naming the file.
  std::ofstream bad(dir.str("bad.json"));
  bad << "{\"n_states\": 2}";
  bad.close();
  const RunResult rb = run_cli(dir, "visitation --mdp '" + dir.str("bad.json") + "' --policy '" +
                                        uniform2 + "' --out '" + out + "'");
  CHECK(rb.exit_code == 2);
  CHECK(rb.err.find("bad.json") != std::string::npos);
}

TEST_CASE("rollout is reproducible for a fixed seed") {
  TempDir dir;
  const std::string chain2 = std::string(kData) + "/mdps/chain2.json";
  const std::string biased2 = std::string(kData) + "/policies/biased2.json";
  const std::string a = dir.str("a.jsonl"), b = dir.str("b.jsonl"), c = dir.str("c.jsonl");

  const std::string base = "rollout --mdp '" + chain2 + "' --policy '" + biased2 +
                           "' --episodes 4 --horizon 50";
  CHECK(run_cli(dir, base + " --seed 5 --out '" + a + "'").exit_code == 0);
  CHECK(run_cli(dir, base + " --seed 5 --out '" + b + "'").exit_code == 0);
  CHECK(run_cli(dir, base + " --seed 6 --out '" + c + "'").exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) != slurp(c));

  // Four JSONL records, each a {"steps": [...]} object with 50 pairs.
  std::istringstream lines(slurp(a));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const json rec = json::parse(line);
    CHECK(rec.at("steps").size() == 50);
    ++count;
  }
  CHECK(count == 4);

  CHECK(run_cli(dir, base + " --episodes 0 --out '" + a + "'").exit_code == 2);
}

TEST_CASE("sample draws from the packaged energy and prints its accuracy") {
  TempDir dir;
  const std::string gauss = std::string(kData) + "/energies/gauss.json";
  const std::string out = dir.str("samples.jsonl");
  const RunResult r = run_cli(dir, "sample --energy '" + gauss + "' --out '" + out + "'");
  CHECK(r.exit_code == 0);
  REQUIRE(r.out.rfind("tv=", 0) == 0);
  const double tv = std::strtod(r.out.c_str() + 3, nullptr);
  CHECK(tv < 0.05);

  // One value per line, 20000 lines by default.
  std::istringstream lines(slurp(out));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const double v = std::strtod(line.c_str(), nullptr);
    CHECK(v >= -8.0);
    CHECK(v <= 8.0);
    ++count;
  }
  CHECK(count == 20000);

  CHECK(run_cli(dir, "sample --energy '" + gauss + "' --step-size 0").exit_code == 2);
  CHECK(run_cli(dir, "sample --energy '" + dir.str("absent.json") + "'").exit_code == 2);
}
