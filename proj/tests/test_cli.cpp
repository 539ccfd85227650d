#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

// End-to-end checks of the command line tool.  The test runner exports
// RITZLAB_BIN with the path of the freshly built binary; every case here
// shells out to it and inspects exit status and combined output.

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

std::string binary_path() {
  const char* bin = std::getenv("RITZLAB_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd = env_prefix + "\"" + binary_path() + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, got);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string write_temp_config(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("ritzlab_" + name + ".json");
  std::ofstream out(path);
  out << text;
  REQUIRE(out.good());
  return path.string();
}

}  // namespace

TEST_CASE("help and argument errors", "[cli]") {
  REQUIRE(run_cli("--help").code == 0);
  REQUIRE(run_cli("").code == 1);        // a subcommand is required
  REQUIRE(run_cli("bogus").code == 1);   // unknown subcommand
  REQUIRE(run_cli("study").code == 1);   // missing config argument
}

TEST_CASE("unknown demo lists what is available", "[cli]") {
  const RunResult r = run_cli("demo nope");
  REQUIRE(r.code == 1);
  REQUIRE(r.out.find("unknown demo 'nope'") != std::string::npos);
  REQUIRE(r.out.find("diag_m3") != std::string::npos);
  REQUIRE(r.out.find("laplace_m2") != std::string::npos);
  REQUIRE(r.out.find("harmonic_m3") != std::string::npos);
}

TEST_CASE("bad config values are rejected with the offending field", "[cli]") {
  const std::string path = write_temp_config("bad_m", R"({
    "operator": {"kind": "diagonal", "rule": {"type": "affine", "offset": 1.0, "slope": 1.0}},
    "family": "truncation",
    "m": 0,
    "steps": 4
  })");
  const RunResult r = run_cli("study \"" + path + "\"");
  REQUIRE(r.code == 1);
  REQUIRE(r.out.find("error:") != std::string::npos);
  REQUIRE(r.out.find("field 'm'") != std::string::npos);
}

TEST_CASE("spectrum reports the projected values of an explicit basis", "[cli]") {
  const std::string path = write_temp_config("hat", R"({
    "operator": {"kind": "dirichlet_laplacian", "length": "pi", "nodes": 1},
    "basis": [[1.0]]
  })");
  const RunResult r = run_cli("spectrum \"" + path + "\"");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("theta_1 = 1.21585") != std::string::npos);
  REQUIRE(r.out.find("gram_condition = 1") != std::string::npos);

  const RunResult csv = run_cli("spectrum \"" + path + "\" --csv");
  REQUIRE(csv.code == 0);
  REQUIRE(csv.out.find("k,value\n1,1.215") != std::string::npos);
}

TEST_CASE("spectrum refuses a dependent basis and names the vector", "[cli]") {
  const std::string path = write_temp_config("dependent", R"({
    "operator": {"kind": "diagonal", "rule": {"type": "affine", "offset": 1.0, "slope": 1.0}},
    "basis": [[1.0, 0.0], [1.0, 0.0]]
  })");
  const RunResult r = run_cli("spectrum \"" + path + "\"");
  REQUIRE(r.code == 1);
  REQUIRE(r.out.find("vector 2") != std::string::npos);
}

TEST_CASE("demo study converges and repeats byte for byte", "[cli]") {
  const RunResult r = run_cli("demo diag_m3");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("demo: diag_m3") != std::string::npos);
  REQUIRE(r.out.find("converged_at=3") != std::string::npos);
  REQUIRE(r.out.find("pooled monotone: yes  sandwich: yes") != std::string::npos);
  REQUIRE(r.out.find("skipped steps: 1,2") != std::string::npos);
  REQUIRE(r.out.find("n,pooled_dim,mu_hat_1") != std::string::npos);

  const RunResult again = run_cli("demo diag_m3");
  REQUIRE(again.code == 0);
  REQUIRE(again.out == r.out);
}

TEST_CASE("a study that misses its target exits with code 2", "[cli]") {
  const std::string path = write_temp_config("strict", R"({
    "operator": {"kind": "dirichlet_laplacian", "length": "pi", "nodes": 7},
    "family": "mesh_interpolation",
    "m": 1,
    "steps": 2,
    "target_tol": 1e-12
  })");
  const RunResult r = run_cli("study \"" + path + "\"");
  REQUIRE(r.code == 2);
  REQUIRE(r.out.find("converged_at=never") != std::string::npos);
}

TEST_CASE("study output is identical across thread counts", "[cli]") {
  const std::string path = write_temp_config("threads", R"({
    "operator": {"kind": "dirichlet_laplacian", "length": "pi", "nodes": 63},
    "family": "mesh_interpolation",
    "m": 2,
    "steps": 6,
    "target_tol": 1e-2
  })");
  const RunResult one = run_cli("study \"" + path + "\" --threads 1");
  const RunResult four = run_cli("study \"" + path + "\" --threads 4");
  REQUIRE(one.code == 0);
  REQUIRE(four.code == 0);
  REQUIRE(one.out == four.out);

  // The RITZ_THREADS environment variable is the fallback for the same knob.
  const RunResult env = run_cli("study \"" + path + "\"", "RITZ_THREADS=3 ");
  REQUIRE(env.code == 0);
  REQUIRE(env.out == one.out);

  const RunResult bad_env = run_cli("study \"" + path + "\"", "RITZ_THREADS=abc ");
  REQUIRE(bad_env.code == 1);
  REQUIRE(bad_env.out.find("RITZ_THREADS") != std::string::npos);
}

TEST_CASE("study writes its table to the requested file", "[cli]") {
  const std::string cfg = write_temp_config("tofile", R"({
    "operator": {"kind": "diagonal", "rule": {"type": "affine", "offset": 1.0, "slope": 1.0}},
    "family": "truncation",
    "m": 2,
    "steps": 3
  })");
  const auto csv_path =
      (std::filesystem::temp_directory_path() / "ritzlab_out.csv").string();
  std::filesystem::remove(csv_path);
  const RunResult r = run_cli("study \"" + cfg + "\" --output \"" + csv_path + "\"");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("csv: " + csv_path) != std::string::npos);

  std::ifstream in(csv_path, std::ios::binary);
  REQUIRE(in.good());
  std::string first_line;
  std::getline(in, first_line);
  REQUIRE(first_line ==
          "n,pooled_dim,mu_hat_1,mu_hat_2,lambda_hat_1,lambda_hat_2,err_1,err_2,"
          "sandwich_ok,gram_cond_pooled,gram_cond_small");
}

TEST_CASE("verify runs its suites and honors the trial count", "[cli]") {
  const RunResult vacuous = run_cli("verify --trials 0");
  REQUIRE(vacuous.code == 0);
  REQUIRE(vacuous.out.find("warning: trials=0") != std::string::npos);
  REQUIRE(vacuous.out.find("verify: vacuous pass (0 trials)") != std::string::npos);

  const RunResult small = run_cli("verify --trials 5 --seed 7");
  REQUIRE(small.code == 0);
  REQUIRE(small.out.find("verify: seed=7 trials=5") != std::string::npos);
  REQUIRE(small.out.find("suite eigensolver_oracle: 5/5 ok") != std::string::npos);
  REQUIRE(small.out.find("verify: all suites passed") != std::string::npos);
}
