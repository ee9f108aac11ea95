#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fql/cli.hpp"
#include "fql/io.hpp"

namespace {

int run(const std::vector<std::string>& args, std::string& output) {
  std::vector<const char*> argv;
  argv.push_back("fql");
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream os;
  int rc = fql::cli_main(static_cast<int>(argv.size()), argv.data(), os);
  output = os.str();
  return rc;
}

}  // namespace

TEST_CASE("gen is deterministic across reruns") {
  std::string out1, out2;
  CHECK(run({"gen", "--kind", "junta", "--q", "3:1", "--n", "16", "--k", "2", "--seed", "7",
             "--file", "/tmp/fql_test_j1.txt"},
            out1) == 0);
  CHECK(run({"gen", "--kind", "junta", "--q", "3:1", "--n", "16", "--k", "2", "--seed", "7",
             "--file", "/tmp/fql_test_j2.txt"},
            out2) == 0);
  CHECK(fql::load_file("/tmp/fql_test_j1.txt") == fql::load_file("/tmp/fql_test_j2.txt"));
  std::remove("/tmp/fql_test_j1.txt");
  std::remove("/tmp/fql_test_j2.txt");
}

TEST_CASE("verify subcommand: single suite and exit code") {
  std::string out;
  CHECK(run({"verify", "--suite", "claimD3"}, out) == 0);
  CHECK(out.find("suite=claimD3 pass=1") != std::string::npos);
  CHECK(out.find("verify pass=1") != std::string::npos);

  CHECK(run({"verify", "--suite", "nonsense"}, out) == 2);
  CHECK(out.find("error:") != std::string::npos);
}

TEST_CASE("learn on a generated instance reports an exact verdict") {
  std::string out;
  REQUIRE(run({"gen", "--kind", "junta", "--q", "2:1", "--n", "10", "--k", "2", "--seed", "3",
               "--file", "/tmp/fql_test_learn.txt"},
              out) == 0);
  int rc = run({"learn", "--instance", "/tmp/fql_test_learn.txt", "--trials", "2", "--seed",
                "19", "--delta", "0.2", "--ldme-data-mult", "0.1", "--ldme-check-mult", "0.1",
                "--ldme-screen", "1.3", "--ldme-rounds", "200"},
               out);
  CHECK(rc == 0);
  CHECK(out.find("verdict=exact") != std::string::npos);
  CHECK(out.find("rate=1") != std::string::npos);
  std::remove("/tmp/fql_test_learn.txt");
}

TEST_CASE("reports regenerate bit-identically from config and seed") {
  std::vector<std::string> args{"ldme", "--random",     "--q",    "2:1",  "--n",
                                "8",    "--k",          "2",      "--rho", "0.5",
                                "--alpha-weight", "2",  "--trials", "2",  "--seed", "33"};
  std::string out1, out2;
  CHECK(run(args, out1) == 0);
  CHECK(run(args, out2) == 0);
  // wall-clock fields differ; strip them
  auto strip_ms = [](std::string s) {
    std::string r;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) {
      auto pos = line.find(" ms=");
      r += (pos == std::string::npos) ? line : line.substr(0, pos);
      r += '\n';
    }
    return r;
  };
  CHECK(strip_ms(out1) == strip_ms(out2));
  CHECK(out1.find("gamma=") != std::string::npos);
  CHECK(out1.find("rounds=") != std::string::npos);
  CHECK(out1.find("examples=") != std::string::npos);
}

TEST_CASE("lbp command on an instance file") {
  std::string out;
  REQUIRE(run({"gen", "--kind", "lbp", "--N", "60", "--d", "512", "--rho", "0.9", "--seed",
               "5", "--file", "/tmp/fql_test_lbp.txt"},
              out) == 0);
  // the planted pair is echoed by gen
  auto pos = out.find("planted=");
  REQUIRE(pos != std::string::npos);
  std::string planted = out.substr(pos + 8, out.find('\n', pos) - pos - 8);

  int rc = run({"lbp", "--instance", "/tmp/fql_test_lbp.txt", "--backend", "naive",
                "--threshold-rho", "0.5"},
               out);
  CHECK(rc == 0);
  CHECK(out.find("found=1") != std::string::npos);
  CHECK(out.find("pair=" + planted) != std::string::npos);
  std::remove("/tmp/fql_test_lbp.txt");
}

TEST_CASE("bench emits a factor line") {
  std::string out;
  CHECK(run({"bench", "--N", "400", "--d", "512", "--rho", "0.3", "--repeats", "1", "--seed",
             "2"},
            out) == 0);
  CHECK(out.find("naive_ms=") != std::string::npos);
  CHECK(out.find("factor=") != std::string::npos);
}

TEST_CASE("out file captures the report") {
  std::string out;
  CHECK(run({"verify", "--suite", "claimD3", "--out", "/tmp/fql_test_report.txt"}, out) == 0);
  CHECK(fql::load_file("/tmp/fql_test_report.txt") == out);
  std::remove("/tmp/fql_test_report.txt");
}
