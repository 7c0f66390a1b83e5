// Exercises the installed command-line surface end to end: exit codes,
// printed output and determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "support/fixtures.hpp"

#ifndef AIFML_CLI_PATH
#error "AIFML_CLI_PATH must point at the aifml binary"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

RunResult run(const std::string& args) {
  const std::string command = std::string(AIFML_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buffer;
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    result.output.append(buffer.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string fixture(const std::string& name) {
  return std::string(AIFML_FIXTURE_DIR) + "/" + name;
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/aifml_cli_test_") + name;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path);
  REQUIRE(file.good());
  file << text;
}

}  // namespace

TEST_CASE("fml validate") {
  SUBCASE("valid fixture prints OK and exits 0") {
    const RunResult result = run("fml validate " + fixture("speaking.fml"));
    CHECK(result.exit_code == 0);
    CHECK(result.output == "OK\n");
  }
  SUBCASE("inverted bounds exit 1 with a violation line") {
    const std::string path = temp_path("inverted.fml");
    std::string text;
    {
      std::ifstream in(fixture("speaking.fml"));
      std::ostringstream buffer;
      buffer << in.rdbuf();
      text = buffer.str();
    }
    const std::string needle = "param1=\"0\" param2=\"0.2\" param3=\"0.4\"";
    text.replace(text.find(needle), needle.size(), "param1=\"0.4\" param2=\"0.2\" param3=\"0\"");
    write_text(path, text);
    const RunResult result = run("fml validate " + path);
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("small") != std::string::npos);
  }
  SUBCASE("missing file exits 3") {
    CHECK(run("fml validate /nonexistent/nope.fml").exit_code == 3);
  }
}

TEST_CASE("fml infer") {
  SUBCASE("symmetric fixture at the balanced input prints the midpoint") {
    const RunResult result =
        run("fml infer " + fixture("travel_gauss.fml") + " --input weather=1.0");
    CHECK(result.exit_code == 0);
    const auto eq = result.output.find("recommend = ");
    REQUIRE(eq != std::string::npos);
    CHECK(std::abs(std::stod(result.output.substr(eq + 12)) - 0.5) < 1e-9);
  }
  SUBCASE("matches the frozen dense-grid value") {
    const RunResult result = run("fml infer " + fixture("speaking.fml") + " --input score=0.75");
    CHECK(result.exit_code == 0);
    const auto eq = result.output.find("= ");
    REQUIRE(eq != std::string::npos);
    CHECK(std::abs(std::stod(result.output.substr(eq + 2)) - 67.0 / 110.0) < 1e-9);
  }
  SUBCASE("missing --input is a usage error") {
    CHECK(run("fml infer " + fixture("speaking.fml")).exit_code == 2);
  }
  SUBCASE("missing input variable is a domain error") {
    CHECK(run("fml infer " + fixture("speaking_prod.fml") + " --input score=0.7").exit_code == 1);
  }
}

TEST_CASE("tune") {
  SUBCASE("swarm below the minimum is a usage error") {
    CHECK(run("tune --fml " + fixture("speaking_shifted.fml") + " --data " +
              fixture("speaking_tune.csv") + " --swarm 1 --seed 1 --out " +
              temp_path("t.fml"))
              .exit_code == 2);
  }
  SUBCASE("a dataset that names the wrong columns is a domain error") {
    const std::string bad = temp_path("bad_tune.csv");
    write_text(bad, "bogus,encourage\n0.5,0.5\n");
    CHECK(run("tune --fml " + fixture("speaking_shifted.fml") + " --data " + bad +
              " --iters 5 --swarm 4 --seed 1 --out " + temp_path("t.fml"))
              .exit_code == 1);
  }
  SUBCASE("a short run improves the shifted fixture and writes a valid file") {
    const std::string out = temp_path("tuned.fml");
    const RunResult result =
        run("tune --fml " + fixture("speaking_shifted.fml") + " --data " +
            fixture("speaking_tune.csv") + " --iters 15 --swarm 12 --seed 3 --out " + out);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("initial_mse = ") != std::string::npos);
    CHECK(result.output.find("final_mse = ") != std::string::npos);
    const double initial = std::stod(result.output.substr(result.output.find("initial_mse = ") + 14));
    const double final_mse = std::stod(result.output.substr(result.output.find("final_mse = ") + 12));
    CHECK(final_mse <= initial);
    CHECK(run("fml validate " + out).exit_code == 0);
  }
}

TEST_CASE("raa simulate and stats") {
  const std::string log = temp_path("session.csv");
  SUBCASE("simulate then stats is reproducible") {
    const RunResult first = run("raa simulate --students 12 --sentences 4 --seed 5 --out " + log);
    CHECK(first.exit_code == 0);
    const RunResult stats_a = run("raa stats " + log);
    CHECK(stats_a.exit_code == 0);
    CHECK(stats_a.output.find("team,average_score,correct,partial\n") == 0);
    CHECK(stats_a.output.find("overall,") != std::string::npos);

    const RunResult second = run("raa simulate --students 12 --sentences 4 --seed 5 --out " + log);
    CHECK(second.exit_code == 0);
    const RunResult stats_b = run("raa stats " + log);
    CHECK(stats_a.output == stats_b.output);
  }
  SUBCASE("an empty log is a domain error") {
    write_text(log, "student_id,team_id,sentence_id,fuzzy_score,recognition,message,"
                    "pairc_after,timestamp_ms\n");
    CHECK(run("raa stats " + log).exit_code == 1);
  }
  SUBCASE("an unreadable log exits 3") {
    CHECK(run("raa stats /nonexistent/log.csv").exit_code == 3);
  }
  SUBCASE("a six-team log reproduces the published overall row") {
    write_text(log, aifml::session_log_to_string(testsupport::winter_camp_log()));
    const RunResult result = run("raa stats " + log);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("T1,0.512,4,4\n") != std::string::npos);
    CHECK(result.output.find("T5,0.297,1,6\n") != std::string::npos);
    CHECK(result.output.find("overall,0.519,25,25\n") != std::string::npos);
  }
}

TEST_CASE("analytics") {
  const std::string data = temp_path("records.csv");
  REQUIRE(run("analytics synth --out " + data + " --n 160 --seed 9 --noise 0.05").exit_code == 0);

  SUBCASE("default sweep emits the five standard epoch rows") {
    const RunResult result = run("analytics sweep --data " + data + " --seed 9");
    CHECK(result.exit_code == 0);
    for (const char* epoch : {"100", "200", "300", "400", "500"})
      CHECK(result.output.find(std::string("{\"epochs\":") + epoch) != std::string::npos);
    CHECK(result.output.find("\"best\":true") != std::string::npos);
  }
  SUBCASE("train writes its JSON report") {
    const std::string report = temp_path("train.json");
    const RunResult result =
        run("analytics train --data " + data + " --epochs 40 --seed 9 --report " + report);
    CHECK(result.exit_code == 0);
    std::ifstream file(report);
    CHECK(file.good());
  }
  SUBCASE("a malformed header is a domain error naming the columns") {
    const std::string bad = temp_path("bad.csv");
    write_text(bad, "a,b,c\n1,2,3\n");
    CHECK(run("analytics train --data " + bad + " --seed 1").exit_code == 1);
  }
  SUBCASE("affine data drives the best sweep row under 0.01") {
    const std::string affine = temp_path("affine.csv");
    REQUIRE(run("analytics synth --out " + affine + " --n 200 --seed 3 --affine").exit_code == 0);
    const RunResult result = run("analytics sweep --data " + affine + " --seed 3");
    CHECK(result.exit_code == 0);
    // pull every training MSE out of the JSON rows; the best must be < 0.01
    double best = 1e300;
    std::size_t at = 0;
    while ((at = result.output.find("\"mse_train\":", at)) != std::string::npos) {
      at += 12;
      best = std::min(best, std::stod(result.output.substr(at)));
    }
    CHECK(best < 0.01);
  }
}

TEST_CASE("net") {
  SUBCASE("unknown device kind is a usage error") {
    CHECK(run("net device teapot --broker 127.0.0.1:1883").exit_code == 2);
  }
  SUBCASE("an unreachable broker exits 3 after retries") {
    CHECK(run("net serve --broker 127.0.0.1:9 --class c1").exit_code == 3);
  }
}

TEST_CASE("usage errors") {
  CHECK(run("nonsense").exit_code == 2);
  CHECK(run("raa simulate --students 5 --out /tmp/x.csv").exit_code == 2);  // seed is mandatory
}
