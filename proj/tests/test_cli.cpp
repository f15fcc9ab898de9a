#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef LIMID_CLI_PATH
#error "LIMID_CLI_PATH must point at the limid executable"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path p = fs::temp_directory_path() / ("limid_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string("\"") + LIMID_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string file(const std::string& name) { return (scratch() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(scratch() / name) << text; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("generate, validate and stats") {
    REQUIRE(run("generate --family pigfarm --n 2 --out " + file("pf2.json")).status == 0);
    const Run v = run("validate " + file("pf2.json"));
    CHECK(v.status == 0);
    CHECK(v.out.find("7 path nodes") != std::string::npos);
    CHECK(v.out.find("|S|=128") != std::string::npos);

    const Run s = run("stats " + file("pf2.json") + " --both");
    CHECK(s.status == 0);
    CHECK(s.out.find("count=268") != std::string::npos);
    CHECK(s.out.find("644") != std::string::npos);
  }

  TEST_CASE("emit writes LP and MPS") {
    REQUIRE(run("generate --family nmonitoring --n 1 --out " + file("nm1.json")).status == 0);
    CHECK(run("emit " + file("nm1.json") + " --format lp --out " + file("nm1.lp")).status == 0);
    CHECK(slurp(file("nm1.lp")).find("Maximize") != std::string::npos);
    CHECK(slurp(file("nm1.lp")).find("End") != std::string::npos);
    CHECK(run("emit " + file("nm1.json") + " --format mps --out " + file("nm1.mps")).status == 0);
    CHECK(slurp(file("nm1.mps")).find("ENDATA") != std::string::npos);
  }

  TEST_CASE("solve prints JSON and is deterministic") {
    REQUIRE(run("generate --family pigfarm --n 3 --out " + file("pf3.json")).status == 0);
    const Run brute = run("solve " + file("pf3.json") + " --method brute");
    REQUIRE(brute.status == 0);
    const auto j = nlohmann::json::parse(brute.out);
    CHECK(j["expected_utility"].get<double>() == doctest::Approx(726.8121).epsilon(1e-12));
    CHECK(j.contains("toolkit_version"));
    CHECK(j["strategy"].contains("D1"));

    const Run a = run("solve " + file("pf3.json") + " --method spu --restarts 5 --seed 9 --threads 3");
    const Run b = run("solve " + file("pf3.json") + " --method spu --restarts 5 --seed 9 --threads 1");
    REQUIRE(a.status == 0);
    REQUIRE(b.status == 0);
    const auto ja = nlohmann::json::parse(a.out);
    const auto jb = nlohmann::json::parse(b.out);
    CHECK(ja["expected_utility"] == jb["expected_utility"]);
    CHECK(ja["strategy"] == jb["strategy"]);
  }

  TEST_CASE("solution import round trip") {
    REQUIRE(run("generate --family pigfarm --n 1 --out " + file("pf1.json")).status == 0);
    REQUIRE(run("solve " + file("pf1.json") + " --method brute --dump-assignment " + file("pf1.sol")).status == 0);
    const Run imported = run("solve " + file("pf1.json") + " --import-solution " + file("pf1.sol"));
    REQUIRE(imported.status == 0);
    const Run brute = run("solve " + file("pf1.json") + " --method brute");
    CHECK(nlohmann::json::parse(imported.out)["expected_utility"] ==
          nlohmann::json::parse(brute.out)["expected_utility"]);
  }

  TEST_CASE("bench CSV") {
    const Run r = run("bench --family pigfarm --n 2 --instances 3 --method both --no-timing");
    REQUIRE(r.status == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("instance,seed,paths,brute_eu,spu_eu", 0) == 0);
    int rows = 0;
    while (std::getline(in, line)) rows += !line.empty();
    CHECK(rows == 3);
    CHECK(run("bench --family pigfarm --n 2 --instances 3 --method both --no-timing").out == r.out);
  }

  TEST_CASE("chd table") {
    const Run r = run("chd --levels 4");
    CHECK(r.status == 0);
    CHECK(r.out.find("level") != std::string::npos);
  }

  TEST_CASE("exit codes") {
    CHECK(run("validate " + file("does_not_exist.json")).status == 4);
    write("bad.json", "{ not json");
    CHECK(run("validate " + file("bad.json")).status == 4);
    write("unnormalized.json",
          R"({"nodes": [{"name": "C", "kind": "chance", "states": ["a", "b"]}], "probabilities": {"C": [0.5, 0.6]}})");
    const Run bad = run("validate " + file("unnormalized.json"));
    CHECK(bad.status == 2);
    CHECK(bad.err.find("NotNormalized") != std::string::npos);
    CHECK(run("emit " + file("pf2.json") + " --out " + file("x.lp") + " --path-cap 10").status == 3);
    CHECK(run("solve " + file("pf3.json") + " --method brute --strategy-cap 2").status == 3);
    CHECK(run("validate").status == 2);
    CHECK(run("--help").status == 0);
  }
}
