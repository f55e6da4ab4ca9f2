#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, const fs::path& cwd) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" GEODESICS_CLI "' " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    std::ofstream(dir / "golden.json") << R"({"k": 2, "transition": [1, 1, 1, 1], "roof": [1.0, 2.0]})";
    std::ofstream(dir / "flat.json") << R"({"k": 2, "transition": [1, 1, 1, 1], "roof": [1.0, 1.0]})";
  }
  ~Workspace() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("constants for a synthetic system") {
  Workspace w;
  auto r = run("constants --system file:golden.json", w.dir);
  REQUIRE(r.status == 0);
  const auto j = json::parse(r.out)["constants"];
  CHECK(j["h"].get<double>() == doctest::Approx(0.4812118).epsilon(1e-7));
  CHECK(j["A"].get<double>() == doctest::Approx(0.7236068).epsilon(1e-7));
  CHECK(j["sigma2"].get<double>() == doctest::Approx(0.0894427).epsilon(1e-6));
  CHECK(j.contains("residuals"));
  CHECK(j.contains("method"));

  r = run("constants --system file:flat.json", w.dir);
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["constants"]["degenerate"].get<bool>());
}

TEST_CASE("census build and info") {
  Workspace w;
  auto r = run("census build --system octagon --n-max 4 --out census", w.dir);
  REQUIRE(r.status == 0);
  const auto j = json::parse(r.out);
  CHECK(j["record_count"].get<int>() == 8 + 32 + 112 + 612);
  CHECK(j["histogram"].size() == 4);
  CHECK(fs::exists(w.dir / "census" / "octagon_n4.csv"));

  r = run("census info --census census/octagon_n4.csv", w.dir);
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["checksum"] == j["checksum"]);

  r = run("census build --system schottky --separation 3.0 --n-max 5 --out census --format csv", w.dir);
  REQUIRE(r.status == 0);
  CHECK(r.out.find("# presentation=free:rank=2") != std::string::npos);
  CHECK(r.out.find("# mode=testbed") != std::string::npos);
}

TEST_CASE("census directory from the environment") {
  Workspace w;
  const auto r = run("", w.dir);  // no subcommand
  CHECK(r.status == 1);
  const std::string env = "GEODESIC_CENSUS_DIR='" + (w.dir / "envdir").string() + "' ";
  const std::string cmd = "cd '" + w.dir.string() + "' && " + env + "'" GEODESICS_CLI "' census build --system octagon --n-max 2 > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(w.dir / "envdir" / "octagon_n2.csv"));
}

TEST_CASE("error reporting and exit codes") {
  Workspace w;
  REQUIRE(run("census build --system octagon --n-max 3 --out .", w.dir).status == 0);
  auto text = slurp(w.dir / "octagon_n3.csv");
  std::ofstream(w.dir / "bad.csv", std::ios::binary) << text.substr(0, text.size() - 30);

  auto r = run("census info --census bad.csv", w.dir);
  CHECK(r.status == 2);
  const auto e = json::parse(r.out);
  CHECK(e["error"] == "checksum_mismatch");
  CHECK(e["kind"] == "data_integrity");

  r = run("stats clt --census octagon_n3.csv --T 100", w.dir);
  CHECK(r.status == 3);
  CHECK(json::parse(r.out)["error"] == "cutoff_exceeded");

  r = run("census build --system nowhere --n-max 3", w.dir);
  CHECK(r.status == 1);
  CHECK(json::parse(r.out)["kind"] == "usage");

  r = run("census build --system octagon --n-max 3 --format xml", w.dir);
  CHECK(r.status == 1);

  r = run("stats clt --census octagon_n3.csv --system file:flat.json --T 3.5", w.dir);
  CHECK(r.status == 3);
}

TEST_CASE("reports are deterministic and carry provenance") {
  Workspace w;
  REQUIRE(run("census build --system golden.json --n-max 14 --out a --workers 1", w.dir).status == 0);
  REQUIRE(run("census build --system golden.json --n-max 14 --out b --workers 8", w.dir).status == 0);
  CHECK(slurp(w.dir / "a" / "golden_n14.csv") == slurp(w.dir / "b" / "golden_n14.csv"));

  for (const std::string report : {"avg", "var", "clt", "llt", "wordstats", "mgf"}) {
    CAPTURE(report);
    const std::string args = "stats " + report + " --census a/golden_n14.csv --system file:golden.json --z 0.02";
    const auto r1 = run(args + " --out ra --workers 1", w.dir);
    const auto r2 = run(args + " --out rb --workers 4", w.dir);
    REQUIRE(r1.status == 0);
    CHECK(r1.out == r2.out);
    CHECK(slurp(w.dir / "ra" / ("stats_" + report + ".json")) == slurp(w.dir / "rb" / ("stats_" + report + ".json")));
    const auto j = json::parse(r1.out);
    CHECK(j["census"]["checksum"].get<std::string>().size() == 16);
    CHECK(j["constants"].contains("sigma2"));
  }

  const auto csv = run("stats llt --census a/golden_n14.csv --system file:golden.json --x-grid -2:2:1 --format csv", w.dir);
  REQUIRE(csv.status == 0);
  CHECK(csv.out.find("x,count,frequency,model,scaled,scaled_model\n") != std::string::npos);

  const auto p = run("pressure --system file:golden.json --s-grid 0:1:0.5 --format csv", w.dir);
  REQUIRE(p.status == 0);
  CHECK(p.out.find("s,pressure,std_error,derivative\n") != std::string::npos);
}
