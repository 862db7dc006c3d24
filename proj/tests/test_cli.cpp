#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "equifocal/json_io.hpp"

namespace {

using equifocal::Json;

std::string cli_path() { return EQUIFOCAL_CLI_BIN; }

int run(const std::string& args) {
  const std::string cmd = "\"" + cli_path() + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("cli_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("focal-scan of the equator family") {
  TempFile out("equator.json");
  const int code = run("focal-scan --space sphere:4 --shape diag:0,0,0 --tmax 6.2832 --output " +
                       out.path);
  CHECK(code == 0);
  const Json report = Json::parse(slurp(out.path));
  CHECK(report["tool"] == "equifocal");
  CHECK(report["command"] == "focal-scan");
  const auto& roots = report["profile"]["roots"];
  REQUIRE(roots.size() == 2);
  CHECK(roots[0]["t"].get<double>() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-9));
  CHECK(roots[0]["mult"] == 3);
  CHECK(roots[1]["t"].get<double>() == doctest::Approx(3 * std::numbers::pi / 2).epsilon(1e-9));
}

TEST_CASE("focal-scan with a shape operator from a file") {
  TempFile shape("cp3_shape.json");
  {
    // Diagonal operator in the adapted frame of the cpn:3 spectrum (5 x 5).
    std::ofstream f(shape.path);
    f << R"({"matrix": [[0.5,0,0,0,0],[0,1.0,0,0,0],[0,0,1.0,0,0],[0,0,0,-0.25,0],[0,0,0,0,2.0]]})";
  }
  TempFile out("cp3_profile.json");
  const int code = run("focal-scan --space cpn:3 --shape file:" + shape.path + " --tmax 1.5 " +
                       "--output " + out.path);
  CHECK(code == 0);
  const Json report = Json::parse(slurp(out.path));
  CHECK(report["profile"]["roots"].size() >= 1);
  for (const auto& r : report["profile"]["roots"]) CHECK(r["mult"].get<int>() >= 1);
}

TEST_CASE("focal-scan from an OT-FKM sample reproduces the quarter-period pattern") {
  TempFile out("otfkm_scan.json");
  const int code = run("focal-scan --shape otfkm:1,4 --level 0 --seed 5 --output " + out.path);
  CHECK(code == 0);
  const Json report = Json::parse(slurp(out.path));
  const auto& roots = report["profile"]["roots"];
  REQUIRE(roots.size() == 8);
  for (size_t i = 0; i + 1 < roots.size(); ++i) {
    const double gap = roots[i + 1]["t"].get<double>() - roots[i]["t"].get<double>();
    CHECK(gap == doctest::Approx(std::numbers::pi / 4).epsilon(1e-7));
  }
}

TEST_CASE("verify pipeline and expectation gating") {
  TempFile out("verify.json");
  CHECK(run("verify --m 1 --l 4 --samples 4 --seed 3 --expect-g 4 --output " + out.path) == 0);
  const Json report = Json::parse(slurp(out.path));
  CHECK(report["pass"] == true);
  CHECK(report["equifocal"]["g"] == 4);
  CHECK(report["equifocal"]["m1"] == 1);
  CHECK(report["equifocal"]["m2"] == 2);

  CHECK(run("verify --m 1 --l 4 --samples 2 --seed 3 --expect-g 3 --output " + out.path) == 2);

  TempFile out8("verify_l8.json");
  CHECK(run("verify --m 1 --l 8 --samples 3 --seed 3 --expect-g 4 --expect-m1 1 --expect-m2 6 "
            "--output " +
            out8.path) == 0);
  const Json rep8 = Json::parse(slurp(out8.path));
  CHECK(rep8["equifocal"]["m2"] == 6);
}

TEST_CASE("bounds command reports the product identities") {
  TempFile out("bounds.json");
  CHECK(run("bounds --space hpn:2 --output " + out.path) == 0);
  const Json report = Json::parse(slurp(out.path));
  CHECK(report["required_g_m1_plus_m2"] == 10);
  CHECK(report["focal_distance_lower_bound"].get<double>() > 0.0);

  CHECK(run("bounds --space cap2 --g 11 --m1 1 --m2 1 --output " + out.path) == 0);
  CHECK(run("bounds --space cap2 --g 6 --m1 2 --m2 2 --output " + out.path) == 2);
}

TEST_CASE("invariants command emits the reference omega rows") {
  TempFile out("invariants.json");
  CHECK(run("invariants --m 1 --l 4 --structure jprime --level 0 --count 8 --seed 2 "
            "--anchor-points --output " +
            out.path) == 0);
  const Json report = Json::parse(slurp(out.path));
  REQUIRE(report.contains("anchors"));
  CHECK(report["anchors"][0]["omega"].get<double>() == doctest::Approx(128.0));
  CHECK(report["anchors"][1]["omega"].get<double>() == doctest::Approx(-128.0));
  CHECK(report["anchors_pass"] == true);
  CHECK(report["reports"][1]["invariant"] == "alpha");
  CHECK(report["reports"][1]["verdict"] == "non-constant");

  CHECK(run("invariants --m 1 --l 4 --structure j --level 0 --count 8 --seed 2 --output " +
            out.path) == 0);
  const Json report_j = Json::parse(slurp(out.path));
  CHECK(report_j["reports"][1]["verdict"] == "constant");
}

TEST_CASE("exit codes for usage and runtime errors") {
  CHECK(run("--no-such-flag") == 64);
  CHECK(run("focal-scan --space sphere:4 --shape file:does_not_exist.json") == 1);
  CHECK(run("focal-scan --space sphere:4 --shape diag:0,0") == 1);  // dimension mismatch
  CHECK(run("otfkm --m 3 --l 2") == 1);                             // inadmissible pair
}

TEST_CASE("config file supplies defaults that flags override") {
  TempFile cfg("config.json");
  {
    std::ofstream f(cfg.path);
    f << R"({"m": 1, "l": 4, "samples": 3, "seed": 9})";
  }
  TempFile out1("cfg_a.json"), out2("cfg_b.json");
  CHECK(run("otfkm --config " + cfg.path + " --output " + out1.path) == 0);
  const Json a = Json::parse(slurp(out1.path));
  CHECK(a["config"]["samples"] == 3);
  CHECK(a["seed"] == 9);

  CHECK(run("otfkm --config " + cfg.path + " --samples 2 --output " + out2.path) == 0);
  const Json b = Json::parse(slurp(out2.path));
  CHECK(b["config"]["samples"] == 2);
}

TEST_CASE("fixed seeds reproduce byte-identical reports") {
  TempFile out1("det_a.json"), out2("det_b.json");
  const std::string args = "otfkm --m 1 --l 4 --level 0.25 --samples 5 --seed 42 --output ";
  CHECK(run(args + out1.path) == 0);
  CHECK(run(args + out2.path) == 0);
  const std::string a = slurp(out1.path), b = slurp(out2.path);
  CHECK(!a.empty());
  CHECK(a == b);
}

TEST_CASE("thread cap does not change results") {
  TempFile out1("threads_one.json"), out2("threads_many.json");
  const std::string args = "otfkm --m 1 --l 8 --level 0 --samples 4 --seed 6 --output ";
  const std::string cli = "\"" + cli_path() + "\" ";
  CHECK(WEXITSTATUS(std::system(
            ("EQUIFOCAL_THREADS=1 " + cli + args + out1.path + " >/dev/null 2>&1").c_str())) == 0);
  CHECK(WEXITSTATUS(std::system(
            ("EQUIFOCAL_THREADS=8 " + cli + args + out2.path + " >/dev/null 2>&1").c_str())) == 0);
  CHECK(slurp(out1.path) == slurp(out2.path));
}

TEST_CASE("generic spaces load their root table from JSON") {
  TempFile table("roots.json");
  {
    std::ofstream f(table.path);
    f << R"({"rank": 2, "roots": [{"coeffs": [1.0, 0.0], "mult": 2},
                                  {"coeffs": [0.0, 1.0], "mult": 2}]})";
  }
  TempFile out("generic_scan.json");
  const int code = run("focal-scan --space generic:" + table.path +
                       " --direction 1,0 --shape diag:0.9,0.9,-4,-4,2 --tmax 2.5 --output " +
                       out.path);
  CHECK(code == 0);
  const Json report = Json::parse(slurp(out.path));
  // Unit-frequency block with eigenvalue 0.9 and a kernel root at 1/2.
  REQUIRE(report["profile"]["roots"].size() >= 2);
  CHECK(report["profile"]["roots"][0]["t"].get<double>() ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("otfkm emits the Clifford matrices on request") {
  TempFile out("system.json");
  CHECK(run("otfkm --m 2 --l 4 --samples 1 --seed 1 --with-matrices --output " + out.path) == 0);
  const Json report = Json::parse(slurp(out.path));
  REQUIRE(report["system"]["A"].size() == 3);
  CHECK(report["system"]["A"][0][0][0] == 1.0);   // A0 upper-left identity block
  CHECK(report["system"]["E"][0][0][1] == -1.0);  // E2 rotation block
  CHECK(report["samples"][0]["curvatures"].size() >= 1);
}

TEST_CASE("csv output is a flat projection") {
  TempFile out("flat.csv");
  CHECK(run("bounds --space sphere:5 --format csv --output " + out.path) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.rfind("key,value\n", 0) == 0);
  CHECK(text.find("focal_distance_lower_bound") != std::string::npos);
}
