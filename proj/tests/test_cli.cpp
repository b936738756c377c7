#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {

const std::string cli = TABDRW_CLI;
const std::string dir = "/tmp/tabdrw_cli_test";

int run(const std::string& args) {
  const std::string cmd = cli + " " + args + " > " + dir + "/stdout.txt 2> " + dir + "/stderr.txt";
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) { return json::parse(slurp(path)); }

struct Setup {
  Setup() {
    REQUIRE(std::system(("mkdir -p " + dir).c_str()) == 0);
    REQUIRE(run("synth --rows 800 --cols 11 --seed 5 --out " + dir + "/data.csv") == 0);
  }
};

}  // namespace

TEST_CASE("cli end-to-end embed, detect, attack") {
  static Setup setup;

  REQUIRE(run("embed --in " + dir + "/data.csv --key 0xABCDEF --privacy --out " + dir +
              "/wm.csv --state-out " + dir + "/state.txt --report " + dir + "/embed.json") == 0);
  json emb = read_json(dir + "/embed.json");
  CHECK(emb["n_rows"] == 800);
  CHECK(emb["p"] == 11);
  CHECK(emb["m"] == 5);
  CHECK(emb["gamma"] == 0.5);
  CHECK(emb["mean_modified_per_row"].get<double>() > 0.5);

  SECTION("same key detects") {
    REQUIRE(run("detect --in " + dir + "/wm.csv --key 0xABCDEF --privacy --report " + dir +
                "/det.json") == 0);
    json det = read_json(dir + "/det.json");
    CHECK(det["decision"] == true);
    CHECK(det["z"].get<double>() > 6.0);
    CHECK(det["null"]["source"] == "theoretical");
  }

  SECTION("frozen state detection") {
    REQUIRE(run("detect --in " + dir + "/wm.csv --key 0xABCDEF --state " + dir +
                "/state.txt --report " + dir + "/detf.json") == 0);
    json det = read_json(dir + "/detf.json");
    CHECK(det["transform_mode"] == "frozen");
    CHECK(det["z"].get<double>() > 6.0);
  }

  SECTION("wrong key stays quiet") {
    REQUIRE(run("detect --in " + dir + "/wm.csv --key 1234 --privacy --report " + dir + "/detw.json") == 0);
    json det = read_json(dir + "/detw.json");
    CHECK(det["decision"] == false);
  }

  SECTION("shuffle attack leaves z unchanged") {
    REQUIRE(run("attack --in " + dir + "/wm.csv --kind shuffle --seed 3 --out " + dir +
                "/shuffled.csv") == 0);
    REQUIRE(run("detect --in " + dir + "/wm.csv --key 0xABCDEF --privacy --report " + dir + "/a.json") == 0);
    REQUIRE(run("detect --in " + dir + "/shuffled.csv --key 0xABCDEF --privacy --report " + dir +
                "/b.json") == 0);
    CHECK(read_json(dir + "/a.json")["z"] == read_json(dir + "/b.json")["z"]);
  }

  SECTION("row deletion attack keeps detection alive") {
    REQUIRE(run("attack --in " + dir + "/wm.csv --kind row_del --frac 0.1 --seed 4 --out " +
                dir + "/rowdel.csv") == 0);
    REQUIRE(run("detect --in " + dir + "/rowdel.csv --key 0xABCDEF --privacy --report " + dir +
                "/detr.json") == 0);
    json det = read_json(dir + "/detr.json");
    CHECK(det["n_rows"] == 720);
    CHECK(det["z"].get<double>() > 6.0);
  }

  SECTION("fidelity between original and watermarked") {
    REQUIRE(run("fidelity --real " + dir + "/data.csv --synth " + dir + "/wm.csv --report " +
                dir + "/fid.json") == 0);
    json fid = read_json(dir + "/fid.json");
    CHECK(fid["density"].get<double>() > 0.9);
    CHECK(fid["corr"].get<double>() > 0.9);
  }
}

TEST_CASE("cli bound subcommand emits the reference grid") {
  static Setup setup;
  REQUIRE(run("bound --n 1000 --p 11 --gamma 0.5 --delta 0.5 --sigmas 0.1,0.5,1.0") == 0);
  const std::string out = slurp(dir + "/stdout.txt");
  CHECK(out.find("sigma,z_lower_bound") != std::string::npos);
  CHECK(out.find("0.1,30.12") != std::string::npos);
  CHECK(out.find("1,7.04") != std::string::npos);

  REQUIRE(run("bound --sample-size --sigmas 0.1,0.2,0.5 --alpha 0.001 --beta 0.01") == 0);
  const std::string sizes = slurp(dir + "/stdout.txt");
  CHECK(sizes.find("0.1,108") != std::string::npos);
  CHECK(sizes.find("0.2,153") != std::string::npos);
  CHECK(sizes.find("0.5,437") != std::string::npos);
}

TEST_CASE("cli trace reports rank and bits") {
  static Setup setup;
  REQUIRE(run("trace --in " + dir + "/data.csv --key 9 --row 10 --report " + dir +
              "/trace.json") == 0);
  json tr = read_json(dir + "/trace.json");
  CHECK(tr["m"] == 5);
  CHECK(tr["bits"].size() == 5);
  const double r = tr["normalized_rank"].get<double>();
  CHECK(r >= 0.0);
  CHECK(r <= 1.0);
  CHECK(tr["subset"].size() == 6);
}

TEST_CASE("cli rejects bad input with a nonzero exit code") {
  static Setup setup;
  CHECK(run("detect --in /nonexistent.csv --key 1") != 0);
  CHECK(run("embed --in " + dir + "/data.csv --key notakey --out " + dir + "/x.csv") != 0);
  CHECK(run("trace --in " + dir + "/data.csv --key 1 --row 100000") != 0);
}
