#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "eccc/ensemble.hpp"

#ifndef ECCC_CLI_PATH
#error "ECCC_CLI_PATH must point at the built CLI binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status;
  std::string out_file;
};

fs::path work_dir() {
  const fs::path p = fs::temp_directory_path() / "eccc_cli_tests";
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(ECCC_CLI_PATH) + " " + args + " > /dev/null 2> /dev/null";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("same configuration and seed give byte-identical outputs") {
  const fs::path dir = work_dir();
  const fs::path f1 = dir / "bb84_a.json";
  const fs::path f2 = dir / "bb84_b.json";
  CHECK(run("eccc --family bb84 --p 0.5 --format json --output " + f1.string()) == 0);
  CHECK(run("eccc --family bb84 --p 0.5 --format json --output " + f2.string()) == 0);
  const std::string a = slurp(f1);
  CHECK(!a.empty());
  CHECK(a == slurp(f2));

  const fs::path s1 = dir / "sweep_a.csv";
  const fs::path s2 = dir / "sweep_b.csv";
  const std::string fig = "fig1 --theta-steps 5 --samples 300 --resolution 32 --output ";
  CHECK(run(fig + s1.string()) == 0);
  CHECK(run(fig + s2.string()) == 0);
  const std::string sa = slurp(s1);
  CHECK(sa == slurp(s2));
  CHECK(sa.rfind("theta_rad,j_closed,j_mc,stderr,n_samples,j_bloch_ref,uc_ref", 0) == 0);
}

TEST_CASE("eccc subcommand reports the six-state values") {
  const fs::path out = work_dir() / "six.json";
  REQUIRE(run("eccc --family six-state --format json --output " + out.string()) == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(std::abs(j["j"].get<double>() - 2.0 / 3.0) <= 1e-6);
  CHECK(std::abs(j["q"].get<double>() - 1.0 / 3.0) <= 1e-6);
  CHECK(j["basis"].size() == 2);
}

TEST_CASE("bb84 sweep matches the closed form") {
  const fs::path out = work_dir() / "sweep.csv";
  REQUIRE(run("eccc --family bb84 --p 0..1 --p-step 0.25 --output " + out.string()) == 0);
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "p,j,q");
  int rows = 0;
  while (std::getline(csv, line)) {
    double p = 0.0;
    double j = 0.0;
    double q = 0.0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &p, &j, &q) == 3);
    CHECK(std::abs(j - (0.75 + 0.25 * std::abs(2.0 * p - 1.0))) <= 1e-4);
    CHECK(std::abs(j + q - 1.0) <= 1e-12);
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("fig1 rows carry the closed form and references") {
  const fs::path out = work_dir() / "fig1_rows.csv";
  REQUIRE(run("fig1 --theta-steps 5 --samples 300 --resolution 32 --output " + out.string()) ==
          0);
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);  // header
  std::vector<std::array<double, 7>> rows;
  while (std::getline(csv, line)) {
    std::array<double, 7> r{};
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r[0], &r[1], &r[2], &r[3],
                        &r[4], &r[5], &r[6]) == 7);
    rows.push_back(r);
  }
  REQUIRE(rows.size() == 5);
  // middle row is theta = pi/2 with j_closed = 3/4; the closed-form column
  // is symmetric about pi/2 and the reference columns are constant
  CHECK(std::abs(rows[2][0] - 1.5707963267948966) <= 1e-10);  // 12 significant digits in the file
  CHECK(std::abs(rows[2][1] - 0.75) <= 1e-12);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::abs(rows[i][1] - rows[rows.size() - 1 - i][1]) <= 1e-12);
    CHECK(std::abs(rows[i][5] - 2.0 / 3.0) <= 1e-12);
    CHECK(std::abs(rows[i][6] - 5.0 / 6.0) <= 1e-12);
  }
}

TEST_CASE("qkd subcommand emits the report schema") {
  const fs::path out = work_dir() / "qkd.json";
  REQUIRE(run("qkd --protocol bb84 --rounds 20000 --output " + out.string()) == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(out));
  for (const char* key : {"exact_r", "empirical_r", "rounds", "sifted", "q_reference",
                          "eve_basis", "seed"}) {
    CHECK(j.contains(key));
  }
  CHECK(std::abs(j["q_reference"].get<double>() - 0.25) <= 1e-6);
  CHECK(std::abs(j["exact_r"].get<double>() - 0.25) <= 1e-6);
}

TEST_CASE("validate accepts good files and rejects bad ones with nonzero status") {
  const fs::path good = work_dir() / "good.json";
  eccc::save_ensemble(eccc::make_six_state(), good.string());
  CHECK(run("validate --input " + good.string()) == 0);

  const fs::path bad = work_dir() / "bad.json";
  {
    std::ofstream o(bad);
    o << R"({"dim": 2, "items": [{"weight": 0.9, "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]}]})";
  }
  CHECK(run("validate --input " + bad.string()) != 0);
  CHECK(run("eccc --input " + bad.string()) != 0);
  CHECK(run("validate --input /nonexistent.json") != 0);
}

TEST_CASE("qkd warns about ensembles with vanishing quantumness") {
  // single-basis protocol: two orthogonal (commuting) sending states
  const fs::path file = work_dir() / "commuting_protocol.json";
  {
    std::ofstream o(file);
    o << R"({"dim": 2, "items": [
      {"weight": 0.5, "basis": 0, "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]},
      {"weight": 0.5, "basis": 0, "matrix": [[[0,0],[0,0]],[[0,0],[1,0]]]}]})";
  }
  const fs::path out = work_dir() / "commuting_qkd.json";
  const fs::path err = work_dir() / "commuting_qkd.err";
  const std::string cmd = std::string(ECCC_CLI_PATH) + " qkd --input " + file.string() +
                          " --rounds 5000 --output " + out.string() + " 2> " + err.string();
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(slurp(err).find("unsuitable for QKD") != std::string::npos);
  const nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["q_reference"].get<double>() <= 1e-9);
  CHECK(j["empirical_r"].get<double>() <= 1e-12);
}

TEST_CASE("eccc csv format emits a single summary row") {
  const fs::path out = work_dir() / "six.csv";
  REQUIRE(run("eccc --family six-state --format csv --output " + out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("ensemble,dim,states,j,q", 0) == 0);
  CHECK(csv.find("0.666666666667") != std::string::npos);
}

TEST_CASE("explore runs a tiny sweep") {
  const fs::path out = work_dir() / "explore.txt";
  CHECK(run("explore --trials 2 --restarts 8 --output " + out.string()) == 0);
  const std::string txt = slurp(out);
  CHECK(txt.find("product inequality") != std::string::npos);
  CHECK(txt.find("seed:") != std::string::npos);
}

TEST_CASE("loaded ensembles round through the eccc subcommand") {
  const fs::path file = work_dir() / "loaded.json";
  eccc::save_ensemble(eccc::make_bb84_weighted(0.9), file.string());
  const fs::path out = work_dir() / "loaded_result.json";
  REQUIRE(run("eccc --input " + file.string() + " --format json --output " + out.string()) == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(std::abs(j["j"].get<double>() - 0.95) <= 1e-6);
}

}  // TEST_SUITE
