#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kPresets = std::string(SSHBATH_SOURCE_DIR) + "/presets";

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"sshbath"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return sshbath::cli::run((int)argv.size(), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_preset(const std::string& name) {
  std::ifstream in(kPresets + "/" + name + ".json");
  REQUIRE(in.good());
  return json::parse(in);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sshbath_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("preset parameter blocks match the figure captions") {
  {  // single-QE dynamics: J1/J2 in {0.7, 1.02, 1.1}, ga = gb = 0.05, O = 0.2
    const json f = load_preset("fig2b");
    REQUIRE(f["runs"].size() == 3);
    const std::vector<double> j1s{0.7, 1.02, 1.1};
    for (size_t i = 0; i < 3; ++i) {
      const json& r = f["runs"][i];
      CHECK(r["bath"]["j1"].get<double>() == j1s[i]);
      CHECK(r["bath"]["gamma_b"].get<double>() == 0.05);
      CHECK(r["emitters"][0]["gamma_a"].get<double>() == 0.05);
      CHECK(r["emitters"][0]["omega_rabi"].get<double>() == 0.2);
      CHECK(r["emitters"][0]["delta"].get<double>() == 0.0);
    }
  }
  {  // two-excitation sets
    const json f = load_preset("fig4c");
    const json& blue = f["runs"][0];
    CHECK(blue["bath"]["j1"].get<double>() == 1.01);
    CHECK(blue["bath"]["gamma_b"].get<double>() == 0.1);
    CHECK(blue["emitter"]["gamma_a"].get<double>() == 0.06);
    CHECK(blue["emitter"]["omega_rabi"].get<double>() == 0.01);
    CHECK(blue["u"].get<double>() == 0.1);
    const json& red = f["runs"][1];
    CHECK(red["bath"]["j1"].get<double>() == 1.1);
    CHECK(red["bath"]["gamma_b"].get<double>() == 1.0);
    CHECK(red["emitter"]["gamma_a"].get<double>() == 0.2);
    CHECK(red["emitter"]["omega_rabi"].get<double>() == 0.2);
    CHECK(red["u"].get<double>() == 0.4);
  }
  {  // g2 sweep inherits the blue set
    const json f = load_preset("fig4d");
    CHECK(f["bath"]["j1"].get<double>() == 1.01);
    CHECK(f["bath"]["gamma_b"].get<double>() == 0.1);
    CHECK(f["emitter"]["gamma_a"].get<double>() == 0.06);
    CHECK(f["emitter"]["omega_rabi"].get<double>() == 0.01);
    CHECK(f["tau_u_list"] == json::array({0.1, 0.3}));
  }
  {  // dissipative bound states: ga = gb = 0.1, O = 0.1, j1 in {0.9, 1.03, 1.1}
    const json f = load_preset("fig9");
    std::vector<double> j1s;
    for (const json& r : f["runs"]) {
      j1s.push_back(r["bath"]["j1"].get<double>());
      CHECK(r["bath"]["gamma_b"].get<double>() == 0.1);
      CHECK(r["emitter"]["gamma_a"].get<double>() == 0.1);
      CHECK(r["emitter"]["omega_rabi"].get<double>() == 0.1);
    }
    CHECK(std::count(j1s.begin(), j1s.end(), 0.9) >= 2);
    CHECK(std::count(j1s.begin(), j1s.end(), 1.03) == 2);
    CHECK(std::count(j1s.begin(), j1s.end(), 1.1) >= 2);
    CHECK(f["n_b"].get<int>() == 500);
  }
  {  // emitter chain
    const json f = load_preset("fig13");
    for (const json& r : f["runs"]) {
      CHECK(r["bath"]["j1"].get<double>() == 1.1);
      CHECK(r["bath"]["gamma_b"].get<double>() == 0.05);
      CHECK(r["n_b"].get<int>() == 2000);
      CHECK(r["emitters"].size() == 10);
      for (const json& e : r["emitters"]) {
        CHECK(e["gamma_a"].get<double>() == 0.05);
        CHECK(e["omega_rabi"].get<double>() == 0.2);
      }
    }
  }
  {  // OBC comparison
    const json f = load_preset("fig14");
    CHECK(f["mode"].get<std::string>() == "obc");
    CHECK(f["n_b"].get<int>() == 20);
  }
  {  // detuned emitter in a side point gap
    const json f = load_preset("fig15");
    for (const json& r : f["runs"]) {
      CHECK(r["emitter"]["delta"].get<double>() == 1.0);
      CHECK(r["emitter"]["gamma_a"].get<double>() == 0.1);
      CHECK(r["bath"]["gamma_b"].get<double>() == 0.3);
    }
  }
  {  // mirage interaction curves
    const json f = load_preset("fig12");
    CHECK(f["sheet"].get<std::string>() == "second");
    CHECK(f["d_list"] == json::array({0, 1, 3, 10}));
    CHECK(f["omega_rabi"].get<double>() == 0.1);
    CHECK(f["bath"]["gamma_b"].get<double>() == 0.1);
  }
}

TEST_CASE("identical config produces byte-identical CSV") {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  CHECK(run_cli({"phase", "--preset", "fig2a", "--presets-dir", kPresets, "--out",
                 a.string()}) == 0);
  CHECK(run_cli({"phase", "--preset", "fig2a", "--presets-dir", kPresets, "--out",
                 b.string()}) == 0);
  const std::string ca = slurp(a / "phase.csv");
  CHECK(!ca.empty());
  CHECK(ca == slurp(b / "phase.csv"));
}

TEST_CASE("spectrum config end-to-end with SVG") {
  const fs::path dir = fresh_dir("spec");
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"command":"spectrum","bath":{"j1":1.02,"j2":1.0,"gamma_b":0.05},"n_k":32})";
  CHECK(run_cli({"spectrum", "--config", cfg.string(), "--out", dir.string(), "--svg"}) == 0);
  const std::string csv = slurp(dir / "spectrum.csv");
  CHECK(csv.rfind("k,closed_plus_re", 0) == 0);
  CHECK(fs::exists(dir / "spectrum.svg"));
}

TEST_CASE("interaction preset reproduces the mirage boundary structure") {
  const fs::path dir = fresh_dir("inter");
  CHECK(run_cli({"interaction", "--preset", "fig12", "--presets-dir", kPresets, "--out",
                 dir.string()}) == 0);
  std::ifstream in(dir / "interaction_mirage.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("j1,abs_sigma_AB_d0", 0) == 0);
  // below the mirage boundary the forward d=0 element vanishes, above it does not
  double below = -1, above = -1;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    const double j1 = std::stod(tok);
    std::getline(ss, tok, ',');
    const double ab0 = std::stod(tok);
    if (std::abs(j1 - 0.9) < 2e-3) below = ab0;
    if (std::abs(j1 - 1.1) < 2e-3) above = ab0;
  }
  CHECK(below == 0.0);
  CHECK(above > 0.005);
}

TEST_CASE("error handling and exit codes") {
  const fs::path dir = fresh_dir("err");
  // missing preset -> config error (1)
  CHECK(run_cli({"phase", "--preset", "nonexistent", "--presets-dir", kPresets, "--out",
                 dir.string()}) == 1);
  // config command mismatch -> config error (1)
  const fs::path cfg = dir / "bad.json";
  std::ofstream(cfg) << R"({"command":"spectrum","bath":{"j1":1.0,"j2":1.0,"gamma_b":0.0}})";
  CHECK(run_cli({"phase", "--config", cfg.string(), "--out", dir.string()}) == 1);
  // invalid physical parameters -> config error (1)
  const fs::path cfg2 = dir / "bad2.json";
  std::ofstream(cfg2) << R"({"command":"spectrum","bath":{"j1":-1.0,"j2":1.0,"gamma_b":0.0}})";
  CHECK(run_cli({"spectrum", "--config", cfg2.string(), "--out", dir.string()}) == 1);
}

TEST_CASE("validate --quick holds") {
  CHECK(run_cli({"validate", "--quick"}) == 0);
}
