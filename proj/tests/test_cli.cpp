#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <json.hpp>

#include "wva/runner.hpp"

using namespace wva;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("cli_test_out") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const std::string& name,
                         const std::string& text) {
  const fs::path path = dir / name;
  write_file(path.string(), text);
  return path.string();
}

const char* kKickConfig =
    "# single-kick run at a scaled detuning\n"
    "params.lambda_coupling = 500\n"
    "params.theta_postselect = 0.05\n"
    "params.omega_g = 1.5915494309189535e-1\n"  // omega_g t* = 1e-3
    "params.fock_cutoff = 16\n";

}  // namespace

TEST_CASE("flat text and JSON configs parse identically") {
  const ConfigMap flat = parse_config_text(kKickConfig);
  const ConfigMap json = parse_config_json(
      "{\"params\": {\"lambda_coupling\": 500, \"theta_postselect\": 0.05,"
      " \"omega_g\": 1.5915494309189535e-1, \"fock_cutoff\": 16}}");
  CHECK(flat.size() == json.size());
  for (const auto& [k, v] : flat) {
    REQUIRE(json.count(k) == 1);
    CHECK(config_double(flat, k, 0.0) == config_double(json, k, 0.0));
  }
}

TEST_CASE("runs are deterministic byte for byte") {
  const fs::path base = fresh_dir("determinism");
  const std::string cfg = write_config(base, "kick.cfg", kKickConfig);
  const int rc1 = run_cli(Experiment::kick, cfg, {}, (base / "a").string());
  const int rc2 = run_cli(Experiment::kick, cfg, {}, (base / "b").string());
  REQUIRE(rc1 == 0);
  REQUIRE(rc2 == 0);
  for (const char* name : {"kick.json", "manifest.json"}) {
    const std::string a = read_file((base / "a" / name).string());
    const std::string b = read_file((base / "b" / name).string());
    CHECK(a == b);
  }
}

TEST_CASE("manifest config re-parses to the identical run") {
  const fs::path base = fresh_dir("roundtrip");
  const std::string cfg = write_config(base, "kick.cfg", kKickConfig);
  REQUIRE(run_cli(Experiment::kick, cfg, {"params.k_scale=2"},
                  (base / "first").string()) == 0);

  const auto manifest =
      nlohmann::json::parse(read_file((base / "first" / "manifest.json").string()));
  ConfigMap echoed;
  for (const auto& [k, v] : manifest.at("config").items()) {
    echoed[k] = v.get<std::string>();
  }
  const RunConfig rc = parse_run_config(std::nullopt, echoed, (base / "second").string());
  CHECK(rc.experiment == Experiment::kick);
  CHECK(rc.params.k_scale == 2.0);
  run(rc);
  CHECK(read_file((base / "first" / "kick.json").string()) ==
        read_file((base / "second" / "kick.json").string()));
}

TEST_CASE("estimate artifact carries the quoted values") {
  const fs::path out = fresh_dir("estimate");
  REQUIRE(run_cli(Experiment::estimate, "", {}, out.string()) == 0);
  const auto j = nlohmann::json::parse(read_file((out / "estimate.json").string()));
  CHECK(std::abs(j.at("energy_eV").get<double>() - 2.15e-23) / 2.15e-23 < 0.01);
  CHECK(std::abs(j.at("field_tesla").get<double>() - 3.7e-19) / 3.7e-19 < 0.02);
  CHECK(std::abs(j.at("mashhoon_ratio").get<double>() - 2.22e3) / 2.22e3 < 0.01);
}

TEST_CASE("config errors name the offending key and exit with code 1") {
  const fs::path base = fresh_dir("badconfig");

  // missing required coupling
  const std::string no_lambda =
      write_config(base, "missing.cfg", "params.theta_postselect = 0.05\n");
  CHECK(run_cli(Experiment::kick, no_lambda, {}, (base / "o1").string()) == 1);
  CHECK_THROWS_WITH_AS(
      parse_run_config(Experiment::kick, parse_config_text("params.theta_postselect = 0.05\n"),
                       ""),
      "params.lambda_coupling: required key missing", ConfigError);

  // unknown key
  const std::string unknown =
      write_config(base, "unknown.cfg",
                   "params.lambda_coupling = 500\nparams.lambda_typo = 1\n");
  CHECK(run_cli(Experiment::kick, unknown, {}, (base / "o2").string()) == 1);

  // experiment mismatch between command line and config
  const std::string mismatch = write_config(
      base, "mismatch.cfg", std::string("experiment = fisher\n") + kKickConfig);
  CHECK(run_cli(Experiment::kick, mismatch, {}, (base / "o3").string()) == 1);
}

TEST_CASE("physics-regime failures exit with code 2") {
  const fs::path base = fresh_dir("regime");
  const std::string cfg = write_config(
      base, "violent.cfg",
      "params.lambda_coupling = 500\n"
      "params.theta_postselect = 1e-8\n"
      "params.omega_g = 1e-4\n");  // margin = gamma * 1e8 well above 0.1
  CHECK(run_cli(Experiment::kick, cfg, {}, (base / "out").string()) == 2);
}

TEST_CASE("numerical failures exit with code 3") {
  const fs::path base = fresh_dir("numerical");
  // coarse oracle stepping fails the step-doubling convergence gate
  const std::string cfg = write_config(
      base, "coarse.cfg",
      "params.lambda_coupling = 500\n"
      "params.fock_cutoff = 16\n"
      "zassenhaus.steps = 1000\n"
      "zassenhaus.check_convergence = true\n");
  CHECK(run_cli(Experiment::zassenhaus_check, cfg, {}, (base / "out").string()) == 3);
}

TEST_CASE("sweeps produce ordered rows with the swept key first") {
  const fs::path base = fresh_dir("sweep");
  const std::string cfg = write_config(
      base, "sweep.cfg",
      std::string(kKickConfig) +
          "sweep.parameter = params.k_scale\n"
          "sweep.min = 0.5\nsweep.max = 2\nsweep.points = 4\nsweep.scale = linear\n");
  REQUIRE(run_cli(Experiment::kick, cfg, {}, (base / "out").string()) == 0);
  const std::string csv = read_file((base / "out" / "kick_sweep.csv").string());
  CHECK(csv.find("params.k_scale,p_f,") == 0);
  // four data rows in grid order
  std::vector<double> firsts;
  size_t pos = csv.find('\n');
  while (pos != std::string::npos && pos + 1 < csv.size()) {
    const size_t next = csv.find('\n', pos + 1);
    const std::string row = csv.substr(pos + 1, next - pos - 1);
    if (!row.empty()) firsts.push_back(std::stod(row.substr(0, row.find(','))));
    pos = next;
  }
  REQUIRE(firsts.size() == 4);
  CHECK(firsts[0] == doctest::Approx(0.5));
  CHECK(firsts[3] == doctest::Approx(2.0));
  CHECK(std::is_sorted(firsts.begin(), firsts.end()));
}

TEST_CASE("artifacts stay inside the output directory") {
  const fs::path base = fresh_dir("containment");
  const std::string cfg = write_config(base, "kick.cfg", kKickConfig);
  ConfigMap map = load_config_file(cfg);
  RunConfig rc = parse_run_config(Experiment::kick, map, (base / "out").string());
  const auto names = run(rc);
  CHECK(names.size() >= 2);
  size_t files_found = 0;
  for (const auto& entry : fs::recursive_directory_iterator(base / "out")) {
    if (entry.is_regular_file()) ++files_found;
  }
  CHECK(files_found == names.size());
}

TEST_CASE("husimi experiment writes the grid and sidecar") {
  const fs::path base = fresh_dir("husimi");
  const std::string cfg = write_config(
      base, "husimi.cfg",
      std::string(kKickConfig) + "husimi.source = flywheel\nflywheel.n_kicks = 2\n" +
          "husimi.resolution = 41\n");
  REQUIRE(run_cli(Experiment::husimi, cfg, {}, (base / "out").string()) == 0);
  const auto meta =
      nlohmann::json::parse(read_file((base / "out" / "husimi_meta.json").string()));
  CHECK(meta.at("resolution").get<int>() == 41);
  CHECK(std::abs(meta.at("mass").get<double>() - 1.0) < 0.02);
  CHECK(meta.at("markers").size() == 2);
  const std::string grid = read_file((base / "out" / "husimi_grid.csv").string());
  CHECK(std::count(grid.begin(), grid.end(), '\n') == 41);
}

TEST_CASE("decohere kick diagnostic reports the surviving amplification") {
  const fs::path base = fresh_dir("degraded");
  const std::string cfg = write_config(
      base, "d.cfg",
      "params.lambda_coupling = 500\n"
      "params.theta_postselect = 0.05\n"
      "params.omega_g = 1.5915494309189535e-2\n"  // omega_g t* = 1e-4
      "params.fock_cutoff = 8\n"
      "noise.dephase_rate = 246.5\n"
      "noise.integrator_step = 6.2831853071795865e-6\n"  // t*/1e3
      "schedule.pulse_count = 0\n"
      "decohere.samples = 45\n"
      "decohere.kick_diagnostic = true\n");
  REQUIRE(run_cli(Experiment::decohere, cfg, {}, (base / "out").string()) == 0);
  const auto j =
      nlohmann::json::parse(read_file((base / "out" / "decohere.json").string()));
  const auto& dk = j.at("degraded_kick").at("no_pulses");
  const double ideal = 1.0 / std::tan(0.05);
  CHECK(dk.at("amplification").get<double>() > 0.0);
  CHECK(dk.at("amplification").get<double>() < ideal);

  // the same state renders through the phase-space experiment
  const std::string hcfg = write_config(
      base, "h.cfg",
      "params.lambda_coupling = 500\n"
      "params.theta_postselect = 0.05\n"
      "params.omega_g = 1.5915494309189535e-2\n"
      "params.fock_cutoff = 8\n"
      "noise.dephase_rate = 246.5\n"
      "noise.integrator_step = 6.2831853071795865e-6\n"
      "husimi.source = noisy_kick\n"
      "husimi.resolution = 21\n");
  REQUIRE(run_cli(Experiment::husimi, hcfg, {}, (base / "hout").string()) == 0);
  const auto meta =
      nlohmann::json::parse(read_file((base / "hout" / "husimi_meta.json").string()));
  CHECK(std::abs(meta.at("mass").get<double>() - 1.0) < 0.02);
}

TEST_CASE("zassenhaus-check emits the adjudication record") {
  const fs::path base = fresh_dir("zcheck");
  const std::string cfg = write_config(
      base, "z.cfg",
      "params.lambda_coupling = 500\n"
      "params.fock_cutoff = 8\n"
      "zassenhaus.steps = 2000\n"
      "zassenhaus.check_convergence = false\n"
      "zassenhaus.grid = 1e-4,2e-4,1e-3\n");
  REQUIRE(run_cli(Experiment::zassenhaus_check, cfg, {}, (base / "out").string()) == 0);
  const auto j =
      nlohmann::json::parse(read_file((base / "out" / "zassenhaus_check.json").string()));
  CHECK(j.at("orders").size() == 6);
  CHECK(j.at("reference_z").get<double>() == doctest::Approx(-4.44832));
  CHECK(j.at("oracle").at("plateau").size() == 3);
  // the quoted constant is not reproduced, so the structured record must exist
  CHECK_FALSE(j.at("oracle").at("matches_reference").get<bool>());
  REQUIRE(j.at("discrepancy").is_object());
  CHECK(j.at("discrepancy").at("kind").get<std::string>() == "zassenhaus-z-discrepancy");
  CHECK(j.at("discrepancy").at("kick_scaling_exponent").get<double>() ==
        doctest::Approx(2.0).epsilon(0.05));
}
