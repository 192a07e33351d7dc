#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "enskog/config.hpp"
#include "enskog/csv.hpp"
#include "enskog/error.hpp"

using namespace enskog;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kMinimalSimulate = R"({
  "mode": "simulate",
  "sim": {"n_particles": 100, "dt": 1e-3, "t_end": 0.1, "seed": 42,
          "snapshot_times": [0.0, 0.1]}
})";

std::string scratch_dir(const char* name) {
  const fs::path p = fs::temp_directory_path() / "enskog_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a parse error");
  return ErrorKind::kConfig;
}

}  // namespace

TEST_CASE("minimal config gets documented defaults") {
  const ExperimentConfig cfg = parse_config_text(kMinimalSimulate);
  CHECK(cfg.mode == Mode::kSimulate);
  CHECK(cfg.dimension == 3);
  CHECK(cfg.sim.kernel.angular.cutoff_eps == 1e-2);
  CHECK(cfg.sim.kernel.z_min == 1e-3);
  CHECK(cfg.sim.rate_cap == -1.0);
  CHECK(!cfg.config_hash.empty());

  const char* stab = R"({
    "mode": "stability",
    "sim": {"n_particles": 50, "dt": 1e-2, "t_end": 0.1,
            "snapshot_times": [0.0, 0.1]},
    "stability": {"epsilon": 1e-2}
  })";
  const ExperimentConfig sc = parse_config_text(stab);
  CHECK(sc.stability.delta == 0.5);
  CHECK(sc.stability.lambda_cap == 1e6);
  CHECK(sc.stability.mode == CouplingMode::kCommonRandomNumbers);
}

TEST_CASE("unknown keys are rejected with their dotted path") {
  const char* bad = R"({
    "mode": "simulate",
    "kernel": {"sigma": {"gama": 1.0}},
    "sim": {"n_particles": 10, "dt": 1e-3, "t_end": 0.01}
  })";
  try {
    parse_config_text(bad);
    FAIL("expected config-error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
    CHECK(std::string(e.what()).find("sigma.gama") != std::string::npos);
  }
}

TEST_CASE("config validation errors") {
  CHECK(kind_of(R"({"mode": "fly"})") == ErrorKind::kConfig);
  CHECK(kind_of(R"({"mode": "simulate"})") == ErrorKind::kConfig);  // no sim block
  CHECK(kind_of(R"({"mode": "simulate", "dimension": 2,
                    "sim": {"n_particles": 1, "dt": 1e-3, "t_end": 0.0}})") ==
        ErrorKind::kConfig);
  CHECK(kind_of("not json at all") == ErrorKind::kConfig);
  CHECK(kind_of(R"({"mode": "metrics"})") == ErrorKind::kConfig);
  CHECK(kind_of(R"({"mode": "audit", "audit": {"families": ["nope"]}})") ==
        ErrorKind::kConfig);

  // Lambda probes make no sense for hard potentials.
  CHECK(kind_of(R"({
    "mode": "stability",
    "kernel": {"sigma": {"gamma": 1.0}},
    "sim": {"n_particles": 10, "dt": 1e-3, "t_end": 0.01},
    "stability": {"epsilon": 1e-2, "probes": 8}
  })") == ErrorKind::kConfig);

  try {
    parse_config("/nonexistent/enskog.json");
    FAIL("expected io-error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }
}

TEST_CASE("simulate scenario writes schema-conforming csv and a manifest") {
  const std::string dir = scratch_dir("simulate");
  ExperimentConfig cfg = parse_config_text(kMinimalSimulate);
  cfg.output_dir = dir;
  const RunManifest m = run_scenario(cfg);

  const std::string csv = slurp(dir + "/snapshots.csv");
  CHECK(csv.rfind("t,particle_id,r1,r2,r3,v1,v2,v3\n", 0) == 0);
  // 2 snapshots x 100 particles + header.
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 201);

  CHECK(m.version == std::string(kVersion));
  CHECK(m.seed == 42);
  REQUIRE(m.outputs.size() == 2);
  CHECK(m.outputs[0] == "snapshots.csv");
  CHECK(m.outputs[1] == "manifest.json");
  CHECK(fs::exists(dir + "/manifest.json"));

  // Identical config + seed: byte-identical data artifacts.
  const std::string dir2 = scratch_dir("simulate2");
  cfg.output_dir = dir2;
  run_scenario(cfg);
  CHECK(slurp(dir + "/snapshots.csv") == slurp(dir2 + "/snapshots.csv"));
}

TEST_CASE("stability scenario with epsilon 0 reports an all-zero distance column") {
  const std::string dir = scratch_dir("stability0");
  const std::string text = R"({
    "mode": "stability",
    "output": ")" + dir + R"(",
    "sim": {"n_particles": 60, "dt": 1e-2, "t_end": 0.1,
            "snapshot_times": [0.0, 0.05, 0.1], "seed": 5},
    "stability": {"epsilon": 0.0}
  })";
  ExperimentConfig cfg = parse_config_text(text);
  run_scenario(cfg);
  std::ifstream f(dir + "/stability.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line == "t,w1_shifted,majorant,c_gamma_mu,c_gamma_nu,lambda,second_moment");
  while (std::getline(f, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    CHECK(std::stod(cell) == 0.0);
  }
}

TEST_CASE("metrics scenario reads measures and certifies distances") {
  const std::string dir = scratch_dir("metrics");
  DiscreteMeasure mu, nu;
  mu.dim = nu.dim = 3;
  Stream s = Stream::keyed(99, StreamTag::kOracle);
  for (int i = 0; i < 6; ++i) {
    mu.points.push_back({s.gaussian_vec(3), s.gaussian_vec(3)});
    nu.points.push_back({s.gaussian_vec(3), s.gaussian_vec(3)});
  }
  mu.weights.assign(6, 1.0 / 6.0);
  nu.weights.assign(6, 1.0 / 6.0);
  write_measure_csv(dir + "/mu.csv", mu);
  write_measure_csv(dir + "/nu.csv", nu);

  // Round-trip sanity.
  const DiscreteMeasure back = read_measure_csv(dir + "/mu.csv");
  CHECK(back.size() == 6);
  CHECK((back.points[3].v - mu.points[3].v).norm() == 0.0);

  const std::string text = R"({
    "mode": "metrics",
    "output": ")" + dir + R"(",
    "metrics": {"mu_file": ")" + dir + R"(/mu.csv",
                 "nu_file": ")" + dir + R"(/nu.csv",
                 "times": [0.0, 0.5, 2.0]}
  })";
  run_scenario(parse_config_text(text));
  std::ifstream f(dir + "/distances.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line == "t,w1_shifted,primal,dual,gap");
  int rows = 0;
  while (std::getline(f, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    REQUIRE(vals.size() == 5);
    // The certificate recomputes the coupling cost, so the primal column can
    // differ from the solver value only at roundoff level.
    CHECK(std::abs(vals[1] - vals[2]) <= 1e-12 * std::max(1.0, vals[1]));
    CHECK(std::abs(vals[4]) <= 1e-9);  // certified gap
  }
  CHECK(rows == 3);
}

TEST_CASE("audit scenario emits one row per family") {
  const std::string dir = scratch_dir("audit");
  const std::string text = R"({
    "mode": "audit",
    "output": ")" + dir + R"(",
    "audit": {"families": ["tanaka", "eq13"], "samples": 20000, "seed": 3}
  })";
  run_scenario(parse_config_text(text));
  const std::string csv = slurp(dir + "/audit.csv");
  CHECK(csv.rfind("family,samples,max_ratio,violations\n", 0) == 0);
  CHECK(csv.find("tanaka,20000,") != std::string::npos);
  CHECK(csv.find("eq13,20000,") != std::string::npos);
}

TEST_CASE("cli binary surface") {
  const char* bin = std::getenv("ENSKOG_LAB_BIN");
  if (!bin) return;  // only run under ctest where the path is exported
  const std::string dir = scratch_dir("cli");
  {
    std::ofstream f(dir + "/sim.json");
    f << kMinimalSimulate;
  }

  auto run_cmd = [&](const std::string& args) {
    const std::string cmd = std::string(bin) + " " + args + " >" + dir +
                            "/stdout.txt 2>" + dir + "/stderr.txt";
    return std::system(cmd.c_str());
  };

  CHECK(run_cmd("simulate --config " + dir + "/sim.json --validate-only") == 0);
  CHECK(run_cmd("simulate --config " + dir + "/sim.json --out " + dir + "/run") == 0);
  CHECK(fs::exists(dir + "/run/snapshots.csv"));
  CHECK(fs::exists(dir + "/run/manifest.json"));

  // Subcommand / mode mismatch: nonzero exit and a machine-readable record.
  CHECK(run_cmd("audit --config " + dir + "/sim.json") != 0);
  const std::string err = slurp(dir + "/stderr.txt");
  CHECK(err.find("config-error") != std::string::npos);

  // Missing file: io-error.
  CHECK(run_cmd("simulate --config " + dir + "/missing.json") != 0);
  CHECK(slurp(dir + "/stderr.txt").find("io-error") != std::string::npos);
}
