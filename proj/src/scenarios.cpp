#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "enskog/config.hpp"
#include "enskog/csv.hpp"
#include "enskog/error.hpp"

namespace enskog {

namespace fs = std::filesystem;

namespace {

void write_manifest(const std::string& dir, const RunManifest& m) {
  nlohmann::json doc;
  doc["config_hash"] = m.config_hash;
  doc["seed"] = m.seed;
  doc["version"] = m.version;
  doc["wall_time_sec"] = m.wall_time_sec;
  doc["outputs"] = m.outputs;
  std::ofstream f(dir + "/manifest.json");
  if (!f) fail(ErrorKind::kIo, "cannot write manifest in " + dir);
  f << doc.dump(2) << '\n';
}

}  // namespace

RunManifest run_scenario(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create output directory " + cfg.output_dir);

  RunManifest manifest;
  manifest.config_hash = cfg.config_hash;
  manifest.version = kVersion;

  auto out_path = [&](const char* name) { return cfg.output_dir + "/" + name; };

  switch (cfg.mode) {
    case Mode::kSimulate: {
      manifest.seed = cfg.sim.seed;
      RunResult rr = run(cfg.sim, cfg.snapshot_times);
      write_snapshots_csv(out_path("snapshots.csv"), rr.snapshots);
      manifest.outputs = {"snapshots.csv"};
      break;
    }
    case Mode::kStability: {
      manifest.seed = cfg.sim.seed;
      StabilityConfig sc = cfg.stability;
      sc.base.threads = cfg.threads;
      StabilityReport report = stability_experiment(sc);
      write_stability_csv(out_path("stability.csv"), report);
      manifest.outputs = {"stability.csv"};
      break;
    }
    case Mode::kMetrics: {
      const DiscreteMeasure mu = read_measure_csv(cfg.metrics.mu_file);
      const DiscreteMeasure nu = read_measure_csv(cfg.metrics.nu_file);
      std::vector<DistanceRow> rows;
      for (double t : cfg.metrics.times) {
        const OtResult ot = w1_shifted(mu, nu, t);
        const DualCertificate cert = dual_check(mu, nu, ot.coupling, make_cost(t));
        rows.push_back({t, ot.value, cert.primal, cert.dual, cert.gap});
      }
      write_distance_csv(out_path("distances.csv"), rows);
      manifest.outputs = {"distances.csv"};
      break;
    }
    case Mode::kAudit: {
      manifest.seed = cfg.audit.seed;
      std::vector<AuditReport> reports;
      for (AuditFamily f : cfg.audit.families)
        reports.push_back(audit_inequality(f, cfg.audit.samples, cfg.sim.kernel,
                                           cfg.audit.seed, cfg.audit.delta,
                                           cfg.threads));
      write_audit_csv(out_path("audit.csv"), reports);
      manifest.outputs = {"audit.csv"};
      break;
    }
  }

  manifest.outputs.push_back("manifest.json");
  manifest.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg.output_dir, manifest);
  return manifest;
}

}  // namespace enskog
