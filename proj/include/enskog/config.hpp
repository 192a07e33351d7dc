#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enskog/analysis.hpp"
#include "enskog/particle_system.hpp"

namespace enskog {

inline constexpr const char* kVersion = "enskog-lab 0.1.0";

enum class Mode { kSimulate, kStability, kMetrics, kAudit };

const char* to_string(Mode m);

struct MetricsConfig {
  std::string mu_file, nu_file;
  std::vector<double> times;
};

struct AuditConfig {
  std::vector<AuditFamily> families;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  double delta = 0.5;
};

struct ExperimentConfig {
  Mode mode = Mode::kSimulate;
  std::size_t dimension = 3;
  int threads = 1;
  std::string output_dir = "out";
  std::string config_hash;  // FNV-1a of the canonical document

  SimConfig sim;                 // simulate / stability
  std::vector<double> snapshot_times;
  StabilityConfig stability;     // stability
  MetricsConfig metrics;         // metrics
  AuditConfig audit;             // audit
};

// Strict JSON parsing: defaults filled (angular.cutoff_eps = 1e-2,
// stability delta = 0.5, lambda cap = 1e6), unknown keys rejected with
// their dotted path, mode-required blocks enforced. Throws io-error for a
// missing file and config-error for validation failures.
ExperimentConfig parse_config(const std::string& path);

// Same, from an in-memory JSON document (used by tests).
ExperimentConfig parse_config_text(const std::string& text);

struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
  double wall_time_sec = 0.0;
  std::vector<std::string> outputs;
};

// Dispatches to the pipeline for cfg.mode, writes every artifact plus
// manifest.json under the output directory, and returns the manifest.
RunManifest run_scenario(const ExperimentConfig& cfg);

// FNV-1a over the canonical re-serialized config document.
std::string config_hash_of(const std::string& canonical_text);

}  // namespace enskog
