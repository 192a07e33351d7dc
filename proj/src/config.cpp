#include "enskog/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "enskog/error.hpp"

namespace enskog {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok)
      fail(ErrorKind::kConfig,
           "unknown key: " + (prefix.empty() ? it.key() : prefix + "." + it.key()));
  }
}

double num_or(const json& obj, const char* key, double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number()) fail(ErrorKind::kConfig, std::string(key) + " must be a number");
  return obj[key].get<double>();
}

std::uint64_t uint_or(const json& obj, const char* key, std::uint64_t dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number_unsigned() && !obj[key].is_number_integer())
    fail(ErrorKind::kConfig, std::string(key) + " must be an integer");
  return obj[key].get<std::uint64_t>();
}

std::string str_or(const json& obj, const char* key, const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_string()) fail(ErrorKind::kConfig, std::string(key) + " must be a string");
  return obj[key].get<std::string>();
}

Vec vec_or(const json& obj, const char* key, std::size_t d, const std::string& prefix) {
  if (!obj.contains(key)) return Vec::zero(d);
  const json& arr = obj[key];
  if (!arr.is_array() || arr.size() != d)
    fail(ErrorKind::kConfig, prefix + "." + key + " must be an array of length d");
  Vec v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = arr[i].get<double>();
  return v;
}

std::vector<double> times_or(const json& obj, const char* key,
                             const std::vector<double>& dflt) {
  if (!obj.contains(key)) return dflt;
  const json& arr = obj[key];
  if (!arr.is_array()) fail(ErrorKind::kConfig, std::string(key) + " must be an array");
  std::vector<double> out;
  for (const json& x : arr) out.push_back(x.get<double>());
  return out;
}

KernelSpec parse_kernel(const json& k, std::size_t dim) {
  KernelSpec spec;
  spec.dim = dim;
  check_keys(k, "kernel", {"sigma", "angular", "beta"});

  if (k.contains("sigma")) {
    const json& s = k["sigma"];
    check_keys(s, "sigma", {"form", "gamma", "c_sigma", "z_min"});
    const std::string form = str_or(s, "form", "power");
    if (form == "power")
      spec.cross_section.form = SigmaForm::kPower;
    else if (form == "tempered")
      spec.cross_section.form = SigmaForm::kTempered;
    else
      fail(ErrorKind::kConfig, "sigma.form must be power or tempered");
    spec.cross_section.gamma = num_or(s, "gamma", 0.0);
    spec.cross_section.c_sigma = num_or(s, "c_sigma", 1.0);
    spec.z_min = num_or(s, "z_min", 1e-3);
  }

  if (k.contains("angular")) {
    const json& a = k["angular"];
    check_keys(a, "angular", {"kind", "nu", "cutoff_eps", "table_theta", "table_b"});
    const std::string kind = str_or(a, "kind", "longrange");
    if (kind == "longrange")
      spec.angular.kind = AngularKind::kLongRange;
    else if (kind == "hardsphere")
      spec.angular.kind = AngularKind::kHardSphere;
    else if (kind == "table")
      spec.angular.kind = AngularKind::kTable;
    else
      fail(ErrorKind::kConfig, "angular.kind must be longrange, hardsphere or table");
    spec.angular.nu = num_or(a, "nu", 0.5);
    spec.angular.cutoff_eps = num_or(a, "cutoff_eps", 1e-2);
    spec.angular.table_theta = times_or(a, "table_theta", {});
    spec.angular.table_b = times_or(a, "table_b", {});
  }

  if (k.contains("beta")) {
    const json& b = k["beta"];
    check_keys(b, "beta", {"rho", "profile"});
    spec.spatial.rho = num_or(b, "rho", 1.0);
    const std::string prof = str_or(b, "profile", "bump");
    if (prof == "bump")
      spec.spatial.profile = BetaProfile::kBump;
    else if (prof == "uniform")
      spec.spatial.profile = BetaProfile::kUniform;
    else
      fail(ErrorKind::kConfig, "beta.profile must be bump or uniform");
  }
  spec.validate();
  return spec;
}

InitSpec parse_init(const json& obj, std::size_t d) {
  InitSpec init;
  check_keys(obj, "init",
             {"kind", "r_mean", "v_mean", "r_sigma", "v_sigma", "ball_radius",
              "r_mean2", "v_mean2"});
  const std::string kind = str_or(obj, "kind", "gaussian");
  if (kind == "point")
    init.kind = InitKind::kPoint;
  else if (kind == "gaussian")
    init.kind = InitKind::kGaussian;
  else if (kind == "uniform-ball")
    init.kind = InitKind::kUniformBall;
  else if (kind == "two-cluster")
    init.kind = InitKind::kTwoCluster;
  else
    fail(ErrorKind::kConfig, "init.kind must be point, gaussian, uniform-ball or two-cluster");
  init.r_mean = vec_or(obj, "r_mean", d, "init");
  init.v_mean = vec_or(obj, "v_mean", d, "init");
  init.r_mean2 = vec_or(obj, "r_mean2", d, "init");
  init.v_mean2 = vec_or(obj, "v_mean2", d, "init");
  init.r_sigma = num_or(obj, "r_sigma", 1.0);
  init.v_sigma = num_or(obj, "v_sigma", 1.0);
  init.ball_radius = num_or(obj, "ball_radius", 1.0);
  if (init.r_sigma < 0.0 || init.v_sigma < 0.0 || init.ball_radius <= 0.0)
    fail(ErrorKind::kConfig, "init scales must be positive");
  return init;
}

ExperimentConfig parse_document(const json& doc) {
  if (!doc.is_object()) fail(ErrorKind::kConfig, "config root must be a JSON object");
  check_keys(doc, "",
             {"mode", "dimension", "threads", "output", "kernel", "sim", "stability",
              "metrics", "audit"});

  ExperimentConfig cfg;
  const std::string mode = str_or(doc, "mode", "");
  if (mode == "simulate")
    cfg.mode = Mode::kSimulate;
  else if (mode == "stability")
    cfg.mode = Mode::kStability;
  else if (mode == "metrics")
    cfg.mode = Mode::kMetrics;
  else if (mode == "audit")
    cfg.mode = Mode::kAudit;
  else
    fail(ErrorKind::kConfig, "mode must be simulate, stability, metrics or audit");

  const double dim_num = num_or(doc, "dimension", 3.0);
  cfg.dimension = static_cast<std::size_t>(dim_num);
  if (cfg.dimension < 3 || cfg.dimension > kMaxDim)
    fail(ErrorKind::kConfig, "dimension must lie in [3, 8]");
  cfg.threads = static_cast<int>(num_or(doc, "threads", 1.0));
  if (cfg.threads < 1) fail(ErrorKind::kConfig, "threads must be >= 1");
  if (const char* env = std::getenv("ENSKOG_LAB_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) cfg.threads = t;
  }
  cfg.output_dir = str_or(doc, "output", "out");

  KernelSpec kernel = parse_kernel(doc.contains("kernel") ? doc["kernel"] : json::object(),
                                   cfg.dimension);

  const bool needs_sim = cfg.mode == Mode::kSimulate || cfg.mode == Mode::kStability;
  if (needs_sim && !doc.contains("sim"))
    fail(ErrorKind::kConfig, "mode requires a sim block");
  if (doc.contains("sim")) {
    const json& s = doc["sim"];
    check_keys(s, "sim",
               {"n_particles", "dt", "t_end", "seed", "snapshot_times", "rate_cap",
                "init", "record_events"});
    cfg.sim.dim = cfg.dimension;
    cfg.sim.kernel = kernel;
    cfg.sim.n_particles = static_cast<std::size_t>(num_or(s, "n_particles", 100.0));
    cfg.sim.dt = num_or(s, "dt", 1e-3);
    cfg.sim.t_end = num_or(s, "t_end", 1.0);
    cfg.sim.seed = uint_or(s, "seed", 0);
    cfg.sim.rate_cap = s.contains("rate_cap") ? s["rate_cap"].get<double>() : -1.0;
    cfg.sim.threads = cfg.threads;
    cfg.sim.record_events =
        s.contains("record_events") && s["record_events"].get<bool>();
    cfg.sim.init = parse_init(s.contains("init") ? s["init"] : json::object(),
                              cfg.dimension);
    cfg.snapshot_times = times_or(s, "snapshot_times", {0.0, cfg.sim.t_end});
    cfg.sim.validate();
  } else {
    cfg.sim.dim = cfg.dimension;
    cfg.sim.kernel = kernel;
  }

  if (cfg.mode == Mode::kStability) {
    if (!doc.contains("stability"))
      fail(ErrorKind::kConfig, "stability mode requires a stability block");
    const json& st = doc["stability"];
    check_keys(st, "stability",
               {"epsilon", "coupling_mode", "delta", "probes", "cap", "fit_fraction",
                "majorant_k"});
    cfg.stability.base = cfg.sim;
    cfg.stability.times = cfg.snapshot_times;
    cfg.stability.epsilon = num_or(st, "epsilon", 1e-2);
    const std::string cm = str_or(st, "coupling_mode", "common-random-numbers");
    if (cm == "common-random-numbers")
      cfg.stability.mode = CouplingMode::kCommonRandomNumbers;
    else if (cm == "independent")
      cfg.stability.mode = CouplingMode::kIndependent;
    else
      fail(ErrorKind::kConfig,
           "stability.coupling_mode must be common-random-numbers or independent");
    cfg.stability.delta = num_or(st, "delta", 0.5);
    cfg.stability.lambda_cap = num_or(st, "cap", 1e6);
    cfg.stability.lambda_probe_atoms =
        static_cast<std::size_t>(num_or(st, "probes", 32.0));
    cfg.stability.fit_fraction = num_or(st, "fit_fraction", 0.5);
    cfg.stability.majorant_k = num_or(st, "majorant_k", 0.0);
    if (!(cfg.stability.delta > 0.0) || !(cfg.stability.lambda_cap > 0.0))
      fail(ErrorKind::kConfig, "stability.delta and stability.cap must be > 0");
    if (st.contains("probes") && kernel.cross_section.gamma >= 0.0)
      fail(ErrorKind::kConfig,
           "stability.probes requested but kernel gamma >= 0 (no singular moment)");
  }

  if (cfg.mode == Mode::kMetrics) {
    if (!doc.contains("metrics"))
      fail(ErrorKind::kConfig, "metrics mode requires a metrics block");
    const json& mt = doc["metrics"];
    check_keys(mt, "metrics", {"mu_file", "nu_file", "times"});
    cfg.metrics.mu_file = str_or(mt, "mu_file", "");
    cfg.metrics.nu_file = str_or(mt, "nu_file", "");
    cfg.metrics.times = times_or(mt, "times", {});
    if (cfg.metrics.mu_file.empty() || cfg.metrics.nu_file.empty() ||
        cfg.metrics.times.empty())
      fail(ErrorKind::kConfig, "metrics requires mu_file, nu_file and times");
  }

  if (cfg.mode == Mode::kAudit) {
    if (!doc.contains("audit"))
      fail(ErrorKind::kConfig, "audit mode requires an audit block");
    const json& au = doc["audit"];
    check_keys(au, "audit", {"families", "samples", "seed", "delta"});
    if (!au.contains("families") || !au["families"].is_array() ||
        au["families"].empty())
      fail(ErrorKind::kConfig, "audit.families must be a non-empty array");
    for (const json& fam : au["families"]) {
      AuditFamily f;
      if (!audit_family_from_string(fam.get<std::string>(), &f))
        fail(ErrorKind::kConfig, "unknown audit family: " + fam.get<std::string>());
      cfg.audit.families.push_back(f);
    }
    cfg.audit.samples = uint_or(au, "samples", 100000);
    cfg.audit.seed = uint_or(au, "seed", 0);
    cfg.audit.delta = num_or(au, "delta", 0.5);
    if (!(cfg.audit.delta > 0.0)) fail(ErrorKind::kConfig, "audit.delta must be > 0");
  }

  return cfg;
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kSimulate: return "simulate";
    case Mode::kStability: return "stability";
    case Mode::kMetrics: return "metrics";
    case Mode::kAudit: return "audit";
  }
  return "unknown";
}

std::string config_hash_of(const std::string& canonical_text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : canonical_text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kConfig, std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg = parse_document(doc);
  cfg.config_hash = config_hash_of(doc.dump());
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::kIo, "config file not found: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace enskog
