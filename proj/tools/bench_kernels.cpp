// Compares the serial and OpenMP paths of the data-parallel kernels:
// collision candidate evaluation, the sampled pair-sum estimator and the
// audit sampler. Both paths are bit-identical by construction; this target
// reports the speedup actually realized on the host.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "enskog/analysis.hpp"
#include "enskog/particle_system.hpp"

using namespace enskog;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimConfig bench_config(int threads) {
  SimConfig cfg;
  cfg.dim = 3;
  cfg.n_particles = 4000;
  cfg.dt = 1e-3;
  cfg.t_end = 0.05;
  cfg.seed = 12345;
  cfg.threads = threads;
  cfg.kernel.dim = 3;
  cfg.kernel.cross_section = {SigmaForm::kPower, 0.0, 1.0};
  cfg.kernel.angular = {AngularKind::kLongRange, 0.5, 1e-2, {}, {}};
  cfg.kernel.spatial = {1.0, BetaProfile::kBump};
  cfg.init.kind = InitKind::kGaussian;
  return cfg;
}

double time_run(int threads, double* checksum) {
  SimConfig cfg = bench_config(threads);
  const auto t0 = std::chrono::steady_clock::now();
  RunResult rr = run(cfg, {cfg.t_end});
  const double dt = seconds_since(t0);
  *checksum = conserved_quantities(rr.snapshots.back()).energy;
  return dt;
}

double time_pairing(int threads, double* checksum) {
  SimConfig cfg = bench_config(threads);
  Ensemble e = init_ensemble(cfg);
  ResidualOptions opt;
  opt.pair_samples = 200000;
  opt.angle_samples = 8;
  opt.threads = threads;
  const TestFunction psi =
      TestFunction::gaussian_bump(Vec::zero(3), Vec::zero(3), 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  double acc = 0.0;
  for (int rep = 0; rep < 5; ++rep)
    acc += collision_pairing(psi, e, cfg.kernel, 0.0, opt, rep);
  *checksum = acc;
  return seconds_since(t0);
}

double time_audit(int threads, double* checksum) {
  SimConfig cfg = bench_config(threads);
  const auto t0 = std::chrono::steady_clock::now();
  const AuditReport r =
      audit_inequality(AuditFamily::kEq13, 300000, cfg.kernel, 7, 0.5, threads);
  *checksum = r.max_ratio;
  return seconds_since(t0);
}

void report(const char* name, double (*fn)(int, double*), int max_threads) {
  double ref_sum = 0.0, par_sum = 0.0;
  const double t_serial = fn(1, &ref_sum);
  const double t_parallel = fn(max_threads, &par_sum);
  std::printf("%-18s serial %8.3f s   %2d threads %8.3f s   speedup %5.2fx   %s\n",
              name, t_serial, max_threads, t_parallel, t_serial / t_parallel,
              ref_sum == par_sum ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif
  std::printf("hardware threads available: %d\n", max_threads);
  report("collision step", time_run, max_threads);
  report("pair-sum kernel", time_pairing, max_threads);
  report("audit sampler", time_audit, max_threads);
  return 0;
}
