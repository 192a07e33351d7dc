#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "enskog/error.hpp"
#include "enskog/particle_system.hpp"

using namespace enskog;

namespace {

SimConfig maxwellian_config(std::size_t n, double dt, double t_end,
                            std::uint64_t seed) {
  SimConfig cfg;
  cfg.dim = 3;
  cfg.n_particles = n;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.seed = seed;
  cfg.kernel.dim = 3;
  cfg.kernel.cross_section = {SigmaForm::kPower, 0.0, 1.0};
  cfg.kernel.angular = {AngularKind::kLongRange, 0.5, 1e-2, {}, {}};
  cfg.kernel.spatial = {1.0, BetaProfile::kBump};
  cfg.init.kind = InitKind::kGaussian;
  return cfg;
}

bool same_ensemble(const Ensemble& a, const Ensemble& b) {
  if (a.size() != b.size() || a.time != b.time) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a.particles[i].r == b.particles[i].r) ||
        !(a.particles[i].v == b.particles[i].v))
      return false;
  return true;
}

}  // namespace

TEST_CASE("init: point mass, moments, determinism, labels") {
  SimConfig cfg = maxwellian_config(1, 1e-3, 0.0, 7);
  cfg.init.kind = InitKind::kPoint;
  cfg.init.r_mean = Vec{1.0, 2.0, 3.0};
  cfg.init.v_mean = Vec{-1.0, 0.0, 0.5};
  const Ensemble e = init_ensemble(cfg);
  CHECK(e.size() == 1);
  CHECK((e.particles[0].r - cfg.init.r_mean).norm() == 0.0);
  CHECK((e.particles[0].v - cfg.init.v_mean).norm() == 0.0);

  SimConfig big = maxwellian_config(20000, 1e-3, 0.0, 8);
  big.init.r_mean = Vec{0.5, 0.0, 0.0};
  big.init.v_mean = Vec{0.0, -0.25, 0.0};
  const Ensemble ens = init_ensemble(big);
  Vec rbar = Vec::zero(3), vbar = Vec::zero(3);
  for (const Particle& p : ens.particles) {
    rbar += p.r;
    vbar += p.v;
  }
  rbar *= 1.0 / ens.size();
  vbar *= 1.0 / ens.size();
  const double se = 3.0 / std::sqrt(static_cast<double>(ens.size()));
  CHECK((rbar - big.init.r_mean).norm() < 3.0 * se);
  CHECK((vbar - big.init.v_mean).norm() < 3.0 * se);

  const Ensemble again = init_ensemble(big);
  CHECK(same_ensemble(ens, again));
  for (std::size_t i = 0; i < ens.size(); ++i) CHECK(ens.labels[i] == i);
}

TEST_CASE("free transport moves positions only") {
  SimConfig cfg = maxwellian_config(1, 1e-3, 0.0, 1);
  cfg.init.kind = InitKind::kPoint;
  cfg.init.v_mean = Vec{1.0, 0.0, 0.0};
  Ensemble e = init_ensemble(cfg);
  const ConservedQuantities before = conserved_quantities(e);
  free_transport(e, 2.0);
  CHECK((e.particles[0].r - Vec{2.0, 0.0, 0.0}).norm() == 0.0);
  const ConservedQuantities after = conserved_quantities(e);
  CHECK((after.momentum - before.momentum).norm() == 0.0);
  CHECK(after.energy == before.energy);
  CHECK(e.time == 2.0);

  // Group property.
  Ensemble e1 = init_ensemble(maxwellian_config(50, 1e-3, 0.0, 2));
  Ensemble e2 = e1;
  free_transport(e1, 0.25);
  free_transport(e1, 0.5);
  free_transport(e2, 0.75);
  for (std::size_t i = 0; i < e1.size(); ++i)
    CHECK((e1.particles[i].r - e2.particles[i].r).norm() <=
          1e-14 * (1.0 + e2.particles[i].r.norm()));
}

TEST_CASE("conserved quantities of a single particle") {
  SimConfig cfg = maxwellian_config(1, 1e-3, 0.0, 3);
  cfg.init.kind = InitKind::kPoint;
  cfg.init.v_mean = Vec{1.0, 2.0, 3.0};
  const Ensemble e = init_ensemble(cfg);
  const ConservedQuantities c = conserved_quantities(e);
  CHECK(c.mass == 1.0);
  CHECK((c.momentum - Vec{1.0, 2.0, 3.0}).norm() == 0.0);
  CHECK(c.energy == 14.0);
}

TEST_CASE("collision step: no pairs, no support, Poisson rate") {
  // N = 1: nothing happens.
  SimConfig single = maxwellian_config(1, 1e-3, 0.0, 4);
  Ensemble e1 = init_ensemble(single);
  const EventLog log1 = collision_step(e1, 1e-3, single.kernel, 10.0, 4, 0);
  CHECK(log1.accepted == 0);
  CHECK(log1.events.empty());

  // All pairwise distances beyond rho: beta = 0 and nothing is accepted.
  SimConfig sep = maxwellian_config(20, 1e-3, 0.0, 5);
  Ensemble es = init_ensemble(sep);
  for (std::size_t i = 0; i < es.size(); ++i)
    es.particles[i].r = Vec{10.0 * static_cast<double>(i), 0.0, 0.0};
  Ensemble before = es;
  std::uint64_t accepted = 0;
  for (int step = 0; step < 200; ++step)
    accepted += collision_step(es, 1e-3, sep.kernel, auto_rate_cap(sep, es), 5,
                               static_cast<std::uint64_t>(step))
                    .accepted;
  CHECK(accepted == 0);
  for (std::size_t i = 0; i < es.size(); ++i)
    CHECK((es.particles[i].v - before.particles[i].v).norm() == 0.0);

  // Two particles inside a beta = 1 region with sigma = 1: the accepted
  // count over many steps follows the analytic per-step probability
  // dt * mass(Q) * |S^{d-2}| / N.
  SimConfig two = maxwellian_config(2, 1e-3, 0.0, 6);
  two.kernel.spatial.profile = BetaProfile::kUniform;
  const double mass_surf = two.kernel.angular.mass() * two.kernel.surface();
  const double p_step = 1e-3 * mass_surf / 2.0;
  const int steps = 40000;
  std::uint64_t hits = 0;
  Ensemble et = init_ensemble(two);
  for (int step = 0; step < steps; ++step) {
    // Reset velocities so the pair rate stays exactly sigma = 1.
    hits += collision_step(et, 1e-3, two.kernel, mass_surf, 6,
                           static_cast<std::uint64_t>(step))
                .accepted;
  }
  const double expect = steps * p_step;
  const double sd = std::sqrt(expect * (1.0 - p_step));
  CHECK(std::abs(static_cast<double>(hits) - expect) <= 3.0 * sd);
}

TEST_CASE("majorant violation aborts with the offending pair") {
  SimConfig cfg = maxwellian_config(50, 1e-3, 0.0, 9);
  cfg.kernel.spatial.profile = BetaProfile::kUniform;
  Ensemble e = init_ensemble(cfg);
  // A cap far below the true pair rate must eventually trip.
  bool tripped = false;
  try {
    for (int step = 0; step < 2000 && !tripped; ++step)
      collision_step(e, 1e-3, cfg.kernel, 1e-6, 9, static_cast<std::uint64_t>(step));
  } catch (const Error& err) {
    tripped = true;
    CHECK(err.kind() == ErrorKind::kMajorantViolation);
  }
  CHECK(tripped);
}

TEST_CASE("run: zero horizon, collisions off, determinism") {
  SimConfig cfg = maxwellian_config(100, 1e-3, 0.0, 10);
  const RunResult r0 = run(cfg, {0.0});
  CHECK(r0.snapshots.size() == 1);
  CHECK(r0.snapshots[0].time == 0.0);

  // rate_cap = 0 disables collisions: exact ballistic positions.
  SimConfig ball = maxwellian_config(100, 1e-3, 0.5, 11);
  ball.rate_cap = 0.0;
  const Ensemble start = init_ensemble(ball);
  const RunResult rb = run(ball, {0.5});
  for (std::size_t i = 0; i < start.size(); ++i) {
    const Vec expect = start.particles[i].r + start.particles[i].v * 0.5;
    CHECK((rb.snapshots[0].particles[i].r - expect).norm() <=
          1e-12 * (1.0 + expect.norm()));
    CHECK((rb.snapshots[0].particles[i].v - start.particles[i].v).norm() == 0.0);
  }

  // Same seed, same trajectory, bit for bit.
  SimConfig cfg2 = maxwellian_config(300, 2e-3, 0.3, 12);
  const RunResult a = run(cfg2, {0.1, 0.3});
  const RunResult b = run(cfg2, {0.1, 0.3});
  CHECK(a.snapshots.size() == 2);
  CHECK(same_ensemble(a.snapshots[0], b.snapshots[0]));
  CHECK(same_ensemble(a.snapshots[1], b.snapshots[1]));
  CHECK(a.log.accepted == b.log.accepted);
  CHECK(a.log.accepted > 0);

  // Snapshot validation.
  CHECK_THROWS_AS(run(cfg2, {0.3, 0.1}), Error);
  CHECK_THROWS_AS(run(cfg2, {0.4}), Error);
  CHECK_THROWS_AS(run(cfg2, {0.0501}), Error);
}

TEST_CASE("thread count does not change the trajectory") {
  SimConfig cfg = maxwellian_config(400, 2e-3, 0.2, 13);
  cfg.threads = 1;
  const RunResult serial = run(cfg, {0.2});
  cfg.threads = 4;
  const RunResult parallel = run(cfg, {0.2});
  CHECK(same_ensemble(serial.snapshots[0], parallel.snapshots[0]));
}

TEST_CASE("exchangeability: permuting particles and labels") {
  SimConfig cfg = maxwellian_config(150, 2e-3, 0.2, 14);
  cfg.kernel.spatial.profile = BetaProfile::kUniform;
  const RunResult base = run(cfg, {0.2});

  // Re-run with the initial ensemble stored in reversed order but labels
  // carried along; the dynamics must produce the same point cloud.
  Ensemble e = init_ensemble(cfg);
  std::reverse(e.particles.begin(), e.particles.end());
  std::reverse(e.labels.begin(), e.labels.end());
  const std::uint64_t steps = 100;
  const double cap = run(cfg, {}).rate_cap_used;
  for (std::uint64_t s = 0; s < steps; ++s) {
    free_transport(e, cfg.dt);
    collision_step(e, cfg.dt, cfg.kernel, cap, cfg.seed, s);
  }
  const Ensemble& ref = base.snapshots[0];
  for (std::size_t i = 0; i < e.size(); ++i) {
    const std::size_t j = e.size() - 1 - i;  // reversed slot of label i
    CHECK((e.particles[j].r - ref.particles[i].r).norm() == 0.0);
    CHECK((e.particles[j].v - ref.particles[i].v).norm() == 0.0);
  }
}

TEST_CASE("momentum and energy over a thousand steps") {
  SimConfig cfg = maxwellian_config(200, 1e-3, 1.0, 15);
  cfg.kernel.spatial.profile = BetaProfile::kUniform;
  Ensemble e = init_ensemble(cfg);
  const ConservedQuantities c0 = conserved_quantities(e);
  const double cap = auto_rate_cap(cfg, e);
  std::uint64_t accepted = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    free_transport(e, cfg.dt);
    accepted += collision_step(e, cfg.dt, cfg.kernel, cap, cfg.seed, s).accepted;
  }
  CHECK(accepted > 100);
  const ConservedQuantities c1 = conserved_quantities(e);
  const double vscale = std::sqrt(c0.energy);
  CHECK((c1.momentum - c0.momentum).norm() <= 1e-13 * vscale);
  CHECK(std::abs(c1.energy - c0.energy) <= 1e-10 * c0.energy);
}

TEST_CASE("maxwellian relaxation of a signed velocity average") {
  // Two velocity clusters at +/- w e1 with beta == 1 and gamma = 0: each
  // particle's mean velocity relaxes toward the global mean at rate
  // c = |S^{d-2}| int sin^2(theta/2) Q(dtheta).
  SimConfig cfg = maxwellian_config(4000, 2e-3, 1.0, 16);
  cfg.kernel.spatial.profile = BetaProfile::kUniform;
  cfg.init.kind = InitKind::kTwoCluster;
  cfg.init.v_mean = Vec{1.0, 0.0, 0.0};
  cfg.init.v_mean2 = Vec{-1.0, 0.0, 0.0};
  cfg.init.v_sigma = 0.2;
  cfg.init.r_sigma = 1.0;

  const Ensemble start = init_ensemble(cfg);
  std::vector<double> sign(start.size());
  double a0 = 0.0;
  for (std::size_t i = 0; i < start.size(); ++i) {
    sign[i] = start.particles[i].v[0] >= 0.0 ? 1.0 : -1.0;
    a0 += sign[i] * start.particles[i].v[0];
  }
  a0 /= static_cast<double>(start.size());

  const RunResult rr = run(cfg, {1.0});
  double a1 = 0.0;
  for (std::size_t i = 0; i < start.size(); ++i)
    a1 += sign[i] * rr.snapshots[0].particles[i].v[0];
  a1 /= static_cast<double>(start.size());

  const double c = cfg.kernel.angular.sin2_half_moment() * cfg.kernel.surface();
  const double expect = a0 * std::exp(-c);
  CHECK(a1 == doctest::Approx(expect).epsilon(0.08));
}

TEST_CASE("soft potential cap events are counted") {
  SimConfig cfg = maxwellian_config(400, 1e-3, 0.0, 17);
  cfg.kernel.cross_section = {SigmaForm::kPower, -1.5, 1.0};
  cfg.kernel.z_min = 0.5;  // large floor so cap hits are common
  cfg.kernel.spatial.profile = BetaProfile::kUniform;
  cfg.init.v_sigma = 0.3;
  Ensemble e = init_ensemble(cfg);
  const double cap = auto_rate_cap(cfg, e);
  EventLog total;
  for (std::uint64_t s = 0; s < 200; ++s) {
    free_transport(e, cfg.dt);
    total.merge(collision_step(e, cfg.dt, cfg.kernel, cap, cfg.seed, s));
  }
  CHECK(total.candidates > 0);
  CHECK(total.cap_hits > 0);
}
