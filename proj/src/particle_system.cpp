#include "enskog/particle_system.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "enskog/collision_geometry.hpp"
#include "enskog/error.hpp"

namespace enskog {

namespace {

// Pair keys enumerate labels a < b in row-major upper-triangle order:
// key = a n - a(a+1)/2 + (b - a - 1).
void decode_pair(std::uint64_t key, std::uint64_t n, std::uint32_t* a,
                 std::uint32_t* b) {
  // Invert key = a n - a(a+1)/2 + (b-a-1) via the quadratic formula, then
  // fix up the float estimate.
  const double nn = static_cast<double>(n);
  double est = std::floor(
      (2.0 * nn - 1.0 - std::sqrt((2.0 * nn - 1.0) * (2.0 * nn - 1.0) -
                                  8.0 * static_cast<double>(key))) /
      2.0);
  std::uint64_t row = est <= 0.0 ? 0 : static_cast<std::uint64_t>(est);
  if (row >= n - 1) row = n - 2;
  auto row_start = [n](std::uint64_t r) { return r * n - r * (r + 1) / 2; };
  while (row > 0 && row_start(row) > key) --row;
  while (row + 2 < n && row_start(row + 1) <= key) ++row;
  *a = static_cast<std::uint32_t>(row);
  *b = static_cast<std::uint32_t>(row + 1 + (key - row_start(row)));
}

// Exact Binomial(count, p) by CDF inversion. Counts with large mean are
// split into independent chunks so the running pmf never underflows.
std::uint64_t binomial_chunk(std::uint64_t count, double p, Stream& rng) {
  if (count == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return count;
  const double u = rng.uniform();
  double pmf = std::exp(static_cast<double>(count) * std::log1p(-p));
  double cdf = pmf;
  const double odds = p / (1.0 - p);
  std::uint64_t k = 0;
  while (u >= cdf && k < count) {
    ++k;
    pmf *= static_cast<double>(count - k + 1) / static_cast<double>(k) * odds;
    cdf += pmf;
  }
  return k;
}

std::uint64_t binomial_draw(std::uint64_t count, double p, Stream& rng) {
  const double mean = static_cast<double>(count) * p;
  if (mean <= 300.0) return binomial_chunk(count, p, rng);
  const std::uint64_t chunks = static_cast<std::uint64_t>(mean / 300.0) + 1;
  const std::uint64_t base = count / chunks;
  const std::uint64_t rem = count % chunks;
  std::uint64_t total = 0;
  for (std::uint64_t c = 0; c < chunks; ++c)
    total += binomial_chunk(base + (c < rem ? 1 : 0), p, rng);
  return total;
}

struct Candidate {
  std::uint64_t key;
  std::uint32_t slot_i, slot_j;    // array slots, label_i < label_j
  std::uint32_t label_i, label_j;
  bool accepted = false;
  bool cap_hit = false;
  bool violation = false;
  double rate = 0.0;
  double theta = 0.0;
  Vec xi;
};

void evaluate_candidate(Candidate& c, const Ensemble& e,
                        const KernelSpec& kernel, double mass_surf,
                        double dt_rate_cap_over_n, double rate_cap,
                        std::uint64_t seed, std::uint64_t step) {
  const Particle& pi = e.particles[c.slot_i];
  const Particle& pj = e.particles[c.slot_j];
  const double b = beta_rate(kernel.spatial, pi.r - pj.r);
  if (b == 0.0) return;
  bool capped = false;
  const double s = kernel.sigma_capped((pi.v - pj.v).norm(), &capped);
  c.cap_hit = capped;
  c.rate = s * b * mass_surf;
  if (c.rate > rate_cap * (1.0 + 1e-12)) {
    c.violation = true;
    return;
  }
  (void)dt_rate_cap_over_n;
  Stream pair_rng = Stream::keyed(seed, StreamTag::kPair, step, c.key);
  const double u = pair_rng.uniform();
  if (u * rate_cap >= c.rate) return;
  c.accepted = true;
  c.theta = kernel.angular.sample_theta(pair_rng);
  c.xi = sample_xi(e.dim, pair_rng);
}

}  // namespace

void EventLog::merge(const EventLog& other) {
  candidates += other.candidates;
  accepted += other.accepted;
  cap_hits += other.cap_hits;
  events.insert(events.end(), other.events.begin(), other.events.end());
}

void SimConfig::validate() const {
  if (dim < 3 || dim > kMaxDim)
    fail(ErrorKind::kConfig, "sim: dimension must lie in [3, 8]");
  if (n_particles < 1) fail(ErrorKind::kConfig, "sim: need at least one particle");
  if (!(dt > 0.0)) fail(ErrorKind::kConfig, "sim: dt must be > 0");
  if (t_end < 0.0) fail(ErrorKind::kConfig, "sim: t_end must be >= 0");
  if (threads < 1) fail(ErrorKind::kConfig, "sim: threads must be >= 1");
  kernel.validate();
  if (kernel.dim != dim) fail(ErrorKind::kConfig, "sim: kernel dimension mismatch");
}

Ensemble init_ensemble(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.dim;
  const InitSpec& init = cfg.init;
  auto dimensioned = [d](const Vec& v) { return v.size() == d ? v : Vec::zero(d); };
  const Vec rm = dimensioned(init.r_mean);
  const Vec vm = dimensioned(init.v_mean);
  const Vec rm2 = dimensioned(init.r_mean2);
  const Vec vm2 = dimensioned(init.v_mean2);

  Ensemble e;
  e.dim = d;
  e.time = 0.0;
  e.particles.resize(cfg.n_particles);
  e.labels.resize(cfg.n_particles);
  for (std::size_t i = 0; i < cfg.n_particles; ++i) {
    e.labels[i] = static_cast<std::uint32_t>(i);
    Stream rng = Stream::keyed(cfg.seed, StreamTag::kInit, i);
    Particle& p = e.particles[i];
    switch (init.kind) {
      case InitKind::kPoint:
        p.r = rm;
        p.v = vm;
        break;
      case InitKind::kGaussian:
        p.r = rm + rng.gaussian_vec(d) * init.r_sigma;
        p.v = vm + rng.gaussian_vec(d) * init.v_sigma;
        break;
      case InitKind::kUniformBall:
        p.r = rm + rng.unit_ball(d) * init.ball_radius;
        p.v = vm + rng.gaussian_vec(d) * init.v_sigma;
        break;
      case InitKind::kTwoCluster: {
        const bool second = rng.uniform() < 0.5;
        p.r = (second ? rm2 : rm) + rng.gaussian_vec(d) * init.r_sigma;
        p.v = (second ? vm2 : vm) + rng.gaussian_vec(d) * init.v_sigma;
        break;
      }
    }
  }
  return e;
}

void free_transport(Ensemble& e, double dt) {
  if (dt < 0.0) fail(ErrorKind::kInvalidArgument, "free_transport: dt must be >= 0");
  for (Particle& p : e.particles) p.r += p.v * dt;
  e.time += dt;
}

namespace {

// Supremum of sigma over speeds reachable this step: relative speeds are
// bounded by twice the maximal particle speed.
double sigma_sup_now(const KernelSpec& kernel, const Ensemble& e) {
  const CrossSection& cs = kernel.cross_section;
  if (cs.gamma <= 0.0) {
    if (cs.form == SigmaForm::kPower) return sigma(cs, kernel.z_min);
    return 1.0;
  }
  double vmax2 = 0.0;
  for (const Particle& p : e.particles) vmax2 = std::max(vmax2, p.v.norm2());
  return sigma(cs, 2.0 * std::sqrt(vmax2) * (1.0 + 1e-12));
}

}  // namespace

EventLog collision_step(Ensemble& e, double dt, const KernelSpec& kernel,
                        double rate_cap, std::uint64_t seed, std::uint64_t step,
                        int threads, bool record_events) {
  EventLog log;
  const std::uint64_t n = e.size();
  if (n < 2 || rate_cap <= 0.0) return log;

  // Verify the majorant against the current state before thinning; a cap
  // below the achievable pair rate would otherwise just under-sample.
  {
    const double bound =
        sigma_sup_now(kernel, e) * kernel.angular.mass() * kernel.surface();
    if (bound > rate_cap * (1.0 + 1e-9))
      fail(ErrorKind::kMajorantViolation,
           "achievable pair rate " + std::to_string(bound) + " exceeds rate_cap " +
               std::to_string(rate_cap) + " at step " + std::to_string(step));
  }

  const std::uint64_t n_pairs = n * (n - 1) / 2;
  const double p_cap = dt * rate_cap / static_cast<double>(n);
  if (p_cap > 1.0)
    fail(ErrorKind::kConfig,
         "collision_step: dt rate_cap / N exceeds 1; decrease dt");
  const double mass_surf = kernel.angular.mass() * kernel.surface();

  // Candidate set: Binomial count plus a uniform subset of pair keys is the
  // exact joint law of independent per-pair Bernoulli(p_cap) thinning.
  Stream sel = Stream::keyed(seed, StreamTag::kCandidateSelect, step);
  const std::uint64_t m = binomial_draw(n_pairs, p_cap, sel);
  std::vector<std::uint64_t> keys;
  keys.reserve(m);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(2 * m);
  while (keys.size() < m) {
    const std::uint64_t k = sel.below(n_pairs);
    if (seen.insert(k).second) keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());

  // Labels are a permutation of 0..n-1; map them back to array slots so the
  // selected physical pairs do not depend on storage order.
  std::vector<std::uint32_t> slot_of_label(n);
  for (std::uint32_t s = 0; s < n; ++s) slot_of_label[e.labels[s]] = s;

  std::vector<Candidate> cands(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    cands[i].key = keys[i];
    decode_pair(keys[i], n, &cands[i].label_i, &cands[i].label_j);
    cands[i].slot_i = slot_of_label[cands[i].label_i];
    cands[i].slot_j = slot_of_label[cands[i].label_j];
  }

  // Evaluation uses the frozen pre-step state and per-pair streams, so the
  // loop order is irrelevant; the parallel path is bit-identical to serial.
  const double dt_cap_n = p_cap;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(cands.size()); ++i)
    evaluate_candidate(cands[i], e, kernel, mass_surf, dt_cap_n, rate_cap, seed,
                       step);

  log.candidates = cands.size();
  for (const Candidate& c : cands) {
    if (c.violation)
      fail(ErrorKind::kMajorantViolation,
           "pair (" + std::to_string(c.label_i) + ", " +
               std::to_string(c.label_j) + ") rate " + std::to_string(c.rate) +
               " exceeds rate_cap " + std::to_string(rate_cap));
    if (c.cap_hit) ++log.cap_hits;
    if (!c.accepted) continue;
    ++log.accepted;
    Particle& pi = e.particles[c.slot_i];
    Particle& pj = e.particles[c.slot_j];
    const Vec a = alpha(pi.v, pj.v, AngleParam{c.theta, c.xi});
    pi.v += a;
    pj.v -= a;
    if (record_events)
      log.events.push_back({step, c.label_i, c.label_j, c.theta});
  }
  return log;
}

double auto_rate_cap(const SimConfig& cfg, const Ensemble& initial) {
  const CrossSection& cs = cfg.kernel.cross_section;
  double sigma_sup;
  if (cs.form == SigmaForm::kPower) {
    if (cs.gamma < 0.0) {
      sigma_sup = sigma(cs, cfg.kernel.z_min);
    } else if (cs.gamma == 0.0) {
      sigma_sup = 1.0;
    } else {
      double sum_v2 = 0.0;
      for (const Particle& p : initial.particles) sum_v2 += p.v.norm2();
      const double vrel_max = 2.0 * std::sqrt(sum_v2) * (1.0 + 1e-9);
      sigma_sup = sigma(cs, vrel_max);
    }
  } else {
    if (cs.gamma <= 0.0) {
      sigma_sup = 1.0;
    } else {
      double sum_v2 = 0.0;
      for (const Particle& p : initial.particles) sum_v2 += p.v.norm2();
      const double vrel_max = 2.0 * std::sqrt(sum_v2) * (1.0 + 1e-9);
      sigma_sup = sigma(cs, vrel_max);
    }
  }
  return sigma_sup * cfg.kernel.angular.mass() * cfg.kernel.surface();
}

RunResult run(const SimConfig& cfg, const std::vector<double>& snapshot_times,
              const StepObserver& observer) {
  cfg.validate();
  const std::uint64_t n_steps =
      static_cast<std::uint64_t>(std::llround(cfg.t_end / cfg.dt));
  if (std::abs(static_cast<double>(n_steps) * cfg.dt - cfg.t_end) >
      1e-9 * std::max(1.0, cfg.t_end))
    fail(ErrorKind::kConfig, "run: t_end must be a multiple of dt");

  std::vector<std::uint64_t> snap_steps(snapshot_times.size());
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    const double t = snapshot_times[i];
    if (i > 0 && t < snapshot_times[i - 1])
      fail(ErrorKind::kInvalidArgument, "run: snapshot times must be sorted");
    if (t < 0.0 || t > cfg.t_end + 1e-12)
      fail(ErrorKind::kInvalidArgument, "run: snapshot times must lie in [0, t_end]");
    const auto s = static_cast<std::uint64_t>(std::llround(t / cfg.dt));
    if (std::abs(static_cast<double>(s) * cfg.dt - t) > 1e-9 * std::max(1.0, t))
      fail(ErrorKind::kInvalidArgument,
           "run: snapshot times must fall on the step grid");
    snap_steps[i] = s;
  }

  RunResult out;
  Ensemble e = init_ensemble(cfg);
  const double cap = cfg.rate_cap < 0.0 ? auto_rate_cap(cfg, e) : cfg.rate_cap;
  out.rate_cap_used = cap;

  std::size_t next_snap = 0;
  auto maybe_snapshot = [&](std::uint64_t completed_steps) {
    while (next_snap < snap_steps.size() && snap_steps[next_snap] == completed_steps) {
      out.snapshots.push_back(e);
      ++next_snap;
    }
  };

  maybe_snapshot(0);
  for (std::uint64_t step = 0; step < n_steps; ++step) {
    if (observer) observer(e, step);
    free_transport(e, cfg.dt);
    EventLog l = collision_step(e, cfg.dt, cfg.kernel, cap, cfg.seed, step,
                                cfg.threads, cfg.record_events);
    out.log.merge(l);
    maybe_snapshot(step + 1);
  }
  return out;
}

ConservedQuantities conserved_quantities(const Ensemble& e) {
  ConservedQuantities c;
  c.mass = 1.0;
  c.momentum = Vec::zero(e.dim);
  c.energy = 0.0;
  for (const Particle& p : e.particles) {
    c.momentum += p.v;
    c.energy += p.v.norm2();
  }
  const double inv = 1.0 / static_cast<double>(e.size());
  c.momentum *= inv;
  c.energy *= inv;
  return c;
}

}  // namespace enskog
