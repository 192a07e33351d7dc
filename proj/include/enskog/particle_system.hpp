#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "enskog/kernels.hpp"
#include "enskog/rng.hpp"
#include "enskog/vec.hpp"

namespace enskog {

// N-particle jump process approximating the Enskog dynamics: free transport
// plus pairwise velocity jumps at rate sigma(|v-u|) beta(r-q) Q(dtheta) dxi,
// with mean-field 1/N normalization so empirical pair averages match the
// mu x mu pairing of the weak formulation.

struct Particle {
  Vec r;
  Vec v;
};

struct Ensemble {
  std::size_t dim = 3;
  double time = 0.0;
  std::vector<Particle> particles;
  // Stable identities used to key per-pair randomness. Permuting particle
  // order together with labels leaves the dynamics (as a point cloud)
  // unchanged.
  std::vector<std::uint32_t> labels;

  std::size_t size() const { return particles.size(); }
};

enum class InitKind { kPoint, kGaussian, kUniformBall, kTwoCluster };

struct InitSpec {
  InitKind kind = InitKind::kGaussian;
  Vec r_mean, v_mean;
  double r_sigma = 1.0;
  double v_sigma = 1.0;
  double ball_radius = 1.0;   // uniform-ball position law
  Vec r_mean2, v_mean2;       // second component of the two-cluster law
};

struct SimConfig {
  std::size_t dim = 3;
  std::size_t n_particles = 1;
  double dt = 1e-3;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  KernelSpec kernel;
  InitSpec init;
  // Majorant pair rate: > 0 uses the given cap, 0 disables collisions,
  // < 0 derives a rigorous cap from the initial ensemble (energy bound).
  double rate_cap = -1.0;
  int threads = 1;
  bool record_events = false;

  void validate() const;
};

struct CollisionEvent {
  std::uint64_t step;
  std::uint32_t label_lo, label_hi;
  double theta;
};

struct EventLog {
  std::uint64_t candidates = 0;  // thinning candidates examined
  std::uint64_t accepted = 0;    // collisions performed
  std::uint64_t cap_hits = 0;    // sigma evaluations clipped at z_min
  std::vector<CollisionEvent> events;  // filled when record_events is set

  void merge(const EventLog& other);
};

struct ConservedQuantities {
  double mass = 1.0;
  Vec momentum;
  double energy = 0.0;
};

Ensemble init_ensemble(const SimConfig& cfg);

// r <- r + dt v for every particle; velocities untouched, time advanced.
void free_transport(Ensemble& e, double dt);

// One thinning step of the pairwise jump dynamics. Every unordered pair
// collides with probability (dt/N) sigma beta mass(Q) |S^{d-2}|, realized as
// a Binomial candidate draw under the majorant rate_cap followed by
// acceptance-rejection with per-(step, pair) keyed randomness. Candidate
// evaluation runs in parallel when threads > 1 and is bit-identical to the
// sequential path. Throws majorant-violation when a pair rate exceeds
// rate_cap.
EventLog collision_step(Ensemble& e, double dt, const KernelSpec& kernel,
                        double rate_cap, std::uint64_t seed, std::uint64_t step,
                        int threads = 1, bool record_events = false);

// Observer invoked with the pre-step state (time = step * dt) for
// step = 0 .. n_steps-1; used for residual quadrature without storing
// trajectories.
using StepObserver = std::function<void(const Ensemble&, std::uint64_t step)>;

struct RunResult {
  std::vector<Ensemble> snapshots;
  EventLog log;
  double rate_cap_used = 0.0;
};

// Lie splitting (transport then collisions) with fixed dt from 0 to t_end.
// snapshot_times must be sorted, within [0, t_end], and fall on the step
// grid. The observer, when given, sees every pre-step state.
RunResult run(const SimConfig& cfg, const std::vector<double>& snapshot_times,
              const StepObserver& observer = {});

// Rigorous majorant for the pair rate derived from conservation of energy:
// relative speeds never exceed 2 sqrt(N * energy).
double auto_rate_cap(const SimConfig& cfg, const Ensemble& initial);

ConservedQuantities conserved_quantities(const Ensemble& e);

}  // namespace enskog
