#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enskog/kernels.hpp"
#include "enskog/particle_system.hpp"
#include "enskog/transport_metrics.hpp"

namespace enskog {

// Theorem-facing diagnostics: generator pairings, weak/mild residuals,
// moment functionals, coupling-inequality integrands, Osgood majorants,
// paired stability experiments and sampled inequality audits.

// ---------------------------------------------------------------------------
// Test functions

enum class TestFnKind {
  kConstant,        // psi == 1
  kCoordinateR,     // psi = r_i (test mode: unbounded)
  kCoordinateV,     // psi = v_i (test mode: unbounded)
  kGaussianBump,    // exp(-|x - c|^2 / (2 w^2)) on phase space
  kTensorPolyBump,  // prod_k max(0, 1 - ((x_k - c_k)/w)^2)^2
};

struct TestFunction {
  TestFnKind kind = TestFnKind::kGaussianBump;
  std::size_t index = 0;  // coordinate index for kCoordinateR / kCoordinateV
  Vec center_r, center_v; // bump center (defaults to the origin)
  double width = 1.0;

  double value(const Vec& r, const Vec& v) const;
  Vec grad_r(const Vec& r, const Vec& v) const;
  Vec grad_v(const Vec& r, const Vec& v) const;

  bool bounded() const {
    return kind != TestFnKind::kCoordinateR && kind != TestFnKind::kCoordinateV;
  }
  // Global Lipschitz bound w.r.t. |dr| + |dv|.
  double lipschitz_bound() const;
  // max over |zeta| <= radius of |grad_v psi(r, zeta)|, analytic per kind.
  double max_grad_v_over_ball(const Vec& r, double radius) const;

  static TestFunction constant();
  static TestFunction coordinate_r(std::size_t i);
  static TestFunction coordinate_v(std::size_t i);
  static TestFunction gaussian_bump(Vec center_r, Vec center_v, double width);
  static TestFunction tensor_poly_bump(Vec center_r, Vec center_v, double width);
};

// ---------------------------------------------------------------------------
// Generator evaluation

struct GeneratorValue {
  double transport = 0.0;  // v . grad_r psi
  double collision = 0.0;  // sigma beta L psi
  double total = 0.0;
};

// (A psi)(r, v; q, u) with the collision average L psi estimated by
// mc_samples Monte Carlo draws over (theta, xi), or analytically for
// v-independent and coordinate-v test functions. Uses the kernel's capped
// sigma and truncated angular measure, i.e. exactly the simulated dynamics.
GeneratorValue apply_generator(const TestFunction& psi, const Vec& r, const Vec& v,
                               const Vec& q, const Vec& u, const KernelSpec& kernel,
                               std::size_t mc_samples, Stream& rng);

// ---------------------------------------------------------------------------
// Weak / mild residuals

struct ResidualOptions {
  // 0 evaluates the full ordered pair sum; otherwise this many sampled
  // ordered pairs per evaluation.
  std::size_t pair_samples = 0;
  std::size_t angle_samples = 16;  // MC draws for L psi per pair
  std::uint64_t seed = 0;          // estimator stream, disjoint from the sim
  int threads = 1;
};

// <psi, mu_t> with the empirical measure of an ensemble; time_shift tau
// evaluates S(tau) psi instead of psi.
double psi_average(const TestFunction& psi, const Ensemble& e, double time_shift = 0.0);

// (1/N) sum_i v_i . grad_r psi(r_i, v_i).
double transport_pairing(const TestFunction& psi, const Ensemble& e);

// <B S(tau) psi, mu (x) mu> over ordered distinct pairs / N^2. step_key keys
// the estimator substream so repeated calls are reproducible.
double collision_pairing(const TestFunction& psi, const Ensemble& e,
                         const KernelSpec& kernel, double time_shift,
                         const ResidualOptions& opt, std::uint64_t step_key);

// Residual series over an equally spaced trajectory (left Riemann sums):
// weak:  R(t_k) = <psi, mu_k> - <psi, mu_0> - sum_{s<k} <A psi, mu_s x mu_s> dt
// mild:  R(t_k) = <psi, mu_k> - <S(t_k) psi, mu_0>
//                 - sum_{s<k} <B S(t_k - t_s) psi, mu_s x mu_s> dt
std::vector<double> weak_form_residual(const std::vector<Ensemble>& trajectory,
                                       const TestFunction& psi, const KernelSpec& kernel,
                                       double dt, const ResidualOptions& opt = {});
std::vector<double> mild_form_residual(const std::vector<Ensemble>& trajectory,
                                       const TestFunction& psi, const KernelSpec& kernel,
                                       double dt, const ResidualOptions& opt = {});

// Streaming accumulator for long runs: feed every pre-step state through
// observe(), then evaluate the residual at t_final without storing the
// trajectory. The mild form composes psi with S(t_final - s) online.
class ResidualAccumulator {
 public:
  enum class Form { kWeak, kMild };

  ResidualAccumulator(Form form, TestFunction psi, KernelSpec kernel,
                      ResidualOptions opt, double t_final);

  void observe(const Ensemble& pre_step, std::uint64_t step, double dt);
  double residual(const Ensemble& final_state) const;
  double integral() const { return integral_; }

 private:
  Form form_;
  TestFunction psi_;
  KernelSpec kernel_;
  ResidualOptions opt_;
  double t_final_;
  double integral_ = 0.0;
  double initial_term_ = 0.0;
  bool saw_initial_ = false;
};

// ---------------------------------------------------------------------------
// Moment functionals

struct MomentResult {
  double value = 0.0;
  bool divergent = false;
  std::size_t worst_atom = 0;  // largest contribution (set when divergent)
};

// sum_i w_i ( exp(delta |v_i|^{1+gamma}) + |r_i|^{1+delta} ).
MomentResult moment_c_gamma(const DiscreteMeasure& m, double gamma, double delta);

struct LambdaResult {
  double value = 0.0;
  std::uint64_t cap_hits = 0;
};

// max over probes u of sum_i w_i min(|v_i - u|^gamma, cap); gamma < 0.
LambdaResult lambda_singular(const DiscreteMeasure& m, double gamma,
                             const std::vector<Vec>& probes, double cap);
// Same functional for the sum measure mu + nu (mass 2).
LambdaResult lambda_singular_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  double gamma, const std::vector<Vec>& probes,
                                  double cap);
// Atom velocities (up to atom_count) plus the origin and axis probes.
std::vector<Vec> default_probes(const DiscreteMeasure& m, std::size_t atom_count);

// ---------------------------------------------------------------------------
// Coupling-inequality integrand

struct PhasePair {
  PhasePoint a;   // (r, v)
  PhasePoint at;  // tilde copy
};

// Psi((r,v),(r~,v~);(q,u),(q~,u~)) =
//   (|v-u| + |v~-u~|) |sigma beta - sigma~ beta~|
//   + (|v-v~| + |u-u~|) min(sigma beta, sigma~ beta~),
// with the raw (uncapped) sigma; throws singular-input at coincident
// velocities for gamma < 0.
double psi_integrand(const PhasePair& pair1, const PhasePair& pair0,
                     const KernelSpec& kernel);

// ---------------------------------------------------------------------------
// Osgood majorant

enum class OsgoodRate { kLinear, kLogLinear };

struct OsgoodSpec {
  double a = 0.0;  // initial value
  OsgoodRate rate = OsgoodRate::kLinear;
  double k = 1.0;  // rate constant
  double horizon = 1.0;
};

// Maximal solution of rho' = g(rho), rho(0) = a, at time t in [0, horizon];
// g(x) = K x or K x (1 + |log x|). Adaptive RK with relative tolerance 1e-10.
double osgood_majorant(const OsgoodSpec& spec, double t);

// ---------------------------------------------------------------------------
// Stability experiment

enum class CouplingMode { kCommonRandomNumbers, kIndependent };

struct StabilityConfig {
  SimConfig base;           // the mu run; the nu run derives from it
  double epsilon = 1e-2;    // initial offset: positions translated by eps e1
  CouplingMode mode = CouplingMode::kCommonRandomNumbers;
  std::vector<double> times;
  double delta = 0.5;       // moment functional parameter
  double lambda_cap = 1e6;
  std::size_t lambda_probe_atoms = 32;
  double fit_fraction = 0.5; // leading fraction of the horizon used for the fit
  double majorant_k = 0.0;   // > 0 pins K instead of fitting
  std::uint64_t nu_seed_offset = 0x9E37; // independent-mode seed shift
};

struct StabilityPoint {
  double t = 0.0;
  double w1_shifted = 0.0;
  double majorant = 0.0;
  double c_gamma_mu = 0.0;
  double c_gamma_nu = 0.0;
  double lambda = 0.0;  // NaN when gamma >= 0
  double second_moment = 0.0;
};

struct StabilityReport {
  std::vector<StabilityPoint> series;
  double fitted_k = 0.0;
  std::string regime;  // "loglinear" or "exponential"
  double initial_distance = 0.0;
  EventLog log_mu, log_nu;
};

// Runs the paired simulations, measures the shifted distance at the given
// times (atom-paired bound in CRN mode, exact OT otherwise), reports
// moments, and fits the regime majorant: log-Lipschitz Osgood for
// gamma > -1, exponential in int (1 + Lambda) ds for gamma <= -1.
StabilityReport stability_experiment(const StabilityConfig& cfg);

// ---------------------------------------------------------------------------
// Inequality audits

enum class AuditFamily {
  kTanaka,     // |Gamma(X,xi) - Gamma(Y,xi0)| <= 3 |X-Y|          (explicit 3)
  kEq13,       // |alpha - alpha~_0| <= 2 theta (|v-v~| + |u-u~|)   (explicit 2)
  kGradBound,  // |psi(r, v+alpha) - psi(r, v)| <= theta |v-u| max|grad| (explicit 1)
  kLemma03a,   // hard-potential sigma difference bound
  kLemma04a,   // soft-potential sigma difference bound
  kLemma04b,   // soft sigma-beta product bound, gamma in (-1, 0]
  kLemma04c,   // soft sigma-beta product bound, gamma <= -1
  kLemma05,    // Psi exponential-moment bound, gamma >= 0
  kLemma06a,   // Psi bound, gamma <= -1
  kLemma06b,   // Psi bound, gamma in (-1, 0)
  kMildBound,  // |B psi| <= C |v-u| sigma ||psi||_Lip
};

const char* to_string(AuditFamily f);
bool audit_family_from_string(const std::string& name, AuditFamily* out);

struct AuditReport {
  AuditFamily family;
  std::uint64_t samples = 0;
  double max_ratio = 0.0;      // sup LHS / RHS over the sample
  std::uint64_t violations = 0;  // explicit-constant families only
  double explicit_constant = 0.0;  // 0 when the constant is only existential
};

AuditReport audit_inequality(AuditFamily family, std::uint64_t samples,
                             const KernelSpec& kernel, std::uint64_t seed,
                             double delta = 0.5, int threads = 1);

}  // namespace enskog
