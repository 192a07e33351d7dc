#include "enskog/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "enskog/collision_geometry.hpp"
#include "enskog/error.hpp"

namespace enskog {

namespace {

double sq(double x) { return x * x; }

// One factor of the tensor poly bump and its derivative.
double bump1(double s) {
  const double w = 1.0 - s * s;
  return w > 0.0 ? w * w : 0.0;
}
double dbump1(double s) {
  const double w = 1.0 - s * s;
  return w > 0.0 ? -4.0 * s * w : 0.0;
}

}  // namespace

double TestFunction::value(const Vec& r, const Vec& v) const {
  switch (kind) {
    case TestFnKind::kConstant:
      return 1.0;
    case TestFnKind::kCoordinateR:
      return r[index];
    case TestFnKind::kCoordinateV:
      return v[index];
    case TestFnKind::kGaussianBump: {
      const double q = (r - center_r).norm2() + (v - center_v).norm2();
      return std::exp(-q / (2.0 * width * width));
    }
    case TestFnKind::kTensorPolyBump: {
      double p = 1.0;
      for (std::size_t i = 0; i < r.size(); ++i) p *= bump1((r[i] - center_r[i]) / width);
      for (std::size_t i = 0; i < v.size(); ++i) p *= bump1((v[i] - center_v[i]) / width);
      return p;
    }
  }
  return 0.0;
}

Vec TestFunction::grad_r(const Vec& r, const Vec& v) const {
  Vec g = Vec::zero(r.size());
  switch (kind) {
    case TestFnKind::kConstant:
    case TestFnKind::kCoordinateV:
      break;
    case TestFnKind::kCoordinateR:
      g[index] = 1.0;
      break;
    case TestFnKind::kGaussianBump:
      g = (r - center_r) * (-value(r, v) / (width * width));
      break;
    case TestFnKind::kTensorPolyBump: {
      const double val = value(r, v);
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double s = (r[i] - center_r[i]) / width;
        const double f = bump1(s);
        g[i] = f > 0.0 ? val / f * dbump1(s) / width : 0.0;
      }
      break;
    }
  }
  return g;
}

Vec TestFunction::grad_v(const Vec& r, const Vec& v) const {
  Vec g = Vec::zero(v.size());
  switch (kind) {
    case TestFnKind::kConstant:
    case TestFnKind::kCoordinateR:
      break;
    case TestFnKind::kCoordinateV:
      g[index] = 1.0;
      break;
    case TestFnKind::kGaussianBump:
      g = (v - center_v) * (-value(r, v) / (width * width));
      break;
    case TestFnKind::kTensorPolyBump: {
      const double val = value(r, v);
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double s = (v[i] - center_v[i]) / width;
        const double f = bump1(s);
        g[i] = f > 0.0 ? val / f * dbump1(s) / width : 0.0;
      }
      break;
    }
  }
  return g;
}

double TestFunction::lipschitz_bound() const {
  switch (kind) {
    case TestFnKind::kConstant:
      return 0.0;
    case TestFnKind::kCoordinateR:
    case TestFnKind::kCoordinateV:
      return 1.0;
    case TestFnKind::kGaussianBump:
      // |grad| = (s/w^2) e^{-s^2/2w^2} peaks at s = w.
      return std::exp(-0.5) / width;
    case TestFnKind::kTensorPolyBump:
      // Per-factor slope max |(-4s)(1-s^2)| = 4 * 2/(3 sqrt 3) at s = 1/sqrt(3),
      // remaining factors <= 1.
      return 8.0 / (3.0 * std::sqrt(3.0)) / width;
  }
  return 0.0;
}

double TestFunction::max_grad_v_over_ball(const Vec& r, double radius) const {
  switch (kind) {
    case TestFnKind::kConstant:
    case TestFnKind::kCoordinateR:
      return 0.0;
    case TestFnKind::kCoordinateV:
      return 1.0;
    case TestFnKind::kGaussianBump: {
      // |grad_v psi| = (s / w^2) exp(-(A + s^2)/(2 w^2)), s = |zeta - c_v|,
      // A = |r - c_r|^2; unimodal in s with peak at s = w.
      const double a = (r - center_r).norm2();
      const double cv = center_v.norm();
      const double lo = std::max(0.0, cv - radius);
      const double hi = cv + radius;
      const double s = std::clamp(width, lo, hi);
      return s / sq(width) * std::exp(-(a + s * s) / (2.0 * sq(width)));
    }
    case TestFnKind::kTensorPolyBump:
      // Coarse but valid: the global slope bound.
      return lipschitz_bound();
  }
  return 0.0;
}

TestFunction TestFunction::constant() {
  TestFunction f;
  f.kind = TestFnKind::kConstant;
  return f;
}
TestFunction TestFunction::coordinate_r(std::size_t i) {
  TestFunction f;
  f.kind = TestFnKind::kCoordinateR;
  f.index = i;
  return f;
}
TestFunction TestFunction::coordinate_v(std::size_t i) {
  TestFunction f;
  f.kind = TestFnKind::kCoordinateV;
  f.index = i;
  return f;
}
TestFunction TestFunction::gaussian_bump(Vec cr, Vec cv, double w) {
  TestFunction f;
  f.kind = TestFnKind::kGaussianBump;
  f.center_r = std::move(cr);
  f.center_v = std::move(cv);
  f.width = w;
  return f;
}
TestFunction TestFunction::tensor_poly_bump(Vec cr, Vec cv, double w) {
  TestFunction f;
  f.kind = TestFnKind::kTensorPolyBump;
  f.center_r = std::move(cr);
  f.center_v = std::move(cv);
  f.width = w;
  return f;
}

namespace {

// Collision average L psi(r, v; u) for a test function composed with the
// transport group, psi_tau(r, v) = psi(r + tau v, v). Linear-in-v kinds have
// the closed form L psi = c . E[alpha]; the rest use Monte Carlo.
bool linear_shortcut(const TestFunction& psi, double tau, const Vec& r,
                     const Vec& v, const Vec& u, const KernelSpec& kernel,
                     double* out) {
  double coeff;
  switch (psi.kind) {
    case TestFnKind::kConstant:
      *out = 0.0;
      return true;
    case TestFnKind::kCoordinateR:
      coeff = tau;  // psi_tau = r_i + tau v_i
      break;
    case TestFnKind::kCoordinateV:
      coeff = 1.0;
      break;
    default:
      return false;
  }
  // int alpha Q dxi = sin2 moment * |S^{d-2}| * (u - v); the Gamma part
  // integrates to zero over the sphere.
  const double c =
      kernel.angular.sin2_half_moment() * kernel.surface();
  (void)r;
  *out = coeff * c * (u[psi.index] - v[psi.index]);
  return true;
}

double collision_average(const TestFunction& psi, double tau, const Vec& r,
                         const Vec& v, const Vec& u, const KernelSpec& kernel,
                         std::size_t mc_samples, Stream& rng) {
  double shortcut;
  if (linear_shortcut(psi, tau, r, v, u, kernel, &shortcut)) return shortcut;

  const Vec x = u - v;
  const double base = psi.value(r + v * tau, v);
  const double mass_surf = kernel.angular.mass() * kernel.surface();
  double acc = 0.0;
  if (x.is_zero()) return 0.0;  // alpha(v, v, .) = 0 identically
  const Frame frame(x);
  const double xn = x.norm();
  for (std::size_t m = 0; m < mc_samples; ++m) {
    const double theta = kernel.angular.sample_theta(rng);
    const Vec xi = sample_xi(kernel.dim, rng);
    const double sh = std::sin(0.5 * theta);
    const Vec a = x * (sh * sh) + frame.embed(xi, xn) * (0.5 * std::sin(theta));
    const Vec vpost = v + a;
    acc += psi.value(r + vpost * tau, vpost) - base;
  }
  return mass_surf * acc / static_cast<double>(mc_samples);
}

}  // namespace

GeneratorValue apply_generator(const TestFunction& psi, const Vec& r, const Vec& v,
                               const Vec& q, const Vec& u, const KernelSpec& kernel,
                               std::size_t mc_samples, Stream& rng) {
  GeneratorValue out;
  out.transport = v.dot(psi.grad_r(r, v));
  const double b = beta_rate(kernel.spatial, r - q);
  if (b > 0.0) {
    const double s = kernel.sigma_capped((v - u).norm());
    if (s > 0.0)
      out.collision =
          s * b * collision_average(psi, 0.0, r, v, u, kernel, mc_samples, rng);
  }
  out.total = out.transport + out.collision;
  return out;
}

double psi_average(const TestFunction& psi, const Ensemble& e, double time_shift) {
  double acc = 0.0;
  for (const Particle& p : e.particles)
    acc += psi.value(p.r + p.v * time_shift, p.v);
  return acc / static_cast<double>(e.size());
}

double transport_pairing(const TestFunction& psi, const Ensemble& e) {
  double acc = 0.0;
  for (const Particle& p : e.particles) acc += p.v.dot(psi.grad_r(p.r, p.v));
  return acc / static_cast<double>(e.size());
}

namespace {

// One ordered-pair contribution sigma beta L psi; rng keyed by the caller.
double pair_term(const TestFunction& psi, double tau, const Ensemble& e,
                 std::size_t i, std::size_t j, const KernelSpec& kernel,
                 std::size_t mc, Stream& rng) {
  const Particle& pi = e.particles[i];
  const Particle& pj = e.particles[j];
  const double b = beta_rate(kernel.spatial, pi.r - pj.r);
  if (b == 0.0) return 0.0;
  const double s = kernel.sigma_capped((pi.v - pj.v).norm());
  if (s == 0.0) return 0.0;
  return s * b * collision_average(psi, tau, pi.r, pi.v, pj.v, kernel, mc, rng);
}

}  // namespace

double collision_pairing(const TestFunction& psi, const Ensemble& e,
                         const KernelSpec& kernel, double time_shift,
                         const ResidualOptions& opt, std::uint64_t step_key) {
  const std::size_t n = e.size();
  if (n < 2) return 0.0;

  if (opt.pair_samples == 0) {
    // Full ordered pair sum / N^2, blocked by row for a deterministic
    // reduction order under any thread count.
    std::vector<double> row_sum(n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(opt.threads) if (opt.threads > 1)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (static_cast<std::size_t>(i) == j) continue;
        Stream rng = Stream::keyed(opt.seed, StreamTag::kAnalysis, step_key,
                                   static_cast<std::uint64_t>(i) * n + j);
        acc += pair_term(psi, time_shift, e, i, j, kernel, opt.angle_samples, rng);
      }
      row_sum[i] = acc;
    }
    double total = 0.0;
    for (double x : row_sum) total += x;
    return total / (static_cast<double>(n) * static_cast<double>(n));
  }

  // Sampled ordered pairs; the (1 - 1/N) factor accounts for the excluded
  // diagonal of the ordered-pair average.
  const std::size_t samples = opt.pair_samples;
  constexpr std::size_t kBlock = 2048;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<double> block_sum(blocks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(opt.threads) if (opt.threads > 1)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    double acc = 0.0;
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(samples, lo + kBlock);
    for (std::size_t k = lo; k < hi; ++k) {
      Stream rng = Stream::keyed(opt.seed, StreamTag::kAnalysis, step_key, k);
      const std::size_t i = rng.below(n);
      std::size_t j = rng.below(n - 1);
      if (j >= i) ++j;
      acc += pair_term(psi, time_shift, e, i, j, kernel, opt.angle_samples, rng);
    }
    block_sum[b] = acc;
  }
  double total = 0.0;
  for (double x : block_sum) total += x;
  const double nn = static_cast<double>(n);
  return (1.0 - 1.0 / nn) * total / static_cast<double>(samples);
}

std::vector<double> weak_form_residual(const std::vector<Ensemble>& trajectory,
                                       const TestFunction& psi,
                                       const KernelSpec& kernel, double dt,
                                       const ResidualOptions& opt) {
  if (trajectory.empty()) return {};
  std::vector<double> out(trajectory.size(), 0.0);
  const double psi0 = psi_average(psi, trajectory[0]);
  double integral = 0.0;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    out[k] = psi_average(psi, trajectory[k]) - psi0 - integral;
    if (k + 1 < trajectory.size())
      integral += dt * (transport_pairing(psi, trajectory[k]) +
                        collision_pairing(psi, trajectory[k], kernel, 0.0, opt, k));
  }
  return out;
}

std::vector<double> mild_form_residual(const std::vector<Ensemble>& trajectory,
                                       const TestFunction& psi,
                                       const KernelSpec& kernel, double dt,
                                       const ResidualOptions& opt) {
  if (trajectory.empty()) return {};
  const std::size_t kn = trajectory.size();
  std::vector<double> out(kn, 0.0);
  for (std::size_t k = 0; k < kn; ++k) {
    const double tk = dt * static_cast<double>(k);
    double integral = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
      const double tau = tk - dt * static_cast<double>(s);
      integral += dt * collision_pairing(psi, trajectory[s], kernel, tau, opt, s);
    }
    out[k] = psi_average(psi, trajectory[k]) -
             psi_average(psi, trajectory[0], tk) - integral;
  }
  return out;
}

ResidualAccumulator::ResidualAccumulator(Form form, TestFunction psi,
                                         KernelSpec kernel, ResidualOptions opt,
                                         double t_final)
    : form_(form),
      psi_(std::move(psi)),
      kernel_(std::move(kernel)),
      opt_(opt),
      t_final_(t_final) {}

void ResidualAccumulator::observe(const Ensemble& pre_step, std::uint64_t step,
                                  double dt) {
  if (!saw_initial_) {
    initial_term_ = form_ == Form::kWeak
                        ? psi_average(psi_, pre_step)
                        : psi_average(psi_, pre_step, t_final_);
    saw_initial_ = true;
  }
  const double s = dt * static_cast<double>(step);
  if (form_ == Form::kWeak) {
    integral_ += dt * (transport_pairing(psi_, pre_step) +
                       collision_pairing(psi_, pre_step, kernel_, 0.0, opt_, step));
  } else {
    integral_ +=
        dt * collision_pairing(psi_, pre_step, kernel_, t_final_ - s, opt_, step);
  }
}

double ResidualAccumulator::residual(const Ensemble& final_state) const {
  return psi_average(psi_, final_state) - initial_term_ - integral_;
}

MomentResult moment_c_gamma(const DiscreteMeasure& m, double gamma, double delta) {
  if (!(delta > 0.0)) fail(ErrorKind::kInvalidArgument, "moment_c_gamma: delta must be > 0");
  if (gamma < -1.0 || gamma > 2.0)
    fail(ErrorKind::kInvalidArgument, "moment_c_gamma: gamma must lie in [-1, 2]");
  MomentResult out;
  double worst = -1.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double term =
        std::exp(delta * std::pow(m.points[i].v.norm(), 1.0 + gamma)) +
        std::pow(m.points[i].r.norm(), 1.0 + delta);
    if (term > worst) {
      worst = term;
      out.worst_atom = i;
    }
    out.value += m.weights[i] * term;
  }
  if (!std::isfinite(out.value)) out.divergent = true;
  return out;
}

namespace {

double lambda_over_probes(const std::vector<const DiscreteMeasure*>& parts,
                          double gamma, const std::vector<Vec>& probes, double cap,
                          std::uint64_t* cap_hits) {
  double best = 0.0;
  std::uint64_t best_hits = 0;
  for (const Vec& u : probes) {
    double acc = 0.0;
    std::uint64_t hits = 0;
    for (const DiscreteMeasure* m : parts) {
      for (std::size_t i = 0; i < m->size(); ++i) {
        const double z = (m->points[i].v - u).norm();
        double val = z == 0.0 ? cap : std::pow(z, gamma);
        if (val >= cap) {
          val = cap;
          ++hits;
        }
        acc += m->weights[i] * val;
      }
    }
    if (acc > best) {
      best = acc;
      best_hits = hits;
    }
  }
  *cap_hits = best_hits;
  return best;
}

}  // namespace

LambdaResult lambda_singular(const DiscreteMeasure& m, double gamma,
                             const std::vector<Vec>& probes, double cap) {
  if (!(gamma < 0.0)) fail(ErrorKind::kInvalidArgument, "lambda_singular: gamma must be < 0");
  if (!(cap > 0.0)) fail(ErrorKind::kInvalidArgument, "lambda_singular: cap must be > 0");
  if (probes.empty()) fail(ErrorKind::kInvalidArgument, "lambda_singular: no probes");
  LambdaResult out;
  out.value = lambda_over_probes({&m}, gamma, probes, cap, &out.cap_hits);
  return out;
}

LambdaResult lambda_singular_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  double gamma, const std::vector<Vec>& probes,
                                  double cap) {
  if (!(gamma < 0.0)) fail(ErrorKind::kInvalidArgument, "lambda_singular: gamma must be < 0");
  if (!(cap > 0.0)) fail(ErrorKind::kInvalidArgument, "lambda_singular: cap must be > 0");
  if (probes.empty()) fail(ErrorKind::kInvalidArgument, "lambda_singular: no probes");
  LambdaResult out;
  out.value = lambda_over_probes({&mu, &nu}, gamma, probes, cap, &out.cap_hits);
  return out;
}

std::vector<Vec> default_probes(const DiscreteMeasure& m, std::size_t atom_count) {
  std::vector<Vec> probes;
  const std::size_t take = std::min(atom_count, m.size());
  for (std::size_t i = 0; i < take; ++i) probes.push_back(m.points[i].v);
  const std::size_t d = m.dim;
  double ms = 0.0;
  for (const PhasePoint& p : m.points) ms += p.v.norm2();
  const double spread = std::sqrt(ms / static_cast<double>(m.size()));
  probes.push_back(Vec::zero(d));
  for (std::size_t k = 0; k < d; ++k) {
    probes.push_back(Vec::axis(d, k) * spread);
    probes.push_back(Vec::axis(d, k) * -spread);
  }
  return probes;
}

double psi_integrand(const PhasePair& pair1, const PhasePair& pair0,
                     const KernelSpec& kernel) {
  const Vec& r = pair1.a.r;
  const Vec& v = pair1.a.v;
  const Vec& rt = pair1.at.r;
  const Vec& vt = pair1.at.v;
  const Vec& q = pair0.a.r;
  const Vec& u = pair0.a.v;
  const Vec& qt = pair0.at.r;
  const Vec& ut = pair0.at.v;

  const double sb = sigma(kernel.cross_section, (v - u).norm()) *
                    beta_rate(kernel.spatial, r - q);
  const double sbt = sigma(kernel.cross_section, (vt - ut).norm()) *
                     beta_rate(kernel.spatial, rt - qt);
  return ((v - u).norm() + (vt - ut).norm()) * std::abs(sb - sbt) +
         ((v - vt).norm() + (u - ut).norm()) * std::min(sb, sbt);
}

namespace {

// Dormand-Prince 5(4) with adaptive steps for the scalar ODE y' = f(y).
double ode45(const std::function<double(double)>& f, double y0, double t_len,
             double rtol) {
  if (t_len <= 0.0) return y0;
  double t = 0.0, y = y0;
  double h = t_len / 64.0;
  const double hmin = t_len * 1e-14;
  int guard = 2'000'000;
  while (t < t_len && guard-- > 0) {
    // Escaping solutions are reported as infinite rather than ground out.
    if (!std::isfinite(y) || y > 1e100)
      return std::numeric_limits<double>::infinity();
    h = std::min(h, t_len - t);
    const double k1 = f(y);
    const double k2 = f(y + h * (k1 / 5.0));
    const double k3 = f(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    const double k4 = f(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    const double k5 = f(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    const double k6 = f(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                 46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                 5103.0 / 18656.0 * k5));
    const double y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 +
                               125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                               11.0 / 84.0 * k6);
    const double k7 = f(y5);
    const double y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                               393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                               187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
    const double err = std::abs(y5 - y4);
    const double tol = rtol * std::max({1e-300, std::abs(y), std::abs(y5)});
    if (err <= tol || h <= hmin) {
      t += h;
      y = y5;
      h *= err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(tol / err, 0.2)))
                     : 5.0;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(tol / err, 0.2));
    }
  }
  return y;
}

}  // namespace

double osgood_majorant(const OsgoodSpec& spec, double t) {
  if (t < 0.0 || t > spec.horizon + 1e-12)
    fail(ErrorKind::kInvalidArgument, "osgood_majorant: t outside [0, horizon]");
  if (spec.k < 0.0) fail(ErrorKind::kInvalidArgument, "osgood_majorant: K must be >= 0");
  if (spec.a < 0.0) fail(ErrorKind::kInvalidArgument, "osgood_majorant: a must be >= 0");
  if (spec.a == 0.0) return 0.0;
  const double k = spec.k;
  auto g = spec.rate == OsgoodRate::kLinear
               ? std::function<double(double)>([k](double x) { return k * x; })
               : std::function<double(double)>([k](double x) {
                   return x > 0.0 ? k * x * (1.0 + std::abs(std::log(x))) : 0.0;
                 });
  return ode45(g, spec.a, t, 1e-10);
}

}  // namespace enskog
