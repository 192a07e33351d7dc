#include "enskog/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "enskog/error.hpp"
#include "enskog/quadrature.hpp"

namespace enskog {

namespace {
constexpr double kPi = std::numbers::pi;
}

double sigma(const CrossSection& cs, double z) {
  if (z < 0.0 || !std::isfinite(z))
    fail(ErrorKind::kInvalidArgument, "sigma: z must be finite and >= 0");
  switch (cs.form) {
    case SigmaForm::kPower:
      if (z == 0.0) {
        if (cs.gamma < 0.0)
          fail(ErrorKind::kSingularInput, "sigma: |z|^gamma singular at z = 0");
        if (cs.gamma == 0.0) return 1.0;
        return 0.0;
      }
      return std::pow(z, cs.gamma);
    case SigmaForm::kTempered:
      return std::pow(1.0 + z * z, 0.5 * cs.gamma);
  }
  return 0.0;
}

void AngularMeasure::validate() const {
  if (cutoff_eps < 0.0 || cutoff_eps >= kPi)
    fail(ErrorKind::kInvalidArgument, "angular: cutoff_eps must lie in [0, pi)");
  if (kind == AngularKind::kLongRange) {
    if (!(nu > 0.0) || nu >= 2.0)
      fail(ErrorKind::kInvalidArgument, "angular: nu must lie in (0, 2)");
  }
  if (kind == AngularKind::kTable) {
    if (table_theta.size() < 2 || table_theta.size() != table_b.size())
      fail(ErrorKind::kInvalidArgument, "angular: table needs >= 2 matched nodes");
    for (std::size_t i = 0; i < table_theta.size(); ++i) {
      if (table_b[i] < 0.0)
        fail(ErrorKind::kInvalidArgument, "angular: table density must be >= 0");
      if (i > 0 && table_theta[i] <= table_theta[i - 1])
        fail(ErrorKind::kInvalidArgument, "angular: table thetas must be ascending");
    }
    if (table_theta.front() <= 0.0 || table_theta.back() > kPi)
      fail(ErrorKind::kInvalidArgument, "angular: table thetas must lie in (0, pi]");
  }
}

double AngularMeasure::density(double theta) const {
  if (theta <= cutoff_eps || theta > kPi) return 0.0;
  switch (kind) {
    case AngularKind::kLongRange:
      return std::pow(theta, -1.0 - nu);
    case AngularKind::kHardSphere:
      return std::sin(0.5 * theta) * std::cos(0.5 * theta);
    case AngularKind::kTable: {
      if (theta < table_theta.front() || theta > table_theta.back()) return 0.0;
      auto it = std::upper_bound(table_theta.begin(), table_theta.end(), theta);
      std::size_t s = (it == table_theta.begin())
                          ? 0
                          : static_cast<std::size_t>(it - table_theta.begin()) - 1;
      if (s + 1 >= table_theta.size()) s = table_theta.size() - 2;
      return 0.5 * (table_b[s] + table_b[s + 1]);
    }
  }
  return 0.0;
}

double AngularMeasure::mass() const {
  validate();
  const double eps = cutoff_eps;
  switch (kind) {
    case AngularKind::kLongRange:
      if (eps == 0.0)
        fail(ErrorKind::kNonNormalizable,
             "angular: long-range measure has infinite mass without cutoff");
      return (std::pow(eps, -nu) - std::pow(kPi, -nu)) / nu;
    case AngularKind::kHardSphere:
      return 0.5 * (1.0 + std::cos(eps));
    case AngularKind::kTable: {
      double m = 0.0;
      for (std::size_t s = 0; s + 1 < table_theta.size(); ++s) {
        const double lo = std::max(table_theta[s], eps);
        const double hi = table_theta[s + 1];
        if (hi <= lo) continue;
        m += 0.5 * (table_b[s] + table_b[s + 1]) * (hi - lo);
      }
      return m;
    }
  }
  return 0.0;
}

double AngularMeasure::kappa() const {
  validate();
  const double eps = cutoff_eps;
  switch (kind) {
    case AngularKind::kLongRange: {
      if (eps == 0.0 && nu >= 1.0)
        fail(ErrorKind::kDivergentMeasure,
             "angular: kappa diverges for nu >= 1 without cutoff");
      if (nu == 1.0) return std::log(kPi / eps);
      // int theta^{-nu} dtheta over (eps, pi]
      return (std::pow(kPi, 1.0 - nu) - std::pow(eps, 1.0 - nu)) / (1.0 - nu);
    }
    case AngularKind::kHardSphere:
      // int theta sin(theta)/2 over (eps, pi]
      return 0.5 * (kPi - std::sin(eps) + eps * std::cos(eps));
    case AngularKind::kTable: {
      double k = 0.0;
      for (std::size_t s = 0; s + 1 < table_theta.size(); ++s) {
        const double lo = std::max(table_theta[s], eps);
        const double hi = table_theta[s + 1];
        if (hi <= lo) continue;
        k += 0.5 * (table_b[s] + table_b[s + 1]) * 0.5 * (hi * hi - lo * lo);
      }
      return k;
    }
  }
  return 0.0;
}

double AngularMeasure::sin2_half_moment() const {
  validate();
  const double eps = cutoff_eps;
  switch (kind) {
    case AngularKind::kLongRange: {
      if (eps == 0.0 && nu >= 2.0)
        fail(ErrorKind::kDivergentMeasure, "angular: sin^2 moment diverges");
      const double lo = std::max(eps, 1e-14);
      return integrate(
          [this](double t) {
            const double s = std::sin(0.5 * t);
            return s * s * std::pow(t, -1.0 - nu);
          },
          lo, kPi, 1e-12);
    }
    case AngularKind::kHardSphere: {
      // int sin^3(theta/2) cos(theta/2) dtheta = sin^4(theta/2) / 2
      const double se = std::sin(0.5 * eps);
      return 0.5 * (1.0 - se * se * se * se);
    }
    case AngularKind::kTable: {
      double m = 0.0;
      for (std::size_t s = 0; s + 1 < table_theta.size(); ++s) {
        const double lo = std::max(table_theta[s], eps);
        const double hi = table_theta[s + 1];
        if (hi <= lo) continue;
        // int sin^2(t/2) dt = (t - sin t)/2
        m += 0.5 * (table_b[s] + table_b[s + 1]) *
             0.5 * ((hi - std::sin(hi)) - (lo - std::sin(lo)));
      }
      return m;
    }
  }
  return 0.0;
}

double AngularMeasure::cdf(double theta) const {
  const double eps = cutoff_eps;
  if (theta <= eps) return 0.0;
  if (theta >= kPi) return 1.0;
  const double m = mass();
  switch (kind) {
    case AngularKind::kLongRange:
      return (std::pow(eps, -nu) - std::pow(theta, -nu)) / (nu * m);
    case AngularKind::kHardSphere:
      return 0.5 * (std::cos(eps) - std::cos(theta)) / m;
    case AngularKind::kTable: {
      double acc = 0.0;
      for (std::size_t s = 0; s + 1 < table_theta.size(); ++s) {
        const double lo = std::max(table_theta[s], eps);
        const double hi = table_theta[s + 1];
        if (hi <= lo) continue;
        const double c = 0.5 * (table_b[s] + table_b[s + 1]);
        if (theta >= hi) {
          acc += c * (hi - lo);
        } else if (theta > lo) {
          acc += c * (theta - lo);
          break;
        } else {
          break;
        }
      }
      return acc / m;
    }
  }
  return 0.0;
}

double AngularMeasure::sample_theta(Stream& rng) const {
  const double eps = cutoff_eps;
  if (kind == AngularKind::kLongRange && eps == 0.0)
    fail(ErrorKind::kNonNormalizable,
         "sample_theta: long-range kind requires cutoff_eps > 0");
  const double u = rng.uniform();
  switch (kind) {
    case AngularKind::kLongRange: {
      const double a = std::pow(eps, -nu);
      const double b = std::pow(kPi, -nu);
      return std::pow(a - u * (a - b), -1.0 / nu);
    }
    case AngularKind::kHardSphere: {
      const double ce = std::cos(eps);
      return std::acos(ce - u * (ce + 1.0));
    }
    case AngularKind::kTable: {
      const double m = mass();
      double target = u * m;
      double acc = 0.0;
      for (std::size_t s = 0; s + 1 < table_theta.size(); ++s) {
        const double lo = std::max(table_theta[s], eps);
        const double hi = table_theta[s + 1];
        if (hi <= lo) continue;
        const double c = 0.5 * (table_b[s] + table_b[s + 1]);
        const double seg = c * (hi - lo);
        if (acc + seg >= target && seg > 0.0)
          return lo + (target - acc) / c;
        acc += seg;
      }
      return table_theta.back();
    }
  }
  return kPi;
}

double beta_rate(const SpatialRate& sr, const Vec& x) {
  if (sr.profile == BetaProfile::kUniform) return 1.0;
  const double m2 = x.norm2() / (sr.rho * sr.rho);
  if (m2 >= 1.0) return 0.0;
  const double w = 1.0 - m2;
  return w * w;
}

const char* to_string(PotentialRegime r) {
  switch (r) {
    case PotentialRegime::kVerySoft: return "very-soft";
    case PotentialRegime::kSoft: return "soft";
    case PotentialRegime::kMaxwellian: return "maxwellian";
    case PotentialRegime::kHard: return "hard";
  }
  return "unknown";
}

PotentialExponents exponents_from_s(double s) {
  if (!(s > 2.0))
    fail(ErrorKind::kInvalidArgument, "exponents_from_s: requires s > 2");
  PotentialExponents pe;
  pe.s = s;
  pe.gamma = (s - 5.0) / (s - 1.0);
  pe.nu = 2.0 / (s - 1.0);
  if (s <= 3.0)
    pe.regime = PotentialRegime::kVerySoft;
  else if (s < 5.0)
    pe.regime = PotentialRegime::kSoft;
  else if (s == 5.0)
    pe.regime = PotentialRegime::kMaxwellian;
  else
    pe.regime = PotentialRegime::kHard;
  return pe;
}

double sphere_area(std::size_t m) {
  // |S^m| = 2 pi^{(m+1)/2} / Gamma((m+1)/2)
  const double half = 0.5 * static_cast<double>(m + 1);
  return 2.0 * std::pow(kPi, half) / std::tgamma(half);
}

Vec sample_xi(std::size_t d, Stream& rng) {
  if (d < 3) fail(ErrorKind::kInvalidArgument, "sample_xi: requires d >= 3");
  return rng.unit_sphere(d - 1);
}

void KernelSpec::validate() const {
  if (dim < 3 || dim > kMaxDim)
    fail(ErrorKind::kConfig, "kernel: dimension must lie in [3, 8]");
  const double d = static_cast<double>(dim);
  if (cross_section.gamma <= -d || cross_section.gamma > 2.0)
    fail(ErrorKind::kConfig, "kernel: gamma must lie in (-d, 2]");
  if (cross_section.c_sigma < 1.0)
    fail(ErrorKind::kConfig, "kernel: c_sigma must be >= 1");
  angular.validate();
  if (spatial.rho <= 0.0) fail(ErrorKind::kConfig, "kernel: beta.rho must be > 0");
  if (z_min <= 0.0) fail(ErrorKind::kConfig, "kernel: z_min must be > 0");
}

double KernelSpec::sigma_capped(double z, bool* capped) const {
  const bool caps = cross_section.form == SigmaForm::kPower &&
                    cross_section.gamma < 0.0 && z < z_min;
  if (capped) *capped = caps;
  return sigma(cross_section, caps ? z_min : z);
}

double KernelSpec::pair_rate(const Vec& r, const Vec& v, const Vec& q,
                             const Vec& u, bool* capped) const {
  const double b = beta_rate(spatial, r - q);
  if (b == 0.0) {
    if (capped) *capped = false;
    return 0.0;
  }
  const double s = sigma_capped((v - u).norm(), capped);
  return s * b * angular.mass() * surface();
}

}  // namespace enskog
