#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "enskog/rng.hpp"
#include "enskog/vec.hpp"

namespace enskog {

// Collision kernel B(|v-u|, n) dn = sigma(|v-u|) Q(dtheta) dxi together with
// the spatial rate beta. The angular measure is kept truncated to
// theta > cutoff_eps whenever its density is non-integrable at zero.

enum class SigmaForm { kPower, kTempered };

struct CrossSection {
  SigmaForm form = SigmaForm::kPower;
  double gamma = 0.0;   // velocity exponent, in (-d, 2]
  double c_sigma = 1.0; // Lipschitz-in-|z|^gamma constant, >= 1
};

// sigma(z) for z >= 0. Power form |z|^gamma, tempered form (1+z^2)^{gamma/2}.
// Throws singular-input for z = 0 with gamma < 0 in power form.
double sigma(const CrossSection& cs, double z);

enum class AngularKind { kLongRange, kHardSphere, kTable };

struct AngularMeasure {
  AngularKind kind = AngularKind::kLongRange;
  double nu = 0.5;          // long-range tail exponent, in (0, 2)
  double cutoff_eps = 1e-2; // truncation angle, in [0, pi)
  // Table nodes (theta_i, b_i), theta ascending in (0, pi]. The measure is
  // the piecewise-linear-CDF interpolant: constant density
  // (b_i + b_{i+1})/2 on each segment, so mass, kappa and inverse sampling
  // all agree exactly.
  std::vector<double> table_theta;
  std::vector<double> table_b;

  void validate() const;

  // Density b(theta) on (cutoff_eps, pi].
  double density(double theta) const;

  // Total mass of the truncated measure; throws non-normalizable when the
  // untruncated long-range measure is requested.
  double mass() const;

  // kappa = int theta Q(dtheta) over (cutoff_eps, pi]. Analytic for the
  // built-in kinds; throws divergent-measure when infinite (long-range
  // nu >= 1 with zero cutoff).
  double kappa() const;

  // int sin^2(theta/2) Q(dtheta); analytic where a closed form exists,
  // otherwise adaptive quadrature to 1e-10.
  double sin2_half_moment() const;

  // Inverse-CDF draw from the normalized restriction to (cutoff_eps, pi].
  double sample_theta(Stream& rng) const;

  // CDF of the normalized restriction; exposed for distribution tests.
  double cdf(double theta) const;
};

enum class BetaProfile { kBump, kUniform };

struct SpatialRate {
  double rho = 1.0;  // support radius
  BetaProfile profile = BetaProfile::kBump;
};

// beta(x): symmetric, in [0, 1], zero for |x| >= rho, C^1 across the
// boundary. The bump profile is (1 - (|x|/rho)^2)^2; the uniform profile is
// the constant 1 surrogate used when spatial locality should be switched off.
double beta_rate(const SpatialRate& sr, const Vec& x);

enum class PotentialRegime { kVerySoft, kSoft, kMaxwellian, kHard };

struct PotentialExponents {
  double s = 0.0;
  double gamma = 0.0;
  double nu = 0.0;
  PotentialRegime regime = PotentialRegime::kMaxwellian;
};

const char* to_string(PotentialRegime r);

// gamma = (s-5)/(s-1), nu = 2/(s-1) with the regime classification
// very-soft (2 < s <= 3], soft (3 < s < 5), maxwellian (s = 5),
// hard (s > 5). Throws invalid-argument for s <= 2.
PotentialExponents exponents_from_s(double s);

// Surface area of the unit sphere S^m embedded in R^{m+1}.
double sphere_area(std::size_t m);

// Uniform point on S^{d-2}, i.e. a unit vector in R^{d-1}; requires d >= 3.
Vec sample_xi(std::size_t d, Stream& rng);

// Bundle used by the simulator and the analysis module.
struct KernelSpec {
  std::size_t dim = 3;
  CrossSection cross_section;
  AngularMeasure angular;
  SpatialRate spatial;
  double z_min = 1e-3;  // soft-potential cap: sigma evaluated at max(z, z_min)

  void validate() const;

  double surface() const { return sphere_area(dim - 2); }

  // sigma with the soft-potential cap; sets *capped when the cap binds.
  double sigma_capped(double z, bool* capped = nullptr) const;

  // Total jump rate of an ordered pair: sigma(|v-u|) beta(r-q) mass(Q) |S^{d-2}|.
  double pair_rate(const Vec& r, const Vec& v, const Vec& q, const Vec& u,
                   bool* capped = nullptr) const;
};

}  // namespace enskog
