#pragma once

#include <cstddef>
#include <utility>

#include "enskog/vec.hpp"

namespace enskog {

// Elastic binary collisions in dimension d >= 3, parameterized by a
// deflection angle theta in (0, pi] and a point xi on the sphere S^{d-2}
// (a unit vector in R^{d-1}). The map gamma() embeds xi into the sphere of
// vectors orthogonal to the relative velocity with matching norm, which is
// what makes the parameterization dimension-generic.

struct AngleParam {
  double theta = 0.0;  // deflection angle in (0, pi]
  Vec xi;              // unit vector in R^{d-1}

  // Throws invalid-argument unless theta in (0, pi] and |xi| = 1 (1e-12).
  void validate() const;
};

// Orthonormal basis of the hyperplane orthogonal to a direction, built from
// a Householder reflection that maps the direction onto a canonical axis.
// Deterministic in the input, which keeps every consumer reproducible.
class Frame {
 public:
  // Requires x != 0.
  explicit Frame(const Vec& x);

  std::size_t dim() const { return dim_; }
  const Vec& basis(std::size_t k) const { return basis_[k]; }  // k < dim-1

  // Embed a unit vector xi in R^{d-1} as a vector of norm `scale` in the
  // orthogonal hyperplane.
  Vec embed(const Vec& xi, double scale) const;

  // Coordinates of a hyperplane vector w in this basis (inverse of embed up
  // to the scale factor).
  Vec coordinates(const Vec& w) const;

 private:
  std::size_t dim_;
  std::array<Vec, kMaxDim - 1> basis_;
};

// Gamma(X, xi): the point of S^{d-2}(X) = {w : |w| = |X|, (w, X) = 0}
// assigned to xi; Gamma(0, xi) = 0. Throws invalid-argument if |xi| != 1.
Vec gamma(const Vec& x, const Vec& xi);

// Velocity increment of a collision:
//   alpha = sin^2(theta/2) (u - v) + (sin(theta)/2) Gamma(u - v, xi),
// with |alpha| = |v - u| sin(theta/2) and alpha = 0 when v = u.
Vec alpha(const Vec& v, const Vec& u, const AngleParam& ap);

// Post-collision velocities (v + alpha, u - alpha).
std::pair<Vec, Vec> deflect(const Vec& v, const Vec& u, const AngleParam& ap);

// Classical parameterization v* = v + (u - v, n) n, u* = u - (u - v, n) n.
// Involutive for fixed unit n. Throws invalid-argument if |n| != 1.
std::pair<Vec, Vec> deflect_n(const Vec& v, const Vec& u, const Vec& n);

// The unit vector n realizing deflect(v, u, ap) through deflect_n:
//   n = sin(theta/2) (u-v)/|u-v| + cos(theta/2) Gamma(u-v, xi)/|u-v|.
// Throws degenerate-input when v = u.
Vec n_from_angles(const Vec& v, const Vec& u, const AngleParam& ap);

// Angle re-alignment xi0(X, Y, xi): a bijection of S^{d-2} such that
// |Gamma(X, xi) - Gamma(Y, xi0)| <= 3 |X - Y|. Realized by rotating
// Gamma(X, xi) within span{X, Y}, rescaling to |Y|, and pulling back
// through Gamma(Y, .). Throws degenerate-input when X = 0 or Y = 0.
Vec tanaka_shift(const Vec& x, const Vec& y, const Vec& xi);

}  // namespace enskog
