#include "enskog/collision_geometry.hpp"

#include <cmath>

#include "enskog/error.hpp"

namespace enskog {

namespace {

constexpr double kUnitTol = 1e-12;

bool is_unit(const Vec& v) { return std::abs(v.norm() - 1.0) <= kUnitTol; }

}  // namespace

void AngleParam::validate() const {
  if (!(theta > 0.0) || theta > std::numbers::pi || !std::isfinite(theta))
    fail(ErrorKind::kInvalidArgument, "theta must lie in (0, pi]");
  if (!is_unit(xi)) fail(ErrorKind::kInvalidArgument, "xi must be a unit vector");
}

Frame::Frame(const Vec& x) : dim_(x.size()) {
  // Householder vector w = x_hat + sign(x_1) e_1 reflects -sign(x_1) e_1
  // onto x_hat; the images of e_2..e_d then span the hyperplane x^perp.
  const double nx = x.norm();
  Vec w = x * (1.0 / nx);
  const double s = w[0] >= 0.0 ? 1.0 : -1.0;
  w[0] += s;
  const double wn2 = w.norm2();
  for (std::size_t k = 1; k < dim_; ++k) {
    Vec e = Vec::axis(dim_, k);
    basis_[k - 1] = e - w * (2.0 * w.dot(e) / wn2);
  }
}

Vec Frame::embed(const Vec& xi, double scale) const {
  Vec out(dim_);
  for (std::size_t k = 0; k + 1 < dim_; ++k) out += basis_[k] * (scale * xi[k]);
  return out;
}

Vec Frame::coordinates(const Vec& w) const {
  Vec out(dim_ - 1);
  for (std::size_t k = 0; k + 1 < dim_; ++k) out[k] = basis_[k].dot(w);
  return out;
}

Vec gamma(const Vec& x, const Vec& xi) {
  if (!is_unit(xi)) fail(ErrorKind::kInvalidArgument, "gamma: xi must be a unit vector");
  if (x.is_zero()) return Vec::zero(x.size());
  Frame f(x);
  return f.embed(xi, x.norm());
}

Vec alpha(const Vec& v, const Vec& u, const AngleParam& ap) {
  ap.validate();
  const Vec x = u - v;
  const double sh = std::sin(0.5 * ap.theta);
  Vec out = x * (sh * sh);
  if (!x.is_zero()) {
    Frame f(x);
    out += f.embed(ap.xi, x.norm()) * (0.5 * std::sin(ap.theta));
  }
  return out;
}

std::pair<Vec, Vec> deflect(const Vec& v, const Vec& u, const AngleParam& ap) {
  const Vec a = alpha(v, u, ap);
  return {v + a, u - a};
}

std::pair<Vec, Vec> deflect_n(const Vec& v, const Vec& u, const Vec& n) {
  if (!is_unit(n)) fail(ErrorKind::kInvalidArgument, "deflect_n: n must be a unit vector");
  const Vec a = n * (u - v).dot(n);
  return {v + a, u - a};
}

Vec n_from_angles(const Vec& v, const Vec& u, const AngleParam& ap) {
  ap.validate();
  const Vec x = u - v;
  if (x.is_zero()) fail(ErrorKind::kDegenerateInput, "n_from_angles: v = u");
  const double inv = 1.0 / x.norm();
  Frame f(x);
  return x * (std::sin(0.5 * ap.theta) * inv) +
         f.embed(ap.xi, 1.0) * std::cos(0.5 * ap.theta);
}

Vec tanaka_shift(const Vec& x, const Vec& y, const Vec& xi) {
  if (x.is_zero() || y.is_zero())
    fail(ErrorKind::kDegenerateInput, "tanaka_shift: X and Y must be nonzero");
  if (!is_unit(xi))
    fail(ErrorKind::kInvalidArgument, "tanaka_shift: xi must be a unit vector");

  const std::size_t d = x.size();
  const Vec xh = x * (1.0 / x.norm());
  const Vec yh = y * (1.0 / y.norm());
  const double c = xh.dot(yh);

  const Vec g = gamma(x, xi);  // norm |X|, orthogonal to X

  // Rotate g within span{X, Y} so that the result is orthogonal to Y.
  // b completes xh to an orthonormal basis of the plane, oriented so that
  // yh = c xh + s b with s >= 0.
  Vec rotated(d);
  Vec b = yh - xh * c;
  const double bn = b.norm();
  if (bn > 1e-7) {
    b *= 1.0 / bn;
    const double s = yh.dot(b);
    const double ga = g.dot(xh);  // zero up to roundoff
    const double gb = g.dot(b);
    rotated = g + xh * ((c - 1.0) * ga - s * gb) + b * (s * ga + (c - 1.0) * gb);
  } else if (c > 0.0) {
    // X and Y nearly parallel: the rotation degenerates to the identity.
    rotated = g;
  } else {
    // Nearly antipodal: rotate by pi in a fixed plane through xh. The plane
    // partner is the canonical axis least aligned with xh, Gram-Schmidted;
    // both orderings (X, Y) and (Y, X) select the same plane, so the map
    // stays an involution-compatible bijection.
    std::size_t k = 0;
    double best = std::abs(xh[0]);
    for (std::size_t i = 1; i < d; ++i) {
      if (std::abs(xh[i]) < best) {
        best = std::abs(xh[i]);
        k = i;
      }
    }
    Vec p = Vec::axis(d, k);
    p -= xh * xh.dot(p);
    p *= 1.0 / p.norm();
    const double ga = g.dot(xh);
    const double gp = g.dot(p);
    rotated = g - xh * (2.0 * ga) - p * (2.0 * gp);
  }

  // Pull back through Gamma(Y, .): coordinates in the frame of Y, scaled to
  // unit length. rotated has norm |X|; the frame projection drops any
  // residual component along Y from roundoff, so renormalize.
  Frame fy(y);
  Vec xi0 = fy.coordinates(rotated);
  const double n = xi0.norm();
  if (n == 0.0) fail(ErrorKind::kDegenerateInput, "tanaka_shift: degenerate pullback");
  return xi0 * (1.0 / n);
}

}  // namespace enskog
