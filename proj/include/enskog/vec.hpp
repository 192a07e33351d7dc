#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>

namespace enskog {

// Maximum spatial dimension supported by the fixed-capacity vector type.
inline constexpr std::size_t kMaxDim = 8;

// Dense vector with runtime dimension d <= kMaxDim and inline storage.
// Carries positions, velocities, deflections and sphere points; all hot
// loops work on these by value, so no heap traffic.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t dim) : dim_(dim) { assert(dim <= kMaxDim); c_.fill(0.0); }
  Vec(std::initializer_list<double> xs) : dim_(xs.size()) {
    assert(xs.size() <= kMaxDim);
    std::size_t i = 0;
    for (double x : xs) c_[i++] = x;
  }

  std::size_t size() const { return dim_; }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }

  Vec& operator+=(const Vec& o) {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }

  friend bool operator==(const Vec& a, const Vec& b) {
    if (a.dim_ != b.dim_) return false;
    for (std::size_t i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += c_[i] * o.c_[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  bool is_zero() const {
    for (std::size_t i = 0; i < dim_; ++i)
      if (c_[i] != 0.0) return false;
    return true;
  }

  bool all_finite() const {
    for (std::size_t i = 0; i < dim_; ++i)
      if (!std::isfinite(c_[i])) return false;
    return true;
  }

  static Vec zero(std::size_t dim) { return Vec(dim); }

  // Canonical basis vector e_k.
  static Vec axis(std::size_t dim, std::size_t k) {
    Vec v(dim);
    v[k] = 1.0;
    return v;
  }

 private:
  std::array<double, kMaxDim> c_{};
  std::size_t dim_ = 0;
};

inline double dist(const Vec& a, const Vec& b) { return (a - b).norm(); }

}  // namespace enskog
