#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "enskog/vec.hpp"

namespace enskog {

// Counter-based random streams built on the splitmix64 finalizer.
//
// Every consumer of randomness derives its own Stream from (seed, tag,
// indices) and advances it locally. Draws are therefore a pure function of
// the key, independent of evaluation order and thread count, which is what
// makes trajectories reproducible and lets two simulations share their
// per-(step, pair) randomness for common-random-numbers coupling.

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}
}  // namespace detail

// Stream tags keep unrelated consumers on disjoint key spaces.
enum class StreamTag : std::uint64_t {
  kInit = 1,
  kCandidateSelect = 2,
  kPair = 3,
  kAnalysis = 4,
  kAudit = 5,
  kOracle = 6,
};

class Stream {
 public:
  Stream() = default;
  explicit Stream(std::uint64_t state) : state_(state) {}

  static Stream keyed(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0,
                      std::uint64_t b = 0) {
    using detail::kGolden;
    using detail::mix64;
    std::uint64_t h = mix64(seed + kGolden * (static_cast<std::uint64_t>(tag) + 1));
    h = mix64(h ^ (a + kGolden));
    h = mix64(h ^ (b + 2 * kGolden));
    return Stream(h);
  }

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n), n >= 1. Rejection-free modulo with 64-bit state is
  // biased by < 2^-11 for n < 2^53; fine for pair selection, but we use
  // Lemire-style rejection to keep the law exact.
  std::uint64_t below(std::uint64_t n) {
    for (;;) {
      std::uint64_t x = next_u64();
      std::uint64_t r = x % n;
      if (x - r <= ~n + 1) return r;  // accept unless in the biased tail
    }
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms per pair
  // of variates so the stream layout stays deterministic.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // u1 = 0 would take log(0); shift into (0, 1].
    double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Vec gaussian_vec(std::size_t dim) {
    Vec v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = gaussian();
    return v;
  }

  // Uniform point on the unit sphere S^{m-1} in R^m.
  Vec unit_sphere(std::size_t m) {
    for (;;) {
      Vec g = gaussian_vec(m);
      double n = g.norm();
      if (n > 1e-12) return g * (1.0 / n);
    }
  }

  // Uniform point in the closed unit ball of R^m.
  Vec unit_ball(std::size_t m) {
    Vec s = unit_sphere(m);
    double u = uniform();
    return s * std::pow(u, 1.0 / static_cast<double>(m));
  }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace enskog
