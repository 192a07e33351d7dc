#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "enskog/rng.hpp"
#include "enskog/vec.hpp"

using namespace enskog;

TEST_CASE("vec arithmetic and norms") {
  Vec a{1.0, 2.0, 3.0};
  Vec b{-1.0, 0.5, 2.0};
  CHECK((a + b)[0] == doctest::Approx(0.0));
  CHECK((a - b)[2] == doctest::Approx(1.0));
  CHECK((2.0 * a)[1] == doctest::Approx(4.0));
  CHECK(a.dot(b) == doctest::Approx(-1.0 + 1.0 + 6.0));
  CHECK(a.norm2() == doctest::Approx(14.0));
  CHECK(Vec::zero(3).is_zero());
  CHECK(Vec::axis(4, 2)[2] == 1.0);
  CHECK(dist(a, a) == 0.0);
}

TEST_CASE("streams are pure functions of their keys") {
  Stream a = Stream::keyed(42, StreamTag::kPair, 7, 99);
  Stream b = Stream::keyed(42, StreamTag::kPair, 7, 99);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Stream c = Stream::keyed(42, StreamTag::kPair, 7, 100);
  Stream d = Stream::keyed(43, StreamTag::kPair, 7, 99);
  Stream e = Stream::keyed(42, StreamTag::kInit, 7, 99);
  Stream base = Stream::keyed(42, StreamTag::kPair, 7, 99);
  CHECK(base.next_u64() != c.next_u64());
  CHECK(base.next_u64() != d.next_u64());
  CHECK(base.next_u64() != e.next_u64());
}

TEST_CASE("uniform draws live in [0,1) with the right mean") {
  Stream s = Stream::keyed(1, StreamTag::kOracle);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // mean 1/2, sd of the mean = 1/sqrt(12 n)
  CHECK(std::abs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("gaussian moments") {
  Stream s = Stream::keyed(2, StreamTag::kOracle);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = s.gaussian();
    sum += g;
    sum2 += g * g;
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("unit sphere points have norm one and centered components") {
  Stream s = Stream::keyed(3, StreamTag::kOracle);
  const int n = 50000;
  Vec mean = Vec::zero(4);
  for (int i = 0; i < n; ++i) {
    Vec x = s.unit_sphere(4);
    REQUIRE(std::abs(x.norm() - 1.0) < 1e-12);
    mean += x;
  }
  mean *= 1.0 / n;
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::abs(mean[k]) < 4.0 * 0.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("below(n) is bounded and roughly uniform") {
  Stream s = Stream::keyed(4, StreamTag::kOracle);
  const std::uint64_t n = 10;
  std::vector<int> counts(n, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t x = s.below(n);
    REQUIRE(x < n);
    ++counts[x];
  }
  for (std::uint64_t k = 0; k < n; ++k)
    CHECK(counts[k] == doctest::Approx(draws / 10.0).epsilon(0.05));
}
