#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "enskog/error.hpp"
#include "enskog/rng.hpp"
#include "enskog/transport_metrics.hpp"

using namespace enskog;

namespace {

DiscreteMeasure random_uniform_measure(Stream& s, std::size_t n, std::size_t d) {
  DiscreteMeasure m;
  m.dim = d;
  for (std::size_t i = 0; i < n; ++i)
    m.points.push_back({s.gaussian_vec(d) * 2.0, s.gaussian_vec(d) * 2.0});
  m.weights.assign(n, 1.0 / static_cast<double>(n));
  return m;
}

PhasePoint pp(std::initializer_list<double> r, std::initializer_list<double> v) {
  return {Vec(r), Vec(v)};
}

}  // namespace

TEST_CASE("cost_t basics") {
  const PhasePoint p = pp({0, 0, 0}, {1, 0, 0});
  const PhasePoint q = pp({1, 0, 0}, {0, 0, 0});
  CHECK(cost_t(p, q, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(cost_t(p, q, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(cost_t(p, p, 3.7) == 0.0);

  const PhasePoint bad = pp({0, 0, 0, 0}, {0, 0, 0, 0});
  CHECK_THROWS_AS(cost_t(p, bad, 0.0), Error);

  // Norm equivalence of the shifted family.
  Stream s = Stream::keyed(30, StreamTag::kOracle);
  for (int rep = 0; rep < 5000; ++rep) {
    const PhasePoint a{s.gaussian_vec(3), s.gaussian_vec(3)};
    const PhasePoint b{s.gaussian_vec(3), s.gaussian_vec(3)};
    const double t = 3.0 * s.uniform();
    const double c0 = cost_t(a, b, 0.0);
    const double ct = cost_t(a, b, t);
    CHECK(ct <= (1.0 + t) * c0 + 1e-12);
    CHECK(c0 <= (1.0 + t) * ct + 1e-12);
  }
}

TEST_CASE("shift_measure acts on atoms and composes") {
  DiscreteMeasure m;
  m.dim = 3;
  m.points = {pp({1, 2, 3}, {0.5, -1, 2})};
  m.weights = {1.0};

  const DiscreteMeasure id = shift_measure(m, 0.0);
  CHECK((id.points[0].r - m.points[0].r).norm() == 0.0);

  const DiscreteMeasure sh = shift_measure(m, 2.0);
  CHECK((sh.points[0].r - Vec{0.0, 4.0, -1.0}).norm() < 1e-14);
  CHECK((sh.points[0].v - m.points[0].v).norm() == 0.0);

  const DiscreteMeasure ab = shift_measure(shift_measure(m, 0.7), 1.3);
  const DiscreteMeasure once = shift_measure(m, 2.0);
  CHECK((ab.points[0].r - once.points[0].r).norm() < 1e-14);
}

TEST_CASE("w1 on uniform instances equals the permutation oracle") {
  Stream s = Stream::keyed(31, StreamTag::kOracle);

  // Identical measures: zero with a diagonal coupling.
  DiscreteMeasure m = random_uniform_measure(s, 5, 3);
  const OtResult same = w1(m, m, make_cost(0.0));
  CHECK(same.value == 0.0);
  for (const CouplingEntry& e : same.coupling.entries) CHECK(e.i == e.j);

  // Point masses.
  DiscreteMeasure da, db;
  da.dim = db.dim = 3;
  da.points = {pp({0, 0, 0}, {0, 0, 0})};
  da.weights = {1.0};
  db.points = {pp({1, 1, 0}, {0, 0, 1})};
  db.weights = {1.0};
  const double expect = cost_t(da.points[0], db.points[0], 0.0);
  CHECK(w1(da, db, make_cost(0.0)).value == doctest::Approx(expect).epsilon(1e-15));

  // Exact agreement (same arithmetic) with brute force for all n <= 7.
  for (std::size_t n = 1; n <= 7; ++n) {
    for (int rep = 0; rep < 40; ++rep) {
      const DiscreteMeasure mu = random_uniform_measure(s, n, 3);
      const DiscreteMeasure nu = random_uniform_measure(s, n, 3);
      const OtResult got = w1(mu, nu, make_cost(0.0));
      const double oracle = brute_force_w1(mu, nu, make_cost(0.0));
      CHECK(got.value == oracle);
      CHECK(got.coupling.marginal_error(mu, nu) <= 1e-10);
    }
  }
}

TEST_CASE("w1 metric axioms on samples") {
  Stream s = Stream::keyed(32, StreamTag::kOracle);
  for (int rep = 0; rep < 20; ++rep) {
    const DiscreteMeasure a = random_uniform_measure(s, 6, 3);
    const DiscreteMeasure b = random_uniform_measure(s, 6, 3);
    const DiscreteMeasure c = random_uniform_measure(s, 6, 3);
    const double ab = w1(a, b, make_cost(0.0)).value;
    const double ba = w1(b, a, make_cost(0.0)).value;
    const double ac = w1(a, c, make_cost(0.0)).value;
    const double cb = w1(c, b, make_cost(0.0)).value;
    CHECK(std::abs(ab - ba) <= 1e-10);
    CHECK(ab <= ac + cb + 1e-10);
  }
}

TEST_CASE("general weights agree with an atom-splitting oracle") {
  Stream s = Stream::keyed(33, StreamTag::kOracle);
  for (int rep = 0; rep < 30; ++rep) {
    // nu has 4 uniform atoms; mu duplicates one atom with doubled weight, so
    // the value must match the expanded uniform instance solved by brute
    // force.
    DiscreteMeasure nu = random_uniform_measure(s, 4, 3);
    DiscreteMeasure mu_exp = random_uniform_measure(s, 4, 3);
    mu_exp.points[3] = mu_exp.points[2];

    DiscreteMeasure mu;
    mu.dim = 3;
    mu.points = {mu_exp.points[0], mu_exp.points[1], mu_exp.points[2]};
    mu.weights = {0.25, 0.25, 0.5};

    const double got = w1(mu, nu, make_cost(0.0)).value;
    const double oracle = brute_force_w1(mu_exp, nu, make_cost(0.0));
    CHECK(got == doctest::Approx(oracle).epsilon(1e-12));
  }

  // 2x2 closed form: the transport polytope is an interval, optimum at an
  // endpoint.
  for (int rep = 0; rep < 200; ++rep) {
    DiscreteMeasure mu, nu;
    mu.dim = nu.dim = 3;
    mu.points = {PhasePoint{s.gaussian_vec(3), s.gaussian_vec(3)},
                 PhasePoint{s.gaussian_vec(3), s.gaussian_vec(3)}};
    nu.points = {PhasePoint{s.gaussian_vec(3), s.gaussian_vec(3)},
                 PhasePoint{s.gaussian_vec(3), s.gaussian_vec(3)}};
    const double w = 0.1 + 0.8 * s.uniform();
    const double x = 0.1 + 0.8 * s.uniform();
    mu.weights = {w, 1.0 - w};
    nu.weights = {x, 1.0 - x};
    auto c = [&](int i, int j) { return cost_t(mu.points[i], nu.points[j], 0.0); };
    auto value_at = [&](double h11) {
      return h11 * c(0, 0) + (w - h11) * c(0, 1) + (x - h11) * c(1, 0) +
             (1.0 - w - x + h11) * c(1, 1);
    };
    const double lo = std::max(0.0, w + x - 1.0);
    const double hi = std::min(w, x);
    const double oracle = std::min(value_at(lo), value_at(hi));
    const double got = w1(mu, nu, make_cost(0.0)).value;
    CHECK(got == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("shifted distance: two routes and the transported atom") {
  Stream s = Stream::keyed(34, StreamTag::kOracle);

  // delta_{(r,v)} against its transported copy: distance t |v|.
  DiscreteMeasure a, b;
  a.dim = b.dim = 3;
  const Vec r{0.2, -0.3, 1.0};
  const Vec v{1.0, 2.0, -0.5};
  const double t = 1.7;
  a.points = {PhasePoint{r, v}};
  a.weights = {1.0};
  b.points = {PhasePoint{r + v * t, v}};
  b.weights = {1.0};
  CHECK(w1_shifted(a, b, t).value == doctest::Approx(t * v.norm()).epsilon(1e-12));
  CHECK(w1_shifted(a, b, 0.0).value ==
        doctest::Approx(w1(a, b, make_cost(0.0)).value).epsilon(1e-15));

  // Route A (cost_t) vs route B (shift then cost_0) on random instances.
  for (int rep = 0; rep < 25; ++rep) {
    const DiscreteMeasure mu = random_uniform_measure(s, 5, 3);
    const DiscreteMeasure nu = random_uniform_measure(s, 5, 3);
    for (double tt : {0.0, 0.5, 2.0}) {
      const double route_a = w1(mu, nu, make_cost(tt)).value;
      const double route_b =
          w1(shift_measure(mu, tt), shift_measure(nu, tt), make_cost(0.0)).value;
      CHECK(std::abs(route_a - route_b) <= 1e-10 * std::max(1.0, route_a));
      CHECK(w1_shifted(mu, nu, tt).value == route_a);
    }
  }
}

TEST_CASE("brute force guard rails") {
  Stream s = Stream::keyed(35, StreamTag::kOracle);
  const DiscreteMeasure big = random_uniform_measure(s, 9, 3);
  CHECK_THROWS_AS(brute_force_w1(big, big, make_cost(0.0)), Error);

  DiscreteMeasure nonuni = random_uniform_measure(s, 3, 3);
  nonuni.weights = {0.5, 0.25, 0.25};
  const DiscreteMeasure uni = random_uniform_measure(s, 3, 3);
  CHECK_THROWS_AS(brute_force_w1(nonuni, uni, make_cost(0.0)), Error);

  // Capacity limit on the main solver.
  const DiscreteMeasure m12 = random_uniform_measure(s, 12, 3);
  CHECK_THROWS_AS(w1(m12, m12, make_cost(0.0), 10), Error);
}

TEST_CASE("dual certificates") {
  Stream s = Stream::keyed(36, StreamTag::kOracle);

  // Optimal couplings certify a negligible gap.
  for (int rep = 0; rep < 50; ++rep) {
    const DiscreteMeasure mu = random_uniform_measure(s, 6, 3);
    const DiscreteMeasure nu = random_uniform_measure(s, 6, 3);
    const OtResult ot = w1(mu, nu, make_cost(0.0));
    const DualCertificate cert = dual_check(mu, nu, ot.coupling, make_cost(0.0));
    CHECK(cert.tight);
    CHECK(cert.primal == doctest::Approx(ot.value).epsilon(1e-12));
    CHECK(std::abs(cert.gap) <= 1e-9);
  }

  // mu = nu with the diagonal coupling: zero everywhere.
  const DiscreteMeasure m = random_uniform_measure(s, 4, 3);
  const OtResult self = w1(m, m, make_cost(0.0));
  const DualCertificate cert = dual_check(m, m, self.coupling, make_cost(0.0));
  CHECK(cert.primal == 0.0);
  CHECK(cert.dual == doctest::Approx(0.0));
  CHECK(std::abs(cert.gap) <= 1e-12);

  // A deliberately crossed coupling on two separated atoms: weak duality
  // leaves a strictly positive gap.
  DiscreteMeasure mu, nu;
  mu.dim = nu.dim = 3;
  mu.points = {pp({0, 0, 0}, {0, 0, 0}), pp({1, 0, 0}, {0, 0, 0})};
  nu.points = {pp({0.1, 0, 0}, {0, 0, 0}), pp({1.1, 0, 0}, {0, 0, 0})};
  mu.weights = nu.weights = {0.5, 0.5};
  Coupling crossed;
  crossed.entries = {{0, 1, 0.5}, {1, 0, 0.5}};
  const DualCertificate bad = dual_check(mu, nu, crossed, make_cost(0.0));
  CHECK(bad.primal > bad.dual);
  CHECK(bad.gap > 0.1);

  // Infeasible couplings are rejected.
  Coupling infeasible;
  infeasible.entries = {{0, 0, 1.0}};
  CHECK_THROWS_AS(dual_check(mu, nu, infeasible, make_cost(0.0)), Error);
}

TEST_CASE("measure validation") {
  DiscreteMeasure m;
  m.dim = 3;
  m.points = {pp({0, 0, 0}, {0, 0, 0})};
  m.weights = {0.5};
  CHECK_THROWS_AS(m.validate(), Error);
  m.weights = {1.0};
  m.validate();
}
