#include "enskog/transport_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "enskog/error.hpp"

namespace enskog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool uniform_equal_size(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.size() != nu.size()) return false;
  const double w = 1.0 / static_cast<double>(mu.size());
  for (double x : mu.weights)
    if (std::abs(x - w) > 1e-15) return false;
  for (double x : nu.weights)
    if (std::abs(x - w) > 1e-15) return false;
  return true;
}

// Shortest-augmenting-path assignment (Jonker-Volgenant style), O(n^3).
// Returns row -> column matching for the dense cost matrix.
std::vector<int> solve_assignment(const std::vector<double>& cost, int n) {
  std::vector<double> pot_u(n + 1, 0.0), pot_v(n + 1, 0.0), minv(n + 1);
  std::vector<int> way(n + 1, 0), matched_row(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    matched_row[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = matched_row[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur =
            cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - pot_u[i0] - pot_v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          pot_u[matched_row[j]] += delta;
          pot_v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (matched_row[j0] != 0);
    do {
      const int j1 = way[j0];
      matched_row[j0] = matched_row[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (matched_row[j] > 0) row_to_col[matched_row[j] - 1] = j - 1;
  return row_to_col;
}

OtResult w1_uniform(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const CostFn& cost) {
  const int n = static_cast<int>(mu.size());
  std::vector<double> c(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c[static_cast<std::size_t>(i) * n + j] = cost(mu.points[i], nu.points[j]);
  const std::vector<int> match = solve_assignment(c, n);
  OtResult out;
  double total = 0.0;
  const double w = 1.0 / static_cast<double>(n);
  out.coupling.entries.reserve(n);
  for (int i = 0; i < n; ++i) {
    total += c[static_cast<std::size_t>(i) * n + match[i]];
    out.coupling.entries.push_back(
        {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(match[i]), w});
  }
  out.value = total / static_cast<double>(n);
  return out;
}

// Successive shortest paths with Johnson potentials on the dense bipartite
// graph; exact for general nonnegative weights. Augmentations saturate a
// supply, a demand, or drain a residual arc each round.
OtResult w1_general(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const CostFn& cost) {
  const std::size_t n = mu.size(), m = nu.size();
  if (n * m > std::size_t(4) * 1024 * 1024)
    fail(ErrorKind::kCapacity, "w1: general-weight instance too large");
  std::vector<double> c(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c[i * m + j] = cost(mu.points[i], nu.points[j]);

  std::vector<double> supply = mu.weights, demand = nu.weights;
  std::vector<double> flow(n * m, 0.0);
  std::vector<double> pot(n + m, 0.0);  // left: 0..n-1, right: n..n+m-1

  const std::size_t v_count = n + m;
  std::vector<double> dist(v_count);
  std::vector<int> prev(v_count);
  std::vector<char> done(v_count);

  const double total_mass = 1.0;
  double shipped = 0.0;
  std::size_t guard = 16 * (n + m) + 64;
  while (shipped < total_mass - 1e-14 && guard-- > 0) {
    // Dijkstra from all supply nodes with remaining mass.
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(prev.begin(), prev.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < n; ++i)
      if (supply[i] > 1e-15) dist[i] = 0.0;
    for (;;) {
      std::size_t best = v_count;
      double bd = kInf;
      for (std::size_t u = 0; u < v_count; ++u)
        if (!done[u] && dist[u] < bd) {
          bd = dist[u];
          best = u;
        }
      if (best == v_count) break;
      done[best] = 1;
      if (best < n) {
        const std::size_t i = best;
        for (std::size_t j = 0; j < m; ++j) {
          const double rc = std::max(0.0, c[i * m + j] + pot[i] - pot[n + j]);
          if (dist[i] + rc < dist[n + j]) {
            dist[n + j] = dist[i] + rc;
            prev[n + j] = static_cast<int>(i);
          }
        }
      } else {
        const std::size_t j = best - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (flow[i * m + j] <= 0.0) continue;
          const double rc = std::max(0.0, -c[i * m + j] + pot[n + j] - pot[i]);
          if (dist[n + j] + rc < dist[i]) {
            dist[i] = dist[n + j] + rc;
            prev[i] = static_cast<int>(n + j);
          }
        }
      }
    }
    // Cheapest reachable right node with unmet demand.
    std::size_t sink = v_count;
    double bd = kInf;
    for (std::size_t j = 0; j < m; ++j)
      if (demand[j] > 1e-15 && dist[n + j] < bd) {
        bd = dist[n + j];
        sink = n + j;
      }
    if (sink == v_count)
      fail(ErrorKind::kInvalidArgument, "w1: no augmenting path (unbalanced?)");

    // Bottleneck along the path.
    double delta = demand[sink - n];
    for (std::size_t u = sink; prev[u] != -1;) {
      const std::size_t p = static_cast<std::size_t>(prev[u]);
      if (u >= n) {
        // forward arc p -> u, unlimited capacity
      } else {
        delta = std::min(delta, flow[u * m + (p - n)]);
      }
      u = p;
      if (prev[u] == -1 && u < n) delta = std::min(delta, supply[u]);
    }
    // Apply.
    for (std::size_t u = sink; prev[u] != -1;) {
      const std::size_t p = static_cast<std::size_t>(prev[u]);
      if (u >= n)
        flow[p * m + (u - n)] += delta;
      else
        flow[u * m + (p - n)] -= delta;
      u = p;
      if (prev[u] == -1 && u < n) supply[u] -= delta;
    }
    demand[sink - n] -= delta;
    shipped += delta;
    for (std::size_t u = 0; u < v_count; ++u)
      if (dist[u] < kInf) pot[u] += dist[u];
  }
  if (shipped < total_mass - 1e-12)
    fail(ErrorKind::kInvalidArgument, "w1: solver failed to ship all mass");

  OtResult out;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (flow[i * m + j] > 0.0) {
        total += flow[i * m + j] * c[i * m + j];
        out.coupling.entries.push_back({static_cast<std::uint32_t>(i),
                                        static_cast<std::uint32_t>(j),
                                        flow[i * m + j]});
      }
  out.value = total;
  return out;
}

}  // namespace

void DiscreteMeasure::validate() const {
  if (points.size() != weights.size())
    fail(ErrorKind::kInvalidArgument, "measure: points/weights size mismatch");
  if (points.empty()) fail(ErrorKind::kInvalidArgument, "measure: empty support");
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) fail(ErrorKind::kInvalidArgument, "measure: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12)
    fail(ErrorKind::kInvalidArgument, "measure: weights must sum to 1");
  for (const PhasePoint& p : points)
    if (p.r.size() != dim || p.v.size() != dim)
      fail(ErrorKind::kInvalidArgument, "measure: point dimension mismatch");
}

double Coupling::marginal_error(const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu) const {
  std::vector<double> row(mu.size(), 0.0), col(nu.size(), 0.0);
  for (const CouplingEntry& e : entries) {
    row[e.i] += e.w;
    col[e.j] += e.w;
  }
  double err = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    err = std::max(err, std::abs(row[i] - mu.weights[i]));
  for (std::size_t j = 0; j < nu.size(); ++j)
    err = std::max(err, std::abs(col[j] - nu.weights[j]));
  return err;
}

double cost_t(const PhasePoint& p, const PhasePoint& q, double t) {
  if (p.r.size() != q.r.size() || p.v.size() != q.v.size())
    fail(ErrorKind::kInvalidArgument, "cost_t: dimension mismatch");
  const Vec dr = (p.r - p.v * t) - (q.r - q.v * t);
  const Vec dv = p.v - q.v;
  return dr.norm() + dv.norm();
}

DiscreteMeasure shift_measure(const DiscreteMeasure& m, double t) {
  DiscreteMeasure out = m;
  for (PhasePoint& p : out.points) p.r -= p.v * t;
  return out;
}

OtResult w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
            const CostFn& cost, std::size_t max_support) {
  mu.validate();
  nu.validate();
  if (mu.dim != nu.dim) fail(ErrorKind::kInvalidArgument, "w1: dimension mismatch");
  if (mu.size() > max_support || nu.size() > max_support)
    fail(ErrorKind::kCapacity, "w1: support exceeds configured maximum");
  if (uniform_equal_size(mu, nu)) return w1_uniform(mu, nu, cost);
  return w1_general(mu, nu, cost);
}

OtResult w1_shifted(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    double t, std::size_t max_support) {
  OtResult a = w1(mu, nu, make_cost(t), max_support);
  const OtResult b =
      w1(shift_measure(mu, t), shift_measure(nu, t), make_cost(0.0), max_support);
  if (std::abs(a.value - b.value) > 1e-10 * std::max(1.0, std::abs(a.value)))
    fail(ErrorKind::kInvalidArgument,
         "w1_shifted: route disagreement beyond tolerance");
  return a;
}

double brute_force_w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      const CostFn& cost) {
  mu.validate();
  nu.validate();
  if (!uniform_equal_size(mu, nu))
    fail(ErrorKind::kInvalidArgument,
         "brute_force_w1: requires equal-size uniform supports");
  const std::size_t n = mu.size();
  if (n > 8) fail(ErrorKind::kCapacity, "brute_force_w1: n must be <= 8");
  std::vector<double> c(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = cost(mu.points[i], nu.points[j]);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += c[i * n + perm[i]];
    if (total < best) best = total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

DualCertificate dual_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const Coupling& coupling, const CostFn& cost) {
  mu.validate();
  nu.validate();
  if (coupling.marginal_error(mu, nu) > 1e-10)
    fail(ErrorKind::kInvalidArgument, "dual_check: coupling marginals infeasible");
  for (const CouplingEntry& e : coupling.entries)
    if (e.i >= mu.size() || e.j >= nu.size() || e.w < -1e-15)
      fail(ErrorKind::kInvalidArgument, "dual_check: malformed coupling entry");

  const std::size_t n = mu.size(), m = nu.size();
  const std::size_t v_count = n + m;
  auto point = [&](std::size_t u) -> const PhasePoint& {
    return u < n ? mu.points[u] : nu.points[u - n];
  };

  double primal = 0.0;
  for (const CouplingEntry& e : coupling.entries)
    primal += e.w * cost(mu.points[e.i], nu.points[e.j]);

  // Potential psi = shortest-path distances from a zero source over the
  // all-pairs Lipschitz edges plus the coupling's tight edges
  // (p_i -> q_j, weight -c_ij). If the tight edges create a negative cycle
  // the coupling is not optimal; fall back to the trivial potential.
  std::vector<double> psi(v_count, 0.0);
  bool tight = true;
  bool changed = true;
  for (std::size_t pass = 0; pass <= v_count && changed; ++pass) {
    changed = false;
    for (std::size_t a = 0; a < v_count; ++a)
      for (std::size_t b = 0; b < v_count; ++b) {
        if (a == b) continue;
        const double w = cost(point(a), point(b));
        if (psi[a] + w < psi[b] - 1e-15) {
          psi[b] = psi[a] + w;
          changed = true;
        }
      }
    for (const CouplingEntry& e : coupling.entries) {
      if (e.w <= 1e-15) continue;
      const double w = -cost(mu.points[e.i], nu.points[e.j]);
      if (psi[e.i] + w < psi[n + e.j] - 1e-15) {
        psi[n + e.j] = psi[e.i] + w;
        changed = true;
      }
    }
    if (pass == v_count && changed) tight = false;
  }
  if (!tight) std::fill(psi.begin(), psi.end(), 0.0);

  DualCertificate cert;
  cert.tight = tight;
  cert.primal = primal;
  cert.psi_mu.assign(psi.begin(), psi.begin() + n);
  cert.psi_nv.assign(psi.begin() + n, psi.end());
  double dual = 0.0;
  for (std::size_t i = 0; i < n; ++i) dual += mu.weights[i] * psi[i];
  for (std::size_t j = 0; j < m; ++j) dual -= nu.weights[j] * psi[n + j];
  cert.dual = dual;
  cert.gap = primal - dual;
  return cert;
}

DiscreteMeasure measure_from_ensemble(const Ensemble& e) {
  DiscreteMeasure m;
  m.dim = e.dim;
  m.points.reserve(e.size());
  const double w = 1.0 / static_cast<double>(e.size());
  for (const Particle& p : e.particles) m.points.push_back({p.r, p.v});
  m.weights.assign(e.size(), w);
  return m;
}

}  // namespace enskog
