#include "enskog/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace enskog {

namespace {

// Kronrod-15 abscissae on the positive half (symmetric) and weights, with
// the embedded Gauss-7 weights on the odd-indexed nodes. QUADPACK constants.
constexpr double xgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double wgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Interval {
  double a, b;
  double kronrod;
  double err;
};

bool operator<(const Interval& x, const Interval& y) { return x.err < y.err; }

Interval gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * xgk[i]);
    fv[14 - i] = f(c + h * xgk[i]);
  }
  fv[7] = f(c);
  double resk = wgk[7] * fv[7];
  double resg = wg[3] * fv[7];
  for (int i = 0; i < 7; ++i) resk += wgk[i] * (fv[i] + fv[14 - i]);
  for (int i = 0; i < 3; ++i) resg += wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  return {a, b, resk * h, std::abs((resk - resg) * h)};
}

}  // namespace

// Worst-interval-first refinement: split the interval carrying the largest
// error estimate until the total drops below abs_tol. Steep-but-smooth
// integrands refine locally instead of starving a per-branch budget.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  std::priority_queue<Interval> queue;
  queue.push(gk15(f, a, b));
  double total_err = queue.top().err;
  const std::size_t max_intervals =
      static_cast<std::size_t>(64) * static_cast<std::size_t>(std::max(1, max_depth));
  std::size_t splits = 0;
  while (total_err > abs_tol && splits < max_intervals) {
    const Interval worst = queue.top();
    const double width = worst.b - worst.a;
    if (width <= 8.0 * std::numeric_limits<double>::epsilon() *
                     (std::abs(worst.a) + std::abs(worst.b)))
      break;  // roundoff floor reached
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Interval left = gk15(f, worst.a, mid);
    const Interval right = gk15(f, mid, worst.b);
    total_err += left.err + right.err - worst.err;
    queue.push(left);
    queue.push(right);
    ++splits;
  }
  double sum = 0.0;
  std::vector<double> parts;
  parts.reserve(queue.size());
  while (!queue.empty()) {
    parts.push_back(queue.top().kronrod);
    queue.pop();
  }
  // Deterministic small-to-large accumulation.
  std::sort(parts.begin(), parts.end(),
            [](double x, double y) { return std::abs(x) < std::abs(y); });
  for (double p : parts) sum += p;
  return sum;
}

}  // namespace enskog
