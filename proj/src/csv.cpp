#include "enskog/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "enskog/error.hpp"

namespace enskog {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorKind::kIo, "cannot open for writing: " + path);
  return f;
}

void phase_header(std::ostream& os, std::size_t d) {
  for (std::size_t k = 1; k <= d; ++k) os << ",r" << k;
  for (std::size_t k = 1; k <= d; ++k) os << ",v" << k;
}

void phase_row(std::ostream& os, const Vec& r, const Vec& v) {
  for (std::size_t k = 0; k < r.size(); ++k) os << ',' << fmt17(r[k]);
  for (std::size_t k = 0; k < v.size(); ++k) os << ',' << fmt17(v[k]);
}

}  // namespace

void write_snapshots_csv(const std::string& path,
                         const std::vector<Ensemble>& snapshots) {
  std::ofstream f = open_out(path);
  const std::size_t d = snapshots.empty() ? 3 : snapshots.front().dim;
  f << "t,particle_id";
  phase_header(f, d);
  f << '\n';
  for (const Ensemble& e : snapshots) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      f << fmt17(e.time) << ',' << e.labels[i];
      phase_row(f, e.particles[i].r, e.particles[i].v);
      f << '\n';
    }
  }
}

void write_measure_csv(const std::string& path, const DiscreteMeasure& m) {
  std::ofstream f = open_out(path);
  f << "weight";
  phase_header(f, m.dim);
  f << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    f << fmt17(m.weights[i]);
    phase_row(f, m.points[i].r, m.points[i].v);
    f << '\n';
  }
}

DiscreteMeasure read_measure_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::kIo, "cannot open measure file: " + path);
  std::string line;
  if (!std::getline(f, line)) fail(ErrorKind::kIo, "empty measure file: " + path);
  // Infer dimension from the header column count: 1 + 2d.
  std::size_t cols = 1;
  for (char c : line)
    if (c == ',') ++cols;
  if (cols < 7 || cols % 2 == 0)
    fail(ErrorKind::kIo, "malformed measure header in " + path);
  const std::size_t d = (cols - 1) / 2;

  DiscreteMeasure m;
  m.dim = d;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != cols) fail(ErrorKind::kIo, "malformed measure row in " + path);
    PhasePoint p{Vec(d), Vec(d)};
    for (std::size_t k = 0; k < d; ++k) p.r[k] = vals[1 + k];
    for (std::size_t k = 0; k < d; ++k) p.v[k] = vals[1 + d + k];
    m.weights.push_back(vals[0]);
    m.points.push_back(p);
  }
  m.validate();
  return m;
}

void write_distance_csv(const std::string& path, const std::vector<DistanceRow>& rows) {
  std::ofstream f = open_out(path);
  f << "t,w1_shifted,primal,dual,gap\n";
  for (const DistanceRow& r : rows)
    f << fmt17(r.t) << ',' << fmt17(r.w1_shifted) << ',' << fmt17(r.primal) << ','
      << fmt17(r.dual) << ',' << fmt17(r.gap) << '\n';
}

void write_stability_csv(const std::string& path, const StabilityReport& report) {
  std::ofstream f = open_out(path);
  f << "t,w1_shifted,majorant,c_gamma_mu,c_gamma_nu,lambda,second_moment\n";
  for (const StabilityPoint& p : report.series)
    f << fmt17(p.t) << ',' << fmt17(p.w1_shifted) << ',' << fmt17(p.majorant) << ','
      << fmt17(p.c_gamma_mu) << ',' << fmt17(p.c_gamma_nu) << ',' << fmt17(p.lambda)
      << ',' << fmt17(p.second_moment) << '\n';
}

void write_audit_csv(const std::string& path, const std::vector<AuditReport>& reports) {
  std::ofstream f = open_out(path);
  f << "family,samples,max_ratio,violations\n";
  for (const AuditReport& r : reports)
    f << to_string(r.family) << ',' << r.samples << ',' << fmt17(r.max_ratio) << ','
      << r.violations << '\n';
}

}  // namespace enskog
