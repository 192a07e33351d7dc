#pragma once

#include <string>
#include <vector>

#include "enskog/analysis.hpp"
#include "enskog/particle_system.hpp"
#include "enskog/transport_metrics.hpp"

namespace enskog {

// All floating output uses 17 significant digits so byte-identical reruns
// are meaningful and values round-trip exactly.
std::string fmt17(double x);

// Snapshot export: header t,particle_id,r1..rd,v1..vd, one row per particle
// per snapshot.
void write_snapshots_csv(const std::string& path,
                         const std::vector<Ensemble>& snapshots);

// Measure files: header weight,r1..rd,v1..vd.
void write_measure_csv(const std::string& path, const DiscreteMeasure& m);
DiscreteMeasure read_measure_csv(const std::string& path);

// Distance report: t,w1_shifted,primal,dual,gap.
struct DistanceRow {
  double t, w1_shifted, primal, dual, gap;
};
void write_distance_csv(const std::string& path, const std::vector<DistanceRow>& rows);

// Stability report: t,w1_shifted,majorant,c_gamma_mu,c_gamma_nu,lambda,second_moment.
void write_stability_csv(const std::string& path, const StabilityReport& report);

// Audit report: family,samples,max_ratio,violations.
void write_audit_csv(const std::string& path, const std::vector<AuditReport>& reports);

}  // namespace enskog
