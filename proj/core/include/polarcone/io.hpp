#pragma once

// JSON and CSV formats.
//
// StickyState:   {"atoms":[...],"weights":[...],"X0":[...],"V0":[...]}
// Grid:          {"lo":[...],"hi":[...],"n":[...]}
// Problem:       {"grid":{...},"F":{"atoms":[[x,y],...],"vectors":[[fx,fy],...]},
//                 "H":{"cells":[[h11,h12,h22],...]},"gamma":...,
//                 "include_identity_row":true}
// Result:        RecoveryResult fields plus {"M":{"cells":[[m11,m12,m22],...]}}
// Trajectory:    CSV  t,index,X,V,block_id
// Stress dump:   CSV  cell_i,cell_j,m11,m12,m22 (d=2) / cell,m (d=1)

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polarcone/cone.hpp"
#include "polarcone/stress.hpp"

namespace polarcone::io {

using json = nlohmann::json;

json to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const json& j);

json to_json(const StickyState& s);
StickyState sticky_state_from_json(const json& j);

json to_json(const PolarCertificate1D& c);

json to_json(const Grid& g);
Grid grid_from_json(const json& j);

json to_json(const VectorMeasure& f);
VectorMeasure vector_measure_from_json(const json& j, int dim);

json to_json(const MatrixMeasureField& m);
MatrixMeasureField matrix_field_from_json(const json& j, int dim);

json to_json(const RepresentationProblem& p, std::optional<double> gamma = std::nullopt);
RepresentationProblem problem_from_json(const json& j);

json to_json(const RecoveryResult& r);
RecoveryResult recovery_result_from_json(const json& j);

json to_json(const VerificationReport& r);

FlowData flow_from_json(const json& j);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

/// Appends trajectory rows for one instant.
void write_trajectory_header(std::ostream& os);
void write_trajectory_rows(std::ostream& os, double t, const StickySnapshot& snap);

void write_stress_csv(std::ostream& os, const Grid& grid, const MatrixMeasureField& m);

/// Shortest round-trip representation of a double.
std::string format_double(double x);

}  // namespace polarcone::io
