#pragma once

// JSON schemas (all versioned with "schema": 1) and CSV emission.
//
//   measure   {"schema":1, "dim":n, "atoms":[[x_1..x_n, mass], ...]}
//             or {"dim":1, "dirac":[x]} / {"dim":1, "uniform":{"a":0,"b":1,"atoms":200}}
//   lifted    {"schema":1, "dim":n, "atoms":[[x_1..x_n, v_1..v_n, mass], ...]}
//   pvf       {"schema":1, "kind":"median_split", "params":{...}}
//   kernel    {"schema":1, "kind":"linear", "alpha":1, "h1_constant":1}
//   particles {"schema":1, "dim":n, "positions":[[...], ...]}
//
// A top-level "paper_ref" string is accepted and ignored everywhere.

#include "mdelab/las.hpp"
#include "mdelab/measure.hpp"
#include "mdelab/particles.hpp"
#include "mdelab/pvf.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mdelab::io {

using nlohmann::json;

json read_json_file(const std::string& path);

DiscreteMeasure measure_from_json(const json& j);
json to_json(const DiscreteMeasure& mu);

LiftedMeasure lifted_from_json(const json& j);
json to_json(const LiftedMeasure& V);

VelocityField field_from_json(const json& j);
InteractionKernel kernel_from_json(const json& j);
PvfSpec pvf_from_json(const json& j);

ParticleState particles_from_json(const json& j);

/// 17 significant digits, '.' decimal, locale independent.
std::string format_double(double x);

/// Rows t, atom_id, x_1..x_n, mass for each requested time.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<double>& times);
json trajectory_json(const Trajectory& traj, const std::vector<double>& times);

/// {"error": kind, "message": ..., "field": ...}
std::string error_json(const std::string& kind, const std::string& message, const std::string& field);

}  // namespace mdelab::io
