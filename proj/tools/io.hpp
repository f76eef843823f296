#pragma once

// JSON and CSV plumbing for the command-line tool.

#include <json.hpp>
#include <optional>
#include <string>

#include "sspec/conditions.hpp"
#include "sspec/fracpow.hpp"
#include "sspec/qmatrix.hpp"
#include "sspec/scalc.hpp"
#include "sspec/slicefn.hpp"

namespace sspec::io {

using Json = nlohmann::ordered_json;

// Reads and parses a JSON file; ErrorKind::Parse on failure.
Json read_json(const std::string& path);
void write_text(const std::optional<std::string>& path, const std::string& text);

// {"m": m, "entries": [[w, x, y, z], ...]} row-major.
QMatrix matrix_from_json(const Json& j);
Json matrix_to_json(const QMatrix& T);
// {"m": m, "n": n, "entries": [[c_0, ..., c_{2^n - 1}], ...]} with components by blade mask.
Json mv_matrix_to_json(const MvMatrix& M);

// {"kind": ..., "params": {...}, "coefficients": [[w, x, y, z], ...]}
SliceFunction function_from_json(const Json& j);

Json spheres_to_json(const SphereSet& s);

struct FieldConfig {
  Coefficients a;
  BoxGrid box;
  RobinData robin;
  bool has_robin = false;
  UnboundedOptions unbounded;
};

// {"kind", "params"} for a uniform field or {"fields": [3 x {kind, params}]}, plus
// "box": {"L": [...], "N": [...]} and optional "robin" / "unbounded" blocks.
FieldConfig field_config_from_json(const Json& j);
CoefficientField coefficient_from_json(const Json& j, const std::array<double, 3>& L);

Json report_to_json(const ConditionReport& r);

// "ones", "random:SEED" or "mode:K" / "mode:top" (eigenvectors of the unit-coefficient
// composite Laplacian, ascending).
Eigen::VectorXd grid_vector(const std::string& spec, const BoxGrid& g);

// i,j,k,w,x,y,z per node.
std::string field_csv(const BoxGrid& g, const Eigen::VectorXd& v);
// step,t,i,j,k,v per node and step.
std::string trajectory_csv(const BoxGrid& g, const HeatTrajectory& tr);

}  // namespace sspec::io
