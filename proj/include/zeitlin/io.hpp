#pragma once

#include <iosfwd>
#include <set>
#include <string>

#include <json.hpp>

#include "zeitlin/algebra.hpp"
#include "zeitlin/dynamics.hpp"
#include "zeitlin/stability.hpp"
#include "zeitlin/steady.hpp"

namespace zeitlin {

using json = nlohmann::json;

// Scalars that may be +-infinity are stored as the strings "inf" / "-inf";
// everything finite stays a plain JSON number.
json number_to_json(double v);
double number_from_json(const json& j, const std::string& what);

json matrix_to_json(const cmat& m);
cmat matrix_from_json(const json& j, const std::string& what);

json steady_to_json(const SteadyState& state);
// Reads the matrices verbatim and revalidates through make_steady_state, so
// a tampered or non-steady file is rejected with InputError.
SteadyState steady_from_json(const SpinBasis& basis, const json& j);

json certificate_to_json(const StabilityCertificate& cert);
StabilityCertificate certificate_from_json(const json& j);

json rigidity_to_json(const RigidityReport& report);

json tolerances_to_json(const Tolerances& tol);

// Monitor CSV: 17-significant-digit values, LF endings, one row per record
// entry starting with the initial state.
std::string format_g17(double v);
void write_monitor_header(std::ostream& os, int casimir_max);
void write_monitor_row(std::ostream& os, const TrajectoryRecord& rec, int i);
void write_trajectory_csv(const std::string& path,
                          const TrajectoryRecord& rec);

void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

// Strict config surface: every present key must be in `allowed`.
void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& context);

}  // namespace zeitlin
