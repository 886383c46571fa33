#pragma once

// JSON forms of the public types. Parsing errors throw PreconditionError with
// the offending field path in the message.

#include <nlohmann/json.hpp>

#include <string>

#include "ll1/admm.hpp"
#include "ll1/dca.hpp"
#include "ll1/verification.hpp"

namespace ll1 {

using json = nlohmann::json;

/// {"g":"g1","params":{},"domain":"box01","type":"B"}
json to_json(const GSpec& g);
/// Accepts the full form above; "domain" and "type" may be omitted (catalog defaults).
GSpec gspec_from_json(const json& j, const std::string& where = "g");

json to_json(const SolverConfig& c);
SolverConfig solver_config_from_json(const json& j, const std::string& where = "config");
json to_json(const DcaConfig& c);
DcaConfig dca_config_from_json(const json& j, const std::string& where = "config");

/// rel_err only when present; x and traces on request.
json to_json(const SolveResult& r, bool include_x = false, bool include_traces = false);

json to_json(const L0Certificate& c);
L0Certificate certificate_from_json(const json& j);

json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j, const std::string& where);

/// Shortest round-trip decimal form of v ("nan", "inf", "-inf" for non-finite).
std::string format_double(double v);

}  // namespace ll1
