#pragma once

#include "gce/conformance.hpp"
#include "gce/graded.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace gce {

// Points in text: a state name ("x1"), a set ("{x1,x2}", "{}") or a distribution ("{x:1/2,y:1/2}").
std::size_t parse_point(const DetSystem& det, std::string_view text);

// "A <= B", "d(A, B) <= 1/2", "A ~> B", "A ~> [B, C]".
Claim parse_claim(const DetSystem& det, std::string_view text);
// Claims separated by ';'.
std::vector<Claim> parse_claims(const DetSystem& det, std::string_view text);
std::string format_claim(const DetSystem& det, const Claim& c);

// {"kind": "pair"|"bounded"|"nearness", "lhs", "rhs", "eps"} or {"kind": "nearness", "point", "targets"};
// points are state names, arrays of state names, or {state: "p/q"} objects.
std::size_t point_from_json(const DetSystem& det, const nlohmann::json& j);
nlohmann::json point_to_json(const DetSystem& det, std::size_t point);
Claim claim_from_json(const DetSystem& det, const nlohmann::json& j);
nlohmann::json claim_to_json(const DetSystem& det, const Claim& c);

}  // namespace gce
