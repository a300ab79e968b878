#pragma once

#include <string>

#include "json.hpp"
#include "polylearn/bimatrix.hpp"
#include "polylearn/geometry.hpp"
#include "polylearn/labelling.hpp"
#include "polylearn/multiplayer.hpp"
#include "polylearn/partition.hpp"

namespace polylearn {

using Json = nlohmann::ordered_json;

Json to_json(const Point& x);
Point point_from_json(const Json& j);
Json to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j);
Json to_json(const VPolytope& p);
Json to_json(const HPolytope& p);

// {"m", "n", "A", "b"}
Json to_json(const Uepp& u);
Uepp uepp_from_json(const Json& j);

// {"A", "B"}; entries must lie in [0, 1].
Json to_json(const BimatrixGame& g);
BimatrixGame bimatrix_from_json(const Json& j);

// {"n", "k", "u"}, u flat by (player, profile).
Json to_json(const NormalFormGame& g);
NormalFormGame normal_form_from_json(const Json& j);

// {"m", "n", "points": {"label": [[...]]}, "merges": [[i, j]]}, points keyed by raw label.
Json to_json(const EmpiricalLabelling& l);
EmpiricalLabelling labelling_from_json(const Json& j);

Json to_json(const CoverageReport& r);
Json to_json(const WsneCertificate& c);
Json to_json(const MultiplayerCertificate& c);

// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
// Canonical text of a JSON document (two-space indent, trailing newline).
std::string dump(const Json& j);

Json read_json_file(const std::string& path);
// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace polylearn
