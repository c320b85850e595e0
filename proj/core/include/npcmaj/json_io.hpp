#pragma once

#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "npcmaj/barycenter.hpp"
#include "npcmaj/inequalities.hpp"
#include "npcmaj/linalg.hpp"
#include "npcmaj/measure1d.hpp"
#include "npcmaj/space.hpp"
#include "npcmaj/stochastic.hpp"
#include "npcmaj/wasserstein.hpp"

namespace npcmaj {

using Json = nlohmann::json;

/// Parses JSON text; syntax errors become ParseError with "line L, column C".
Json parse_json_text(const std::string& text);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

Json to_json(const Space& s);
/// Accepts {"kind": ...} objects and the compact "euclidean:2" string form.
Space space_from_json(const Json& j);

Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const char* what = "matrix");

Json to_json(const Measure1D& m);
Measure1D measure1d_from_json(const Json& j);

Json to_json(const Point& p);
/// Decodes `j` as an element of `space` (shape only; validity is checked by the caller).
Point point_from_json(const Space& space, const Json& j);

std::vector<double> vector_from_json(const Json& j, const char* what);

Json to_json(const BarycenterResult& r);
Json to_json(const MajorizationCertificate& c);
Json to_json(const BirkhoffDecomposition& d);
Json to_json(const Coupling& c);
Json to_json(const CheckReport& r);

/// Header plus one row per report: functional, space, trials, violations, worst_slack, seeds.
std::string reports_to_csv(std::span<const CheckReport> reports);

}  // namespace npcmaj
