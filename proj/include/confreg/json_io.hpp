#pragma once

#include "confreg/calibration.hpp"
#include "confreg/problem.hpp"

#include "json.hpp"

namespace confreg {

using Json = nlohmann::json;

/// Non-finite entries are written as the strings "inf", "-inf", "nan".
Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const ConstraintSet& c);
Json to_json(const ProblemSpec& s);
Json to_json(const ThresholdRule& t);

Vector vector_from_json(const Json& j, const char* what);
Matrix matrix_from_json(const Json& j, const char* what);
ConstraintSet constraints_from_json(const Json& j, Eigen::Index p);
/// {"K": [[...]], "H": [[...]], "constraints": {...}}; validated.
ProblemSpec spec_from_json(const Json& j);

/// Parses text; ParseError on malformed input.
Json parse_json(const std::string& text);

}  // namespace confreg
