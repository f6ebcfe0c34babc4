#include "confreg/json_io.hpp"

#include "confreg/errors.hpp"

#include <cmath>
#include <limits>

namespace confreg {

namespace {

Json number(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  return d;
}

double read_number(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
  }
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  throw Error(ErrorCode::ParseError, std::string(what) + ": expected a number");
}

}  // namespace

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    a.push_back(row);
  }
  return a;
}

Json to_json(const ConstraintSet& c) {
  return std::visit(
      [&](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NonNegative>) {
          return {{"type", "nonnegative"}};
        } else if constexpr (std::is_same_v<T, LinearInequality>) {
          return {{"type", "linear"}, {"A", to_json(v.A)}, {"b", to_json(v.b)}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return {{"type", "box"}, {"lo", to_json(v.lo)}, {"up", to_json(v.up)}};
        } else {
          if (v.A.rows() == 0) return {{"type", "none"}};
          return {{"type", "cone"}, {"A", to_json(v.A)}};
        }
      },
      c.variant());
}

Json to_json(const ProblemSpec& s) {
  return {{"K", to_json(s.K)}, {"H", to_json(s.H)}, {"constraints", to_json(s.constraints)}};
}

Json to_json(const ThresholdRule& t) {
  Json j = {{"delta", number(t.delta)},
            {"provenance", to_string(t.provenance)},
            {"std_error", number(t.std_error)},
            {"n_samples", t.n_samples}};
  if (t.points_evaluated > 0) j["points_evaluated"] = t.points_evaluated;
  if (t.argmax.size() > 0) j["argmax"] = to_json(t.argmax);
  if (t.budget_exceeded) j["budget_exceeded"] = true;
  return j;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = read_number(j[i], what);
  return v;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + ": expected an array of rows");
  if (j.empty()) return Matrix(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw Error(ErrorCode::ParseError, std::string(what) + ": rows must be arrays of equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = read_number(j[i][c], what);
  }
  return m;
}

ConstraintSet constraints_from_json(const Json& j, Eigen::Index p) {
  const std::size_t up = static_cast<std::size_t>(p);
  if (j.is_null()) return ConstraintSet::none(up);
  if (j.is_string()) return constraints_from_json(Json{{"type", j.get<std::string>()}}, p);
  if (!j.is_object() || !j.contains("type")) throw Error(ErrorCode::ParseError, "constraints: expected {\"type\": ...}");
  const std::string type = j.at("type").get<std::string>();
  if (type == "nonnegative") return ConstraintSet::nonnegative(up);
  if (type == "none") return ConstraintSet::none(up);
  if (type == "linear") {
    Matrix A = matrix_from_json(j.at("A"), "constraints.A");
    if (A.rows() == 0) A = Matrix(0, p);
    return ConstraintSet(LinearInequality{A, vector_from_json(j.at("b"), "constraints.b")});
  }
  if (type == "box") {
    const Vector lo = j.contains("lo") ? vector_from_json(j.at("lo"), "constraints.lo")
                                       : Vector::Constant(p, -std::numeric_limits<double>::infinity());
    const Vector hi = j.contains("up") ? vector_from_json(j.at("up"), "constraints.up")
                                       : Vector::Constant(p, std::numeric_limits<double>::infinity());
    return ConstraintSet(Box{lo, hi});
  }
  if (type == "cone") {
    Matrix A = matrix_from_json(j.at("A"), "constraints.A");
    if (A.rows() == 0) A = Matrix(0, p);
    return ConstraintSet(PolyhedralCone{A});
  }
  throw Error(ErrorCode::UnsupportedConstraint, "constraints: unknown type '" + type + "'");
}

ProblemSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "spec: expected an object");
  if (!j.contains("K") || !j.contains("H")) throw Error(ErrorCode::ParseError, "spec: K and H are required");
  ProblemSpec s;
  s.K = matrix_from_json(j.at("K"), "K");
  s.H = matrix_from_json(j.at("H"), "H");
  s.constraints = constraints_from_json(j.contains("constraints") ? j.at("constraints") : Json(), s.K.cols());
  s.validate();
  return s;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("json: ") + e.what());
  }
}

}  // namespace confreg
