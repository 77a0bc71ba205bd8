#include "trunclr/serialization.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "trunclr/errors.hpp"

namespace trunclr {

Json endpoint_to_json(double v) {
  if (std::isinf(v)) return v < 0 ? Json("-inf") : Json("inf");
  return Json(v);
}

double endpoint_from_json(const Json& j) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "-inf") return -inf;
    if (s == "inf" || s == "+inf") return inf;
  }
  throw SchemaError("interval endpoint must be a number, \"-inf\" or \"inf\", got " + j.dump());
}

Json interval_union_to_json(const IntervalUnion& s) {
  Json out = Json::array();
  for (const auto& p : s.pieces()) out.push_back(Json::array({endpoint_to_json(p.lo), endpoint_to_json(p.hi)}));
  return out;
}

IntervalUnion interval_union_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("interval union must be a list of [lo, hi] pairs");
  std::vector<Interval> raw;
  raw.reserve(j.size());
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2) {
      throw SchemaError("interval union entry must be a [lo, hi] pair, got " + pair.dump());
    }
    raw.push_back({endpoint_from_json(pair[0]), endpoint_from_json(pair[1])});
  }
  try {
    return IntervalUnion::normalize(raw);
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("expected a list of numbers, got " + j.dump());
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SchemaError("expected a number, got " + j[i].dump());
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("expected a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)]);
    if (r == 0) m.resize(rows, row.size());
    if (row.size() != m.cols()) throw SchemaError("matrix rows have unequal lengths");
    m.row(r) = row.transpose();
  }
  return m;
}

}  // namespace trunclr
