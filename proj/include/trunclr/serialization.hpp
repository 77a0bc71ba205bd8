#pragma once

#include <nlohmann/json.hpp>

#include "trunclr/interval_union.hpp"
#include "trunclr/synthetic_model.hpp"

namespace trunclr {

using Json = nlohmann::ordered_json;

/// [[lo, hi], ...] with "-inf" / "inf" strings for unbounded endpoints.
Json interval_union_to_json(const IntervalUnion& s);
/// Accepts the form above; throws SchemaError on malformed input.
IntervalUnion interval_union_from_json(const Json& j);

/// Endpoint value: a number or one of the strings "-inf", "inf".
Json endpoint_to_json(double v);
double endpoint_from_json(const Json& j);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

}  // namespace trunclr
