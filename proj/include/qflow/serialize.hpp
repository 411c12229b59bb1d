#pragma once

#include <json.hpp>

#include "qflow/fock.hpp"

namespace qflow {

inline constexpr const char* kOperatorSchema = "qflow.operator/1";

/// Row-major nested arrays.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

/// {"schema", "d", "k", "N", "rows", "cols", "data": [re, im, re, im, ...]}
/// with entries in row-major order.
nlohmann::json operator_to_json(const TruncatedOperator& op);

/// Rebuilds the model space from (d, k, N) and attaches the stored matrix.
TruncatedOperator operator_from_json(const nlohmann::json& j);

}  // namespace qflow
