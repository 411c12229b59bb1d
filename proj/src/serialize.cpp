#include "qflow/serialize.hpp"

#include <sstream>

namespace qflow {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw InputError("matrix_from_json: expected a non-empty array of rows");
  }
  const std::size_t rows = j.size(), cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw InputError("matrix_from_json: ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

nlohmann::json operator_to_json(const TruncatedOperator& op) {
  nlohmann::json j;
  j["schema"] = kOperatorSchema;
  j["d"] = op.space->dim();
  j["k"] = op.space->level();
  j["N"] = op.space->truncation();
  j["rows"] = op.matrix.rows();
  j["cols"] = op.matrix.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(2 * op.matrix.size()));
  for (Eigen::Index r = 0; r < op.matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < op.matrix.cols(); ++c) {
      data.push_back(op.matrix(r, c).real());
      data.push_back(op.matrix(r, c).imag());
    }
  }
  j["data"] = std::move(data);
  return j;
}

TruncatedOperator operator_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string()) != kOperatorSchema) {
    throw InputError(std::string("operator_from_json: expected schema ") + kOperatorSchema);
  }
  const int d = j.at("d").get<int>(), k = j.at("k").get<int>(), n = j.at("N").get<int>();
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const std::vector<double> data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != 2 * rows * cols) {
    throw InputError("operator_from_json: data length does not match rows x cols");
  }
  const SpacePtr space = ModelSpace::build(d, k, n);
  if (space->size() != rows || rows != cols) {
    std::ostringstream os;
    os << "operator_from_json: stored " << rows << "x" << cols << " matrix does not fit a space of size "
       << space->size();
    throw DimensionMismatch(os.str());
  }
  ComplexMatrix m(rows, cols);
  std::size_t p = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c, p += 2) m(r, c) = {data[p], data[p + 1]};
  }
  return {space, std::move(m)};
}

}  // namespace qflow
