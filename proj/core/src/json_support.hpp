#pragma once

// Internal helpers shared by the serializers. Not installed.

#include <Eigen/Dense>
#include <json.hpp>
#include <string>

#include "sdpack/error.hpp"
#include "sdpack/linalg.hpp"

namespace sdpack::json_support {

using json = nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& what) {
  throw Error(ErrorCode::SchemaError, what);
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline double number(const json& j, const std::string& what) {
  if (!j.is_number()) schema_error(what + " must be a number");
  return j.get<double>();
}

inline Eigen::VectorXd vector_from(const json& j, const std::string& what) {
  if (!j.is_array()) schema_error(what + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<long>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<long>(i)) = number(j[i], what);
  return v;
}

// Row-major array of arrays. An empty array yields a 0 x 0 matrix.
inline Eigen::MatrixXd matrix_from(const json& j, const std::string& what) {
  if (!j.is_array()) schema_error(what + " must be an array of rows");
  const long rows = static_cast<long>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  if (!j[0].is_array()) schema_error(what + " must be an array of rows");
  const long cols = static_cast<long>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<long>(row.size()) != cols) schema_error(what + " has ragged rows");
    for (long c = 0; c < cols; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

inline SymMatrix sym_from(const json& j, const std::string& what) {
  const Eigen::MatrixXd m = matrix_from(j, what);
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, what + " must be a non-empty square matrix",
                Witness{.dimensions = std::pair<long, long>{m.rows(), m.cols()}});
  }
  return SymMatrix(m);
}

inline json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

inline json to_json(const SymMatrix& s) { return to_json(s.mat()); }

}  // namespace sdpack::json_support
