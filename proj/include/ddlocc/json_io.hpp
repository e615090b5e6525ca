#pragma once

// JSON encoding: a complex entry is [re, im], a matrix is an array of rows, a vector is an
// array of entries. Real matrices use plain numbers.

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "ddlocc/linalg.hpp"

namespace ddlocc::io {

using json = nlohmann::json;

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw StructuralError("complex entry must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline CMatrix cmatrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw StructuralError("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw StructuralError("ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

inline RMatrix rmatrix_from_json(const json& j) {
  const CMatrix m = cmatrix_from_json(j);
  if (m.imag().cwiseAbs().maxCoeff() != 0.0) throw StructuralError("expected a real matrix");
  return m.real();
}

inline CVector cvector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw StructuralError("vector must be a non-empty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex_from_json(j[i]);
  return v;
}

inline json to_json(const BipartiteOperator& m) {
  return {{"dimA", m.dim_a()}, {"dimB", m.dim_b()}, {"matrix", to_json(m.matrix())}};
}

inline json to_json(const RealSymmetricOperator& m) {
  return {{"dimA", m.dim_a}, {"dimB", m.dim_b}, {"matrix", to_json(m.matrix)}};
}

inline int require_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw StructuralError(std::string("missing integer field '") + key + "'");
  }
  return j[key].get<int>();
}

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw StructuralError(std::string("missing field '") + key + "'");
  return j[key];
}

inline BipartiteOperator bipartite_from_json(const json& j) {
  return {require_int(j, "dimA"), require_int(j, "dimB"), cmatrix_from_json(require(j, "matrix"))};
}

inline RealSymmetricOperator real_operator_from_json(const json& j) {
  return {require_int(j, "dimA"), require_int(j, "dimB"), rmatrix_from_json(require(j, "matrix"))};
}

}  // namespace ddlocc::io
