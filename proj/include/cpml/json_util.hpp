#pragma once

#include "cpml/error.hpp"

#include <string>

#include <Eigen/Dense>
#include <json.hpp>

namespace cpml::json_util {

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v(i));
  }
  return arr;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) {
    throw Error("model file: expected a numeric array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

// Matrices are stored as a list of columns.
inline nlohmann::json columns_to_json(const Eigen::MatrixXd& m) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    arr.push_back(vector_to_json(m.col(c)));
  }
  return arr;
}

inline Eigen::MatrixXd columns_from_json(const nlohmann::json& arr, Eigen::Index rows) {
  if (!arr.is_array()) {
    throw Error("model file: expected an array of columns");
  }
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(arr.size()));
  for (std::size_t c = 0; c < arr.size(); ++c) {
    const Eigen::VectorXd col = vector_from_json(arr[c]);
    if (col.size() != rows) {
      throw Error("model file: column length mismatch");
    }
    m.col(static_cast<Eigen::Index>(c)) = col;
  }
  return m;
}

// Row-major list of rows.
inline nlohmann::json rows_to_json(const Eigen::MatrixXd& m) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    arr.push_back(vector_to_json(m.row(r).transpose()));
  }
  return arr;
}

inline Eigen::MatrixXd rows_from_json(const nlohmann::json& arr, Eigen::Index cols) {
  if (!arr.is_array()) {
    throw Error("model file: expected an array of rows");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(arr.size()), cols);
  for (std::size_t r = 0; r < arr.size(); ++r) {
    const Eigen::VectorXd row = vector_from_json(arr[r]);
    if (row.size() != cols) {
      throw Error("model file: row length mismatch");
    }
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

inline void expect_type(const nlohmann::json& doc, const std::string& type) {
  if (!doc.is_object() || !doc.contains("model_type") || doc.at("model_type") != type) {
    throw Error("model file: expected model_type '" + type + "'");
  }
  if (!doc.contains("schema_version") || doc.at("schema_version") != 1) {
    throw Error("model file: unsupported schema_version");
  }
}

} // namespace cpml::json_util
