#pragma once

// JSON export/import of moment tables. Exact entries are written as "p/q"
// strings, real entries as scientific strings with guard digits, so exact tables
// round-trip bit-exactly and real tables round-trip at their own precision.

#include "json.hpp"

#include <string>

#include "cbop/moments.hpp"

namespace cbop {

inline constexpr const char* kMomentSchema = "cbop.moments/1";

nlohmann::json params_to_json(const ModelParams& p);
ModelParams params_from_json(const nlohmann::json& j);

template <class S>
nlohmann::json table_to_json(const MomentTable<S>& table) {
  nlohmann::json out;
  out["schema"] = kMomentSchema;
  out["params"] = params_to_json(table.params());
  out["mode"] = std::string(ScalarTraits<S>::mode);
  out["precision"] = is_exact_v<S> ? 0 : ScalarTraits<S>::digits();
  out["t"] = to_string(table.time());
  out["rows"] = table.rows();
  out["cols"] = table.cols();
  nlohmann::json grid = nlohmann::json::array();
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < table.cols(); ++j) row.push_back(to_string(table.m(i, j)));
    grid.push_back(row);
  }
  out["bimoments"] = grid;
  nlohmann::json sx = nlohmann::json::array();
  nlohmann::json sy = nlohmann::json::array();
  for (Eigen::Index i = 0; i < table.rows(); ++i) sx.push_back(to_string(table.phi_hat(i)));
  for (Eigen::Index j = 0; j < table.cols(); ++j) sy.push_back(to_string(table.phi(j)));
  out["single_x"] = sx;
  out["single_y"] = sy;
  return out;
}

template <class S>
MomentTable<S> table_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != kMomentSchema) throw ConfigError("moment table: unknown schema");
  if (j.at("mode").get<std::string>() != ScalarTraits<S>::mode) {
    throw ModeError("moment table was written in " + j.at("mode").get<std::string>() + " mode");
  }
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  Matrix<S> m(rows, cols);
  Vector<S> sx(rows), sy(cols);
  const auto& grid = j.at("bimoments");
  if (static_cast<Eigen::Index>(grid.size()) != rows) throw ShapeError("moment table: row count mismatch");
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(grid[r].size()) != cols) throw ShapeError("moment table: ragged grid");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_scalar<S>(grid[r][c].get<std::string>());
  }
  for (Eigen::Index r = 0; r < rows; ++r) sx(r) = parse_scalar<S>(j.at("single_x").at(r).get<std::string>());
  for (Eigen::Index c = 0; c < cols; ++c) sy(c) = parse_scalar<S>(j.at("single_y").at(c).get<std::string>());
  return MomentTable<S>(params_from_json(j.at("params")), parse_scalar<S>(j.at("t").get<std::string>()),
                        std::move(m), std::move(sx), std::move(sy));
}

}  // namespace cbop
