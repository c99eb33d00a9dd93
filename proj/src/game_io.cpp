#include "dualvol/game_io.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>

namespace dualvol {

nlohmann::json MatrixToJson(const Matrix& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (int j = 0; j < M.rows(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < M.cols(); ++k) row.push_back(M(j, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix MatrixFromJson(const nlohmann::json& j) {
  Require(j.is_array() && !j.empty(), "matrix: expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Require(j[0].is_array() && !j[0].empty(), "matrix: rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    Require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols,
            "matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      Require(v.is_number(), "matrix: entries must be numbers");
      M(r, c) = v.get<double>();
    }
  }
  return M;
}

nlohmann::json VectorToJson(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector VectorFromJson(const nlohmann::json& j) {
  Require(j.is_array(), "vector: expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    Require(j[i].is_number(), "vector: entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

BimatrixGame GameFromJson(const nlohmann::json& j) {
  Require(j.is_object(), "game file: expected a JSON object");
  Require(j.contains("A"), "game file: missing \"A\"");
  Require(j.contains("kind") && j["kind"].is_string(), "game file: missing \"kind\"");
  Matrix A = MatrixFromJson(j["A"]);
  const GameKind kind = ParseGameKind(j["kind"].get<std::string>());
  if (!j.contains("B")) {
    Require(kind != GameKind::kGeneral, "game file: general games must specify \"B\"");
    return kind == GameKind::kZeroSum ? BimatrixGame::ZeroSum(std::move(A))
                                      : BimatrixGame::Coordination(std::move(A));
  }
  return BimatrixGame(std::move(A), MatrixFromJson(j["B"]), kind);
}

nlohmann::json GameToJson(const BimatrixGame& g) {
  return {{"A", MatrixToJson(g.A())}, {"B", MatrixToJson(g.B())}, {"kind", ToString(g.kind())}};
}

BimatrixGame LoadGameFile(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), fmt::format("cannot open game file '{}'", path));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(fmt::format("game file '{}': {}", path, e.what()));
  }
  return GameFromJson(j);
}

BimatrixGame ResolveGame(const std::string& spec) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(spec, ec)) return LoadGameFile(spec);
  return BuiltinGame(spec);
}

}  // namespace dualvol
