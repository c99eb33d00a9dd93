#pragma once

#include "dualvol/model.hpp"

#include <json.hpp>

#include <string>

namespace dualvol {

// Game files: {"A": [[..]], "B": [[..]] (optional), "kind": "zero-sum" |
// "coordination" | "general"}. Without "B" the kind must be zero-sum or
// coordination and B is derived from A.
BimatrixGame GameFromJson(const nlohmann::json& j);
nlohmann::json GameToJson(const BimatrixGame& g);
BimatrixGame LoadGameFile(const std::string& path);

// A path to an existing JSON file, otherwise a builtin name.
BimatrixGame ResolveGame(const std::string& spec);

nlohmann::json MatrixToJson(const Matrix& M);
Matrix MatrixFromJson(const nlohmann::json& j);
nlohmann::json VectorToJson(const Vector& v);
Vector VectorFromJson(const nlohmann::json& j);

}  // namespace dualvol
