#pragma once

#include <filesystem>

#include <json.hpp>

#include "ieppa/constraints.hpp"

namespace ieppa {

// {"dims":[n1,n2,n3], "cost":[...], "blocks":[{"m":..,"labels":[..]}],
//  "rhs":[[..],..], "upper":[..]|null}. Upper entries may be the string "inf".
nlohmann::json InstanceToJson(const Instance& inst);
// Validates shapes; zero rhs entries are allowed here and rejected by solvers.
Instance InstanceFromJson(const nlohmann::json& j);

Tensor3 TensorFromJson(const nlohmann::json& j, Dims dims, bool allow_inf);
nlohmann::json TensorToJson(const Tensor3& t);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace ieppa
