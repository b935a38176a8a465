#pragma once

#include "lhv/behavior.hpp"
#include "lhv/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <variant>

namespace lhv {

using json = nlohmann::ordered_json;

/// A model file holds either a bare behavior or a full hidden-variable
/// model.
using LoadedModel = std::variant<Behavior, HiddenVariableModel>;

inline bool is_behavior(const LoadedModel& m) { return std::holds_alternative<Behavior>(m); }

/// Strict parse of the UTF-8 JSON model format: "shape" with the five
/// label lists, then either "behavior" (keys "x|y|a|b") or "weights"
/// (keys "x|y|lambda") plus "kernels" (keys "x|y|lambda|a|b").  Every key
/// of the cartesian product must be present (no implicit zeros); unknown
/// keys are rejected by name.
LoadedModel parse_model_json(const json& j);
LoadedModel load_model_file(const std::string& path);

json behavior_to_json(const Behavior& behavior);
json model_to_json(const HiddenVariableModel& model);
json to_json(const LoadedModel& loaded);

void save_model_file(const std::string& path, const LoadedModel& loaded);

/// FNV-1a 64-bit content digest, as fixed-width hex.
std::string content_digest(const std::string& bytes);

/// Shortest round-trip decimal rendering (the JSON number grammar), used
/// everywhere a number is printed so text and JSON reports agree.
std::string format_number(double v);

}  // namespace lhv
