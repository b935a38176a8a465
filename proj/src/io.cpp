#include "lhv/io.hpp"

#include "lhv/errors.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace lhv {

namespace {

using Index = Eigen::Index;

std::string join_key(std::initializer_list<std::string> parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out += '|';
    out += p;
  }
  return out;
}

std::vector<std::string> parse_label_list(const json& j, const std::string& field) {
  if (!j.contains(field)) fail(ErrorCode::ParseError, "shape is missing \"" + field + "\"");
  const json& arr = j.at(field);
  if (!arr.is_array()) fail(ErrorCode::ParseError, "shape field \"" + field + "\" must be an array");
  std::vector<std::string> out;
  for (const json& v : arr) {
    if (!v.is_string()) {
      fail(ErrorCode::ParseError, "shape field \"" + field + "\" must hold strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

ScenarioShape parse_shape(const json& j) {
  if (!j.contains("shape")) fail(ErrorCode::ParseError, "missing \"shape\"");
  const json& s = j.at("shape");
  for (const auto& [key, value] : s.items()) {
    (void)value;
    if (key != "settings_a" && key != "settings_b" && key != "outcomes_a" &&
        key != "outcomes_b" && key != "lambdas") {
      fail(ErrorCode::ParseError, "unknown shape field \"" + key + "\"");
    }
  }
  std::vector<std::string> lambdas;
  if (s.contains("lambdas")) lambdas = parse_label_list(s, "lambdas");
  try {
    return ScenarioShape(parse_label_list(s, "settings_a"), parse_label_list(s, "settings_b"),
                         parse_label_list(s, "outcomes_a"), parse_label_list(s, "outcomes_b"),
                         std::move(lambdas));
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

double number_at(const json& table, const std::string& key, const char* section) {
  auto it = table.find(key);
  if (it == table.end()) {
    fail(ErrorCode::MissingEntry, std::string(section) + " is missing key \"" + key + "\"");
  }
  if (!it->is_number()) {
    fail(ErrorCode::ParseError, std::string(section) + " key \"" + key + "\" is not a number");
  }
  return it->get<double>();
}

void reject_unknown_keys(const json& table, const std::unordered_set<std::string>& expected,
                         const char* section) {
  for (const auto& [key, value] : table.items()) {
    (void)value;
    if (expected.find(key) == expected.end()) {
      fail(ErrorCode::ParseError, std::string(section) + " has unknown key \"" + key + "\"");
    }
  }
}

}  // namespace

LoadedModel parse_model_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "top level must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "shape" && key != "weights" && key != "kernels" && key != "behavior") {
      fail(ErrorCode::ParseError, "unknown top-level field \"" + key + "\"");
    }
  }
  const ScenarioShape shape = parse_shape(j);
  const bool has_behavior = j.contains("behavior");
  const bool has_kernels = j.contains("kernels");
  const bool has_weights = j.contains("weights");
  if (has_behavior && (has_kernels || has_weights)) {
    fail(ErrorCode::ParseError, "\"behavior\" excludes \"weights\"/\"kernels\"");
  }
  if (!has_behavior && !has_kernels) {
    fail(ErrorCode::ParseError, "need either \"behavior\" or \"kernels\"");
  }

  if (has_behavior) {
    const json& table = j.at("behavior");
    if (!table.is_object()) fail(ErrorCode::ParseError, "\"behavior\" must be an object");
    DenseTable<double> data({shape.num_settings_a(), shape.num_settings_b(),
                             shape.num_outcomes_a(), shape.num_outcomes_b()});
    std::unordered_set<std::string> seen;
    for (Index x = 0; x < shape.num_settings_a(); ++x) {
      for (Index y = 0; y < shape.num_settings_b(); ++y) {
        for (Index a = 0; a < shape.num_outcomes_a(); ++a) {
          for (Index b = 0; b < shape.num_outcomes_b(); ++b) {
            const std::string key =
                join_key({shape.settings_a().label(x), shape.settings_b().label(y),
                          shape.outcomes_a().label(a), shape.outcomes_b().label(b)});
            data(x, y, a, b) = number_at(table, key, "behavior");
            seen.insert(key);
          }
        }
      }
    }
    reject_unknown_keys(table, seen, "behavior");
    return Behavior(shape.without_lambdas(), std::move(data));
  }

  if (!has_weights) fail(ErrorCode::MissingEntry, "\"kernels\" requires \"weights\"");
  if (!shape.has_lambdas()) {
    fail(ErrorCode::ParseError, "a hidden-variable model needs a non-empty \"lambdas\" list");
  }
  const json& wtable = j.at("weights");
  const json& ktable = j.at("kernels");
  if (!wtable.is_object()) fail(ErrorCode::ParseError, "\"weights\" must be an object");
  if (!ktable.is_object()) fail(ErrorCode::ParseError, "\"kernels\" must be an object");
  DenseTable<double> weights({shape.num_settings_a(), shape.num_settings_b(),
                              shape.num_lambdas()});
  DenseTable<double> kernels({shape.num_settings_a(), shape.num_settings_b(),
                              shape.num_lambdas(), shape.num_outcomes_a(),
                              shape.num_outcomes_b()});
  std::unordered_set<std::string> wseen, kseen;
  for (Index x = 0; x < shape.num_settings_a(); ++x) {
    for (Index y = 0; y < shape.num_settings_b(); ++y) {
      for (Index l = 0; l < shape.num_lambdas(); ++l) {
        const std::string wkey = join_key({shape.settings_a().label(x),
                                           shape.settings_b().label(y), shape.lambdas().label(l)});
        weights(x, y, l) = number_at(wtable, wkey, "weights");
        wseen.insert(wkey);
        for (Index a = 0; a < shape.num_outcomes_a(); ++a) {
          for (Index b = 0; b < shape.num_outcomes_b(); ++b) {
            const std::string kkey =
                join_key({shape.settings_a().label(x), shape.settings_b().label(y),
                          shape.lambdas().label(l), shape.outcomes_a().label(a),
                          shape.outcomes_b().label(b)});
            kernels(x, y, l, a, b) = number_at(ktable, kkey, "kernels");
            kseen.insert(kkey);
          }
        }
      }
    }
  }
  reject_unknown_keys(wtable, wseen, "weights");
  reject_unknown_keys(ktable, kseen, "kernels");
  return HiddenVariableModel(shape, std::move(weights), std::move(kernels));
}

LoadedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("invalid JSON in '") + path + "': " + e.what());
  }
  return parse_model_json(j);
}

namespace {

json shape_to_json(const ScenarioShape& shape) {
  json s;
  s["settings_a"] = shape.settings_a().labels();
  s["settings_b"] = shape.settings_b().labels();
  s["outcomes_a"] = shape.outcomes_a().labels();
  s["outcomes_b"] = shape.outcomes_b().labels();
  s["lambdas"] = shape.lambdas().labels();
  return s;
}

}  // namespace

json behavior_to_json(const Behavior& behavior) {
  const ScenarioShape& shape = behavior.shape();
  json j;
  j["shape"] = shape_to_json(shape.without_lambdas());
  json table;
  for (Index x = 0; x < shape.num_settings_a(); ++x) {
    for (Index y = 0; y < shape.num_settings_b(); ++y) {
      for (Index a = 0; a < shape.num_outcomes_a(); ++a) {
        for (Index b = 0; b < shape.num_outcomes_b(); ++b) {
          table[join_key({shape.settings_a().label(x), shape.settings_b().label(y),
                          shape.outcomes_a().label(a), shape.outcomes_b().label(b)})] =
              behavior.at(x, y, a, b);
        }
      }
    }
  }
  j["behavior"] = std::move(table);
  return j;
}

json model_to_json(const HiddenVariableModel& model) {
  const ScenarioShape& shape = model.shape();
  json j;
  j["shape"] = shape_to_json(shape);
  json wtable, ktable;
  for (Index x = 0; x < shape.num_settings_a(); ++x) {
    for (Index y = 0; y < shape.num_settings_b(); ++y) {
      for (Index l = 0; l < shape.num_lambdas(); ++l) {
        wtable[join_key({shape.settings_a().label(x), shape.settings_b().label(y),
                         shape.lambdas().label(l)})] = model.weight(x, y, l);
        for (Index a = 0; a < shape.num_outcomes_a(); ++a) {
          for (Index b = 0; b < shape.num_outcomes_b(); ++b) {
            ktable[join_key({shape.settings_a().label(x), shape.settings_b().label(y),
                             shape.lambdas().label(l), shape.outcomes_a().label(a),
                             shape.outcomes_b().label(b)})] = model.kernel(x, y, l, a, b);
          }
        }
      }
    }
  }
  j["weights"] = std::move(wtable);
  j["kernels"] = std::move(ktable);
  return j;
}

json to_json(const LoadedModel& loaded) {
  if (is_behavior(loaded)) return behavior_to_json(std::get<Behavior>(loaded));
  return model_to_json(std::get<HiddenVariableModel>(loaded));
}

void save_model_file(const std::string& path, const LoadedModel& loaded) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ParseError, "cannot write '" + path + "'");
  out << to_json(loaded).dump(2) << '\n';
}

std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return "fnv1a64:" + out.str();
}

std::string format_number(double v) {
  return nlohmann::json(v).dump();  // shortest round-trip decimal
}

}  // namespace lhv
