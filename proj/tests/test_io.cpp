#include "lhv/errors.hpp"
#include "lhv/io.hpp"
#include "lhv/properties.hpp"
#include "lhv/scenarios.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace lhv;

namespace {

json minimal_behavior_json() {
  return json::parse(R"({
    "shape": {
      "settings_a": ["x0"], "settings_b": ["y0"],
      "outcomes_a": ["0", "1"], "outcomes_b": ["0", "1"],
      "lambdas": []
    },
    "behavior": {
      "x0|y0|0|0": 0.5, "x0|y0|0|1": 0.0,
      "x0|y0|1|0": 0.0, "x0|y0|1|1": 0.5
    }
  })");
}

}  // namespace

TEST_CASE("behavior files round-trip") {
  const LoadedModel loaded = parse_model_json(minimal_behavior_json());
  REQUIRE(is_behavior(loaded));
  const Behavior& b = std::get<Behavior>(loaded);
  CHECK(b.at_labels("x0", "y0", "0", "0") == 0.5);
  const json out = to_json(loaded);
  const LoadedModel again = parse_model_json(out);
  CHECK(to_json(again) == out);
}

TEST_CASE("model files round-trip bit-exactly") {
  const DirectionSet dirs = DirectionSet::parse("z,x");
  const HiddenVariableModel model = make_example1_model(dirs, dirs);
  const json j = model_to_json(model);
  const LoadedModel loaded = parse_model_json(j);
  REQUIRE_FALSE(is_behavior(loaded));
  const HiddenVariableModel& back = std::get<HiddenVariableModel>(loaded);
  for (Eigen::Index i = 0; i < model.kernels().size(); ++i) {
    CHECK(back.kernels().flat(i) == model.kernels().flat(i));
  }
  // Serialization is deterministic byte for byte.
  CHECK(j.dump(2) == model_to_json(model).dump(2));
  CHECK(to_json(loaded).dump(2) == j.dump(2));
}

TEST_CASE("missing entries are named") {
  json j = minimal_behavior_json();
  j["behavior"].erase("x0|y0|1|0");
  try {
    parse_model_json(j);
    FAIL("expected MissingEntry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingEntry);
    CHECK(std::string(e.what()).find("x0|y0|1|0") != std::string::npos);
  }
}

TEST_CASE("unknown keys are named") {
  json j = minimal_behavior_json();
  j["behavior"]["x0|y0|2|0"] = 0.1;
  try {
    parse_model_json(j);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("x0|y0|2|0") != std::string::npos);
  }
}

TEST_CASE("structural errors") {
  SECTION("behavior and kernels together are rejected") {
    json j = minimal_behavior_json();
    j["kernels"] = json::object();
    CHECK_THROWS_AS(parse_model_json(j), Error);
  }
  SECTION("kernels without weights are rejected") {
    json j = minimal_behavior_json();
    j.erase("behavior");
    j["shape"]["lambdas"] = {"l0"};
    j["kernels"] = {{"x0|y0|l0|0|0", 1.0},
                    {"x0|y0|l0|0|1", 0.0},
                    {"x0|y0|l0|1|0", 0.0},
                    {"x0|y0|l0|1|1", 0.0}};
    try {
      parse_model_json(j);
      FAIL("expected MissingEntry for weights");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingEntry);
    }
  }
  SECTION("labels containing the separator are rejected") {
    json j = minimal_behavior_json();
    j["shape"]["settings_a"] = {"x|0"};
    CHECK_THROWS_AS(parse_model_json(j), Error);
  }
  SECTION("non-numeric probabilities are rejected") {
    json j = minimal_behavior_json();
    j["behavior"]["x0|y0|0|0"] = "almost surely";
    try {
      parse_model_json(j);
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
    }
  }
  SECTION("unknown top-level fields are rejected") {
    json j = minimal_behavior_json();
    j["extras"] = 1;
    CHECK_THROWS_AS(parse_model_json(j), Error);
  }
}

TEST_CASE("negative probabilities surface at validation, not parse") {
  json j = minimal_behavior_json();
  j["behavior"]["x0|y0|0|0"] = -0.25;
  const LoadedModel loaded = parse_model_json(j);
  try {
    validate(std::get<Behavior>(loaded));
    FAIL("expected NegativeProbability");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeProbability);
  }
}

TEST_CASE("content digest is stable and content-sensitive") {
  const std::string a = "p(a,b|x,y)";
  CHECK(content_digest(a) == content_digest(a));
  CHECK(content_digest(a) != content_digest(a + " "));
  CHECK(content_digest(a).rfind("fnv1a64:", 0) == 0);
  CHECK(content_digest(a).size() == 8 + 16);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, 0.5, 1.0 / 3.0, 2.0 * std::sqrt(2.0), 1e-12, 123456.789}) {
    const std::string s = format_number(v);
    CHECK(std::stod(s) == v);
  }
}
