#include "lhv/behavior.hpp"
#include "lhv/errors.hpp"
#include "lhv/properties.hpp"
#include "lhv/scenarios.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lhv;
using Catch::Approx;

TEST_CASE("direction sets") {
  const DirectionSet d = DirectionSet::parse("z,x,0:0.6:0.8");
  CHECK(d.size() == 3);
  CHECK(d.direction(0).isApprox(Eigen::Vector3d::UnitZ()));
  CHECK(d.direction(2).isApprox(Eigen::Vector3d(0, 0.6, 0.8)));
  try {
    DirectionSet::parse("0:0:2");
    FAIL("expected NonUnitDirection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonUnitDirection);
  }
  CHECK_THROWS_AS(DirectionSet::parse("zz"), Error);
}

TEST_CASE("prop 1 counterexample") {
  SECTION("n=2 bundle: valid, weakly local, perfectly correlated, not deterministic") {
    const HiddenVariableModel model = make_prop1_counterexample(2);
    CHECK(validate(model).holds);
    CHECK(model.kernel(0, 0, 0, 0, 0) == 0.5);
    CHECK(model.kernel(0, 0, 0, 0, 1) == 0.0);
    CHECK(check_weak_locality(model).max_violation == 0.0);
    const Behavior behavior = aggregate_behavior(model);
    const RelabelMap id = RelabelMap::identity(behavior.shape());
    CHECK(check_perfect_correlation(behavior, "x0", "y0", id).holds);
    const PropertyReport det = check_determinism(model);
    CHECK_FALSE(det.holds);
    CHECK(det.max_violation == Approx(0.5).margin(1e-15));
  }
  SECTION("n=3 values") {
    const HiddenVariableModel model = make_prop1_counterexample(3);
    const Behavior behavior = aggregate_behavior(model);
    const RelabelMap id = RelabelMap::identity(behavior.shape());
    CHECK(check_perfect_correlation(behavior, "x0", "y0", id).max_violation ==
          Approx(0.0).margin(1e-15));
    CHECK(check_determinism(model).max_violation == Approx(2.0 / 3.0).margin(1e-15));
  }
  SECTION("n=1 is rejected") {
    try {
      make_prop1_counterexample(1);
      FAIL("expected BadCardinality");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadCardinality);
    }
  }
}

TEST_CASE("singlet behavior closed form") {
  const DirectionSet a = DirectionSet::parse("z,x");
  SECTION("orthogonal settings give the uniform table") {
    const Behavior b = make_singlet_behavior(a, a);
    CHECK(b.at_labels("z", "x", "+1", "+1") == 0.25);
    CHECK(b.at_labels("z", "x", "-1", "+1") == 0.25);
  }
  SECTION("equal settings are anticorrelated") {
    const Behavior b = make_singlet_behavior(a, a);
    CHECK(b.at_labels("z", "z", "+1", "+1") == 0.0);
    CHECK(b.at_labels("z", "z", "+1", "-1") == 0.5);
    CHECK(b.at_labels("z", "z", "-1", "+1") == 0.5);
    CHECK(b.at_labels("z", "z", "-1", "-1") == 0.0);
  }
  SECTION("opposite settings are correlated") {
    const DirectionSet minus_z = DirectionSet::parse("0:0:-1");
    const Behavior b = make_singlet_behavior(a, minus_z);
    CHECK(b.at_labels("z", "0:0:-1", "+1", "+1") == 0.5);
    CHECK(b.at_labels("z", "0:0:-1", "-1", "-1") == 0.5);
    CHECK(b.at_labels("z", "0:0:-1", "+1", "-1") == 0.0);
  }
}

TEST_CASE("example 1 model profile") {
  const DirectionSet dirs = DirectionSet::parse("z,x");
  const HiddenVariableModel model = make_example1_model(dirs, dirs);
  CHECK(check_measurement_independence(model).holds);
  const PropertyReport oi = check_outcome_independence(model);
  CHECK(oi.holds);
  CHECK(oi.max_violation == 0.0);
  const PropertyReport wl = check_weak_locality(model);
  CHECK_FALSE(wl.holds);
  CHECK(wl.max_violation == Approx(0.5).margin(1e-12));
  CHECK_FALSE(check_local_causality(model).holds);
  // Parallel-only direction sets make weak locality hold vacuously.
  const DirectionSet just_z = DirectionSet::parse("z");
  CHECK(check_weak_locality(make_example1_model(just_z, just_z)).holds);
}

TEST_CASE("example 2 model") {
  const DirectionSet dirs = DirectionSet::parse("z,x");
  const HiddenVariableModel model = make_example2_model(dirs);
  SECTION("aligned settings give the correlated diagonal behavior") {
    const Behavior b = aggregate_behavior(model);
    CHECK(b.at_labels("z", "z", "+1", "+1") == 0.5);
    CHECK(b.at_labels("z", "z", "+1", "-1") == 0.0);
    CHECK(b.at_labels("z", "z", "-1", "-1") == 0.5);
    const RelabelMap id = RelabelMap::identity(b.shape());
    CHECK(check_perfect_correlation(b, "z", "z", id).holds);
    CHECK(check_perfect_correlation(b, "x", "x", id).holds);
  }
  SECTION("per-lambda marginal at aligned settings is a point mass") {
    const Eigen::VectorXd pa = marginal_a(model, "z", "z", "+1");
    CHECK(pa[0] == 1.0);
    CHECK(pa[1] == 0.0);
  }
  SECTION("weak locality fails for two non-parallel directions") {
    CHECK_FALSE(check_weak_locality(model).holds);
    CHECK(check_outcome_independence(model).holds);
  }
}

TEST_CASE("einstein box model") {
  const HiddenVariableModel model = make_einstein_box_model();
  const Behavior behavior = aggregate_behavior(model);
  const RelabelMap swap = RelabelMap::from_pairs(
      behavior.shape(), {{"found", "not-found"}, {"not-found", "found"}});
  SECTION("perfectly correlated under the swap relabel") {
    CHECK(check_perfect_correlation(behavior, "detect-R1", "detect-R2", swap).holds);
  }
  SECTION("outcome independence fails with violation 1/4") {
    const PropertyReport r = check_outcome_independence(model);
    CHECK_FALSE(r.holds);
    CHECK(r.max_violation == Approx(0.25).margin(1e-15));
  }
  SECTION("determinism fails with violation 1/2") {
    const PropertyReport r = check_determinism(model);
    CHECK_FALSE(r.holds);
    CHECK(r.max_violation == Approx(0.5).margin(1e-15));
  }
}

TEST_CASE("verify_prop2") {
  SECTION("example 2 at aligned settings extracts the deterministic outcomes") {
    const HiddenVariableModel model = make_example2_model(DirectionSet::parse("z,x"));
    const RelabelMap id = RelabelMap::identity(model.shape());
    const DeterminismWitness w = verify_prop2(model, "z", "z", id);
    REQUIRE(w.premises_hold());
    CHECK(w.violations.empty());
    REQUIRE(w.deterministic_at.size() == 2);
    CHECK(w.deterministic_at.at("+1") == std::make_pair(std::string("+1"), std::string("+1")));
    CHECK(w.deterministic_at.at("-1") == std::make_pair(std::string("-1"), std::string("-1")));
  }
  SECTION("the prop 1 counterexample misses the premise") {
    const HiddenVariableModel model = make_prop1_counterexample(2);
    const RelabelMap id = RelabelMap::identity(model.shape());
    const DeterminismWitness w = verify_prop2(model, "x0", "y0", id);
    CHECK_FALSE(w.oi_report.holds);
    CHECK(w.pc_report.holds);
    CHECK(w.deterministic_at.empty());
    CHECK(w.violations.empty());
  }
  SECTION("fuzzed correlated deterministic mixtures never violate determinism") {
    std::mt19937_64 rng(8080);
    const ScenarioShape base({"x0", "x1"}, {"y0", "y1"}, {"0", "1", "2"}, {"0", "1", "2"});
    for (int rep = 0; rep < 300; ++rep) {
      const HiddenVariableModel model = random_correlated_deterministic(base, 5, "x0", "y0", rng);
      const RelabelMap id = RelabelMap::identity(model.shape());
      const DeterminismWitness w = verify_prop2(model, "x0", "y0", id);
      REQUIRE(w.premises_hold());
      CHECK(w.violations.empty());
    }
  }
}

TEST_CASE("incompleteness witness") {
  SECTION("einstein box: violation 1/4") {
    const Behavior behavior = aggregate_behavior(make_einstein_box_model());
    const RelabelMap swap = RelabelMap::from_pairs(
        behavior.shape(), {{"found", "not-found"}, {"not-found", "found"}});
    const IncompletenessWitness w =
        incompleteness_witness(behavior, "detect-R1", "detect-R2", swap);
    CHECK(w.violation == Approx(0.25).margin(1e-15));
  }
  SECTION("a deterministic behavior yields no witness") {
    ScenarioShape shape({"x0"}, {"y0"}, {"0", "1"}, {"0", "1"});
    DenseTable<double> t({1, 1, 2, 2});
    t(0, 0, 1, 1) = 1.0;
    const Behavior behavior(shape, std::move(t));
    const IncompletenessWitness w =
        incompleteness_witness(behavior, "x0", "y0", RelabelMap::identity(shape));
    CHECK(w.violation == 0.0);
  }
  SECTION("the n=2 diagonal behavior: violation 1/4") {
    const Behavior behavior = aggregate_behavior(make_prop1_counterexample(2));
    const IncompletenessWitness w = incompleteness_witness(
        behavior, "x0", "y0", RelabelMap::identity(behavior.shape()));
    CHECK(w.violation == Approx(0.25).margin(1e-15));
  }
  SECTION("requires perfect correlation") {
    ScenarioShape shape({"x0"}, {"y0"}, {"0", "1"}, {"0", "1"});
    DenseTable<double> t({1, 1, 2, 2});
    for (Eigen::Index i = 0; i < 4; ++i) t.flat(i) = 0.25;
    const Behavior uniform(shape, std::move(t));
    try {
      incompleteness_witness(uniform, "x0", "y0", RelabelMap::identity(shape));
      FAIL("expected NotPerfectlyCorrelated");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotPerfectlyCorrelated);
    }
  }
}

TEST_CASE("examples 1 and 2 aggregate to non-signalling behaviors") {
  const DirectionSet dirs = DirectionSet::parse("z,x");
  CHECK(signalling_violation(aggregate_behavior(make_example1_model(dirs, dirs))) < 1e-15);
  CHECK(signalling_violation(aggregate_behavior(make_example2_model(dirs))) < 1e-15);
  CHECK(signalling_violation(make_pr_box_behavior()) < 1e-15);
}

TEST_CASE("pr box behavior") {
  const Behavior pr = make_pr_box_behavior();
  CHECK(validate(pr).holds);
  CHECK(pr.at_labels("0", "0", "+1", "+1") == 0.5);
  CHECK(pr.at_labels("0", "0", "+1", "-1") == 0.0);
  CHECK(pr.at_labels("1", "1", "+1", "-1") == 0.5);
  CHECK(pr.at_labels("1", "1", "+1", "+1") == 0.0);
}
