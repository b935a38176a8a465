#include "lhv/behavior.hpp"
#include "lhv/errors.hpp"
#include "lhv/model.hpp"
#include "lhv/scenarios.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lhv;
using Catch::Approx;

namespace {

ScenarioShape two_by_two() {
  return ScenarioShape({"x0", "x1"}, {"y0", "y1"}, {"+1", "-1"}, {"+1", "-1"}, {"l0", "l1"});
}

Behavior uniform_behavior() {
  ScenarioShape shape({"x0"}, {"y0"}, {"+1", "-1"}, {"+1", "-1"});
  DenseTable<double> t({1, 1, 2, 2});
  for (Eigen::Index i = 0; i < t.size(); ++i) t.flat(i) = 0.25;
  return Behavior(shape, std::move(t));
}

}  // namespace

TEST_CASE("labels must be unique, non-empty, and pipe-free") {
  CHECK_THROWS_AS(ScenarioShape({}, {"y"}, {"a"}, {"b"}), Error);
  CHECK_THROWS_AS(ScenarioShape({"x", "x"}, {"y"}, {"a"}, {"b"}), Error);
  CHECK_THROWS_AS(ScenarioShape({"x|y"}, {"y"}, {"a"}, {"b"}), Error);
  CHECK_NOTHROW(ScenarioShape({"x"}, {"y"}, {"a"}, {"b"}));  // lambdas may be empty
}

TEST_CASE("dense table strides follow the axis order") {
  DenseTable<double> t({2, 3, 4});
  t(1, 2, 3) = 7.0;
  CHECK(t.flat(1 * 12 + 2 * 4 + 3) == 7.0);
  const auto ix = t.unravel(1 * 12 + 2 * 4 + 3);
  CHECK(ix == std::vector<Eigen::Index>{1, 2, 3});
}

TEST_CASE("validate accepts the uniform table with zero violation") {
  const PropertyReport r = validate(uniform_behavior());
  CHECK(r.holds);
  CHECK(r.max_violation == 0.0);
}

TEST_CASE("validate reports a row summing to 0.9") {
  ScenarioShape shape({"x0"}, {"y0"}, {"+1", "-1"}, {"+1", "-1"});
  DenseTable<double> t({1, 1, 2, 2});
  t(0, 0, 0, 0) = 0.4;
  t(0, 0, 0, 1) = 0.2;
  t(0, 0, 1, 0) = 0.2;
  t(0, 0, 1, 1) = 0.1;
  const PropertyReport r = validate(Behavior(shape, std::move(t)));
  CHECK_FALSE(r.holds);
  CHECK(r.max_violation == Approx(0.1));
}

TEST_CASE("validate rejects clearly negative entries") {
  ScenarioShape shape({"x0"}, {"y0"}, {"+1", "-1"}, {"+1", "-1"});
  DenseTable<double> t({1, 1, 2, 2});
  t(0, 0, 0, 0) = 1.5;
  t(0, 0, 0, 1) = -0.5;
  try {
    validate(Behavior(shape, std::move(t)));
    FAIL("expected NegativeProbability");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeProbability);
  }
}

TEST_CASE("the singlet behavior is exactly normalized") {
  const DirectionSet dirs = DirectionSet::parse("z,x");
  const PropertyReport r = validate(make_singlet_behavior(dirs, dirs));
  CHECK(r.holds);
  CHECK(r.max_violation == 0.0);  // the closed form sums to 1 exactly
}

TEST_CASE("aggregate_behavior reproduces the single-lambda kernel") {
  const HiddenVariableModel model = make_prop1_counterexample(2);
  const Behavior behavior = aggregate_behavior(model);
  CHECK(behavior.at_labels("x0", "y0", "0", "0") == 0.5);
  CHECK(behavior.at_labels("x0", "y0", "0", "1") == 0.0);
  CHECK(behavior.at_labels("x0", "y0", "1", "1") == 0.5);
}

TEST_CASE("aggregate of the example 1 model equals the singlet closed form exactly") {
  const DirectionSet dirs = DirectionSet::parse("z,x");
  const Behavior agg = aggregate_behavior(make_example1_model(dirs, dirs));
  const Behavior direct = make_singlet_behavior(dirs, dirs);
  for (Eigen::Index i = 0; i < agg.table().size(); ++i) {
    CHECK(agg.table().flat(i) == direct.table().flat(i));  // bitwise
  }
}

TEST_CASE("lambda-independent kernels aggregate to the common kernel") {
  ScenarioShape shape = two_by_two();
  HiddenVariableModel zero = HiddenVariableModel::zeros(shape);
  DenseTable<double> weights = zero.weights();
  DenseTable<double> kernels = zero.kernels();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index x = 0; x < 2; ++x) {
    for (Eigen::Index y = 0; y < 2; ++y) {
      const double w = unit(rng);
      weights(x, y, 0) = w;
      weights(x, y, 1) = 1.0 - w;
      // One shared kernel per (x, y).
      double cells[4] = {0.3, 0.2, 0.1, 0.4};
      int i = 0;
      for (Eigen::Index a = 0; a < 2; ++a) {
        for (Eigen::Index b = 0; b < 2; ++b) {
          kernels(x, y, 0, a, b) = cells[i];
          kernels(x, y, 1, a, b) = cells[i];
          ++i;
        }
      }
    }
  }
  const HiddenVariableModel model(shape, std::move(weights), std::move(kernels));
  const Behavior behavior = aggregate_behavior(model);
  CHECK(behavior.at(0, 0, 0, 0) == Approx(0.3).margin(1e-15));
  CHECK(behavior.at(1, 1, 1, 1) == Approx(0.4).margin(1e-15));
}

TEST_CASE("aggregate_behavior is invariant under permuting lambda labels") {
  std::mt19937_64 rng(11);
  const ScenarioShape base = two_by_two().without_lambdas();
  const HiddenVariableModel model = random_product_noise(base, 3, rng);
  // Reverse the lambda order.
  const ScenarioShape& s = model.shape();
  std::vector<std::string> reversed(s.lambdas().labels().rbegin(), s.lambdas().labels().rend());
  ScenarioShape pshape = base.with_lambdas(reversed);
  HiddenVariableModel zero = HiddenVariableModel::zeros(pshape);
  DenseTable<double> weights = zero.weights();
  DenseTable<double> kernels = zero.kernels();
  const Eigen::Index nl = s.num_lambdas();
  for (Eigen::Index x = 0; x < 2; ++x) {
    for (Eigen::Index y = 0; y < 2; ++y) {
      for (Eigen::Index l = 0; l < nl; ++l) {
        weights(x, y, nl - 1 - l) = model.weight(x, y, l);
        for (Eigen::Index a = 0; a < 2; ++a) {
          for (Eigen::Index b = 0; b < 2; ++b) {
            kernels(x, y, nl - 1 - l, a, b) = model.kernel(x, y, l, a, b);
          }
        }
      }
    }
  }
  const HiddenVariableModel permuted(pshape, std::move(weights), std::move(kernels));
  const Behavior b1 = aggregate_behavior(model);
  const Behavior b2 = aggregate_behavior(permuted);
  for (Eigen::Index i = 0; i < b1.table().size(); ++i) {
    CHECK(b1.table().flat(i) == Approx(b2.table().flat(i)).margin(1e-15));
  }
}

TEST_CASE("marginals of kernels") {
  SECTION("half delta_ab gives the uniform marginal") {
    const HiddenVariableModel model = make_prop1_counterexample(2);
    const Eigen::VectorXd pa = marginal_a(model, 0, 0, 0);
    CHECK(pa[0] == 0.5);
    CHECK(pa[1] == 0.5);
  }
  SECTION("example 1 kernel at lambda=+1") {
    const DirectionSet dirs = DirectionSet::parse("z,x");
    const HiddenVariableModel model = make_example1_model(dirs, dirs);
    // p(a|x,y,l) = (1 - a * l * x.y) / 2; at x = y = z, l = +1: (0, 1).
    const Eigen::VectorXd pa = marginal_a(model, "z", "z", "+1");
    CHECK(pa[0] == Approx(0.0).margin(1e-15));
    CHECK(pa[1] == Approx(1.0).margin(1e-15));
  }
  SECTION("deterministic kernel gives a point mass") {
    ScenarioShape shape({"x0"}, {"y0"}, {"0", "1"}, {"0", "1"}, {"l0"});
    HiddenVariableModel zero = HiddenVariableModel::zeros(shape);
    DenseTable<double> weights = zero.weights();
    DenseTable<double> kernels = zero.kernels();
    weights(0, 0, 0) = 1.0;
    kernels(0, 0, 0, 1, 0) = 1.0;
    const HiddenVariableModel model(shape, std::move(weights), std::move(kernels));
    const Eigen::VectorXd pa = marginal_a(model, 0, 0, 0);
    CHECK(pa[0] == 0.0);
    CHECK(pa[1] == 1.0);
    CHECK(marginal_b(model, 0, 0, 0)[0] == 1.0);
  }
  SECTION("marginals sum to 1 for random valid models") {
    std::mt19937_64 rng(23);
    const ScenarioShape base = two_by_two().without_lambdas();
    for (int rep = 0; rep < 20; ++rep) {
      const HiddenVariableModel model = random_correlated_singleton(base, rng);
      for (Eigen::Index x = 0; x < 2; ++x) {
        for (Eigen::Index y = 0; y < 2; ++y) {
          CHECK(marginal_a(model, x, y, 0).sum() == Approx(1.0).margin(1e-9));
          CHECK(marginal_b(model, x, y, 0).sum() == Approx(1.0).margin(1e-9));
        }
      }
    }
  }
}

TEST_CASE("aggregation and marginalization commute") {
  std::mt19937_64 rng(31);
  const ScenarioShape base = two_by_two().without_lambdas();
  const HiddenVariableModel model = random_product_noise(base, 4, rng);
  const Behavior behavior = aggregate_behavior(model);
  for (Eigen::Index x = 0; x < 2; ++x) {
    for (Eigen::Index y = 0; y < 2; ++y) {
      Eigen::VectorXd mixed = Eigen::VectorXd::Zero(2);
      for (Eigen::Index l = 0; l < model.shape().num_lambdas(); ++l) {
        mixed += model.weight(x, y, l) * marginal_a(model, x, y, l);
      }
      const Eigen::VectorXd direct = behavior.marginal_a(x, y);
      CHECK((mixed - direct).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("conditioning a finite joint") {
  SECTION("independent joint returns the j-marginal unchanged") {
    JointDistribution joint;
    joint.labels_j = {"j0", "j1"};
    joint.labels_l = {"l0", "l1", "l2"};
    Eigen::VectorXd pj(2), pl(3);
    pj << 0.3, 0.7;
    pl << 0.2, 0.5, 0.3;
    joint.p = pj * pl.transpose();
    for (Eigen::Index l = 0; l < 3; ++l) {
      const Eigen::VectorXd cond = condition_on(joint, l);
      CHECK(cond[0] == Approx(0.3));
      CHECK(cond[1] == Approx(0.7));
    }
  }
  SECTION("perfectly correlated joint collapses to a point mass") {
    JointDistribution joint;
    joint.labels_j = {"0", "1"};
    joint.labels_l = {"0", "1"};
    joint.p = 0.5 * Eigen::Matrix2d::Identity();
    const Eigen::VectorXd cond = condition_on(joint, 1);
    CHECK(cond[0] == 0.0);
    CHECK(cond[1] == 1.0);
  }
  SECTION("conditioning on a zero-probability event fails") {
    JointDistribution joint;
    joint.labels_j = {"0", "1"};
    joint.labels_l = {"0", "1"};
    joint.p.setZero(2, 2);
    joint.p(0, 0) = 1.0;
    try {
      condition_on(joint, 1);
      FAIL("expected ZeroSupport");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroSupport);
    }
  }
}

TEST_CASE("aggregate_behavior insists on a valid model") {
  ScenarioShape shape({"x0"}, {"y0"}, {"0", "1"}, {"0", "1"}, {"l0"});
  HiddenVariableModel zero = HiddenVariableModel::zeros(shape);
  DenseTable<double> weights = zero.weights();
  DenseTable<double> kernels = zero.kernels();
  weights(0, 0, 0) = 0.7;  // weights do not sum to 1
  kernels(0, 0, 0, 0, 0) = 1.0;
  const HiddenVariableModel model(shape, std::move(weights), std::move(kernels));
  try {
    aggregate_behavior(model);
    FAIL("expected InvalidModel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidModel);
  }
}
