#include "lhv/behavior.hpp"

#include "lhv/errors.hpp"

#include <cmath>
#include <utility>

namespace lhv {

Behavior::Behavior(ScenarioShape shape, DenseTable<double> table)
    : shape_(std::move(shape)), table_(std::move(table)) {
  const std::vector<Index> expected = {shape_.num_settings_a(), shape_.num_settings_b(),
                                       shape_.num_outcomes_a(), shape_.num_outcomes_b()};
  if (table_.dims() != expected) {
    fail(ErrorCode::ShapeMismatch, "behavior table dimensions do not match shape");
  }
}

Behavior Behavior::zeros(const ScenarioShape& shape) {
  DenseTable<double> table({shape.num_settings_a(), shape.num_settings_b(),
                            shape.num_outcomes_a(), shape.num_outcomes_b()});
  return Behavior(shape, std::move(table));
}

double Behavior::at_labels(const std::string& x, const std::string& y, const std::string& a,
                           const std::string& b) const {
  return table_(shape_.settings_a().require(x), shape_.settings_b().require(y),
                shape_.outcomes_a().require(a), shape_.outcomes_b().require(b));
}

Eigen::VectorXd Behavior::marginal_a(Index x, Index y) const {
  Eigen::VectorXd marg = Eigen::VectorXd::Zero(shape_.num_outcomes_a());
  for (Index a = 0; a < shape_.num_outcomes_a(); ++a) {
    double sum = 0.0;
    for (Index b = 0; b < shape_.num_outcomes_b(); ++b) sum += table_(x, y, a, b);
    marg[a] = sum;
  }
  return marg;
}

Eigen::VectorXd Behavior::marginal_b(Index x, Index y) const {
  Eigen::VectorXd marg = Eigen::VectorXd::Zero(shape_.num_outcomes_b());
  for (Index b = 0; b < shape_.num_outcomes_b(); ++b) {
    double sum = 0.0;
    for (Index a = 0; a < shape_.num_outcomes_a(); ++a) sum += table_(x, y, a, b);
    marg[b] = sum;
  }
  return marg;
}

namespace {

// Shared scan for normalization groups: each group of cells must sum to 1
// and contain no entries below -tau_norm.
struct ConsistencyScan {
  double max_violation = 0.0;
  std::optional<Witness> witness;

  void note(double violation, const Witness& w) {
    if (violation > max_violation) {
      max_violation = violation;
      witness = w;
    }
  }
};

}  // namespace

PropertyReport validate(const Behavior& behavior, const ToleranceConfig& tol) {
  tol.check();
  const ScenarioShape& s = behavior.shape();
  ConsistencyScan scan;
  for (Eigen::Index x = 0; x < s.num_settings_a(); ++x) {
    for (Eigen::Index y = 0; y < s.num_settings_b(); ++y) {
      double sum = 0.0;
      for (Eigen::Index a = 0; a < s.num_outcomes_a(); ++a) {
        for (Eigen::Index b = 0; b < s.num_outcomes_b(); ++b) {
          const double p = behavior.at(x, y, a, b);
          if (!std::isfinite(p)) {
            fail(ErrorCode::NegativeProbability,
                 "non-finite entry at " + s.settings_a().label(x) + "|" + s.settings_b().label(y) +
                     "|" + s.outcomes_a().label(a) + "|" + s.outcomes_b().label(b));
          }
          if (p < -tol.tau_norm) {
            fail(ErrorCode::NegativeProbability,
                 "entry " + std::to_string(p) + " at " + s.settings_a().label(x) + "|" +
                     s.settings_b().label(y) + "|" + s.outcomes_a().label(a) + "|" +
                     s.outcomes_b().label(b));
          }
          if (p < 0.0) {
            Witness w;
            w.x = s.settings_a().label(x);
            w.y = s.settings_b().label(y);
            w.a = s.outcomes_a().label(a);
            w.b = s.outcomes_b().label(b);
            scan.note(-p, w);
          }
          sum += p;
        }
      }
      Witness w;
      w.x = s.settings_a().label(x);
      w.y = s.settings_b().label(y);
      scan.note(std::abs(sum - 1.0), w);
    }
  }
  return make_report(Property::Consistency, scan.max_violation, tol.tau_norm, scan.witness);
}

double signalling_violation(const Behavior& behavior) {
  const ScenarioShape& s = behavior.shape();
  double worst = 0.0;
  // A-side marginal must not react to y.
  for (Eigen::Index x = 0; x < s.num_settings_a(); ++x) {
    for (Eigen::Index y = 0; y + 1 < s.num_settings_b(); ++y) {
      for (Eigen::Index y2 = y + 1; y2 < s.num_settings_b(); ++y2) {
        const Eigen::VectorXd diff = behavior.marginal_a(x, y) - behavior.marginal_a(x, y2);
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
      }
    }
  }
  for (Eigen::Index y = 0; y < s.num_settings_b(); ++y) {
    for (Eigen::Index x = 0; x + 1 < s.num_settings_a(); ++x) {
      for (Eigen::Index x2 = x + 1; x2 < s.num_settings_a(); ++x2) {
        const Eigen::VectorXd diff = behavior.marginal_b(x, y) - behavior.marginal_b(x2, y);
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

}  // namespace lhv
