#pragma once

#include "lhv/dense_table.hpp"
#include "lhv/report.hpp"
#include "lhv/shape.hpp"
#include "lhv/tolerances.hpp"

#include <string>

namespace lhv {

/// Observable joint conditional distribution p(a,b|x,y) as a dense table,
/// normalized per setting pair.  Immutable after construction.
class Behavior {
 public:
  using Index = Eigen::Index;

  Behavior(ScenarioShape shape, DenseTable<double> table);

  static Behavior zeros(const ScenarioShape& shape);

  const ScenarioShape& shape() const { return shape_; }
  const DenseTable<double>& table() const { return table_; }

  double at(Index x, Index y, Index a, Index b) const { return table_(x, y, a, b); }
  double at_labels(const std::string& x, const std::string& y, const std::string& a,
                   const std::string& b) const;

  /// p(a|x,y), summing over b in label order.
  Eigen::VectorXd marginal_a(Index x, Index y) const;
  /// p(b|x,y), summing over a in label order.
  Eigen::VectorXd marginal_b(Index x, Index y) const;

 private:
  ScenarioShape shape_;
  DenseTable<double> table_;
};

/// Maximum normalization / nonnegativity deviation of the table.  Entries
/// below -tau_norm raise NegativeProbability; milder deviations only lower
/// the verdict.
PropertyReport validate(const Behavior& behavior, const ToleranceConfig& tol = {});

/// Largest change of a one-side outcome marginal of the behavior under a
/// distant setting change (behavior-level signalling; 0 for non-signalling
/// behaviors).
double signalling_violation(const Behavior& behavior);

}  // namespace lhv
