#pragma once

#include "lhv/behavior.hpp"
#include "lhv/dense_table.hpp"
#include "lhv/report.hpp"
#include "lhv/shape.hpp"
#include "lhv/tolerances.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace lhv {

/// Hidden-variable expansion of a behavior: weights p(lambda|x,y) and
/// kernels p(a,b|x,y,lambda).  Weights may depend on the settings;
/// measurement independence is a property to check, not an assumption.
class HiddenVariableModel {
 public:
  using Index = Eigen::Index;

  HiddenVariableModel(ScenarioShape shape, DenseTable<double> weights,
                      DenseTable<double> kernels);

  static HiddenVariableModel zeros(const ScenarioShape& shape);

  const ScenarioShape& shape() const { return shape_; }
  const DenseTable<double>& weights() const { return weights_; }
  const DenseTable<double>& kernels() const { return kernels_; }

  double weight(Index x, Index y, Index l) const { return weights_(x, y, l); }
  double kernel(Index x, Index y, Index l, Index a, Index b) const {
    return kernels_(x, y, l, a, b);
  }

  /// Whether lambda carries weight above tau at this setting pair.
  bool cell_supported(Index x, Index y, Index l, double tau_support) const {
    return weights_(x, y, l) > tau_support;
  }

  /// Whether lambda carries weight above tau at any setting pair.
  bool lambda_supported(Index l, double tau_support) const;

 private:
  ScenarioShape shape_;
  DenseTable<double> weights_;
  DenseTable<double> kernels_;
};

PropertyReport validate(const HiddenVariableModel& model, const ToleranceConfig& tol = {});

/// Throws InvalidModel / InvalidBehavior unless validate(...) holds.
void require_valid(const HiddenVariableModel& model, const ToleranceConfig& tol = {});
void require_valid(const Behavior& behavior, const ToleranceConfig& tol = {});

/// p(a,b|x,y) = sum_lambda p(a,b|x,y,lambda) p(lambda|x,y), summed in
/// lambda label order.
Behavior aggregate_behavior(const HiddenVariableModel& model, const ToleranceConfig& tol = {});

/// p(a|x,y,lambda), summing the kernel over b in label order.
Eigen::VectorXd marginal_a(const HiddenVariableModel& model, Eigen::Index x, Eigen::Index y,
                           Eigen::Index l);
Eigen::VectorXd marginal_b(const HiddenVariableModel& model, Eigen::Index x, Eigen::Index y,
                           Eigen::Index l);

/// Label-addressed variants.
Eigen::VectorXd marginal_a(const HiddenVariableModel& model, const std::string& x,
                           const std::string& y, const std::string& lambda);
Eigen::VectorXd marginal_b(const HiddenVariableModel& model, const std::string& x,
                           const std::string& y, const std::string& lambda);

/// The kernel slice at a fixed lambda, viewed as a behavior.
Behavior kernel_slice_behavior(const HiddenVariableModel& model, Eigen::Index l);

/// A finite joint distribution p(j,l) for a fixed context; rows index j,
/// columns index l.
struct JointDistribution {
  std::vector<std::string> labels_j;
  std::vector<std::string> labels_l;
  Eigen::MatrixXd p;  // labels_j.size() x labels_l.size()

  Eigen::VectorXd marginal_j() const { return p.rowwise().sum(); }
  Eigen::VectorXd marginal_l() const { return p.colwise().sum().transpose(); }
};

/// p(j|l=l0) = p(j,l0)/p(l0).  Throws ZeroSupport when p(l0) <= tau_support.
Eigen::VectorXd condition_on(const JointDistribution& joint, Eigen::Index l0,
                             double tau_support = ToleranceConfig{}.tau_support);

/// The kernel at (x,y,lambda) as a joint distribution over (a,b).
JointDistribution joint_ab(const HiddenVariableModel& model, Eigen::Index x, Eigen::Index y,
                           Eigen::Index l);

}  // namespace lhv
