#include "lhv/model.hpp"

#include "lhv/errors.hpp"

#include <cmath>
#include <utility>

namespace lhv {

HiddenVariableModel::HiddenVariableModel(ScenarioShape shape, DenseTable<double> weights,
                                         DenseTable<double> kernels)
    : shape_(std::move(shape)), weights_(std::move(weights)), kernels_(std::move(kernels)) {
  if (!shape_.has_lambdas()) {
    fail(ErrorCode::BadParams, "hidden-variable model requires a non-empty lambda list");
  }
  const std::vector<Index> wdims = {shape_.num_settings_a(), shape_.num_settings_b(),
                                    shape_.num_lambdas()};
  const std::vector<Index> kdims = {shape_.num_settings_a(), shape_.num_settings_b(),
                                    shape_.num_lambdas(), shape_.num_outcomes_a(),
                                    shape_.num_outcomes_b()};
  if (weights_.dims() != wdims) {
    fail(ErrorCode::ShapeMismatch, "weights dimensions do not match shape");
  }
  if (kernels_.dims() != kdims) {
    fail(ErrorCode::ShapeMismatch, "kernels dimensions do not match shape");
  }
}

HiddenVariableModel HiddenVariableModel::zeros(const ScenarioShape& shape) {
  DenseTable<double> weights({shape.num_settings_a(), shape.num_settings_b(),
                              shape.num_lambdas()});
  DenseTable<double> kernels({shape.num_settings_a(), shape.num_settings_b(),
                              shape.num_lambdas(), shape.num_outcomes_a(),
                              shape.num_outcomes_b()});
  return HiddenVariableModel(shape, std::move(weights), std::move(kernels));
}

bool HiddenVariableModel::lambda_supported(Index l, double tau_support) const {
  for (Index x = 0; x < shape_.num_settings_a(); ++x) {
    for (Index y = 0; y < shape_.num_settings_b(); ++y) {
      if (weights_(x, y, l) > tau_support) return true;
    }
  }
  return false;
}

PropertyReport validate(const HiddenVariableModel& model, const ToleranceConfig& tol) {
  tol.check();
  const ScenarioShape& s = model.shape();
  double max_violation = 0.0;
  std::optional<Witness> witness;
  auto note = [&](double v, const Witness& w) {
    if (v > max_violation) {
      max_violation = v;
      witness = w;
    }
  };
  auto check_entry = [&](double p, const Witness& w, const char* what) {
    if (!std::isfinite(p)) fail(ErrorCode::NegativeProbability, std::string("non-finite ") + what);
    if (p < -tol.tau_norm) {
      fail(ErrorCode::NegativeProbability,
           std::string(what) + " entry " + std::to_string(p));
    }
    if (p < 0.0) note(-p, w);
  };

  for (Eigen::Index x = 0; x < s.num_settings_a(); ++x) {
    for (Eigen::Index y = 0; y < s.num_settings_b(); ++y) {
      double wsum = 0.0;
      for (Eigen::Index l = 0; l < s.num_lambdas(); ++l) {
        Witness w;
        w.x = s.settings_a().label(x);
        w.y = s.settings_b().label(y);
        w.lambda = s.lambdas().label(l);
        const double weight = model.weight(x, y, l);
        check_entry(weight, w, "weight");
        wsum += weight;

        double ksum = 0.0;
        for (Eigen::Index a = 0; a < s.num_outcomes_a(); ++a) {
          for (Eigen::Index b = 0; b < s.num_outcomes_b(); ++b) {
            Witness wk = w;
            wk.a = s.outcomes_a().label(a);
            wk.b = s.outcomes_b().label(b);
            const double k = model.kernel(x, y, l, a, b);
            check_entry(k, wk, "kernel");
            ksum += k;
          }
        }
        note(std::abs(ksum - 1.0), w);
      }
      Witness w;
      w.x = s.settings_a().label(x);
      w.y = s.settings_b().label(y);
      note(std::abs(wsum - 1.0), w);
    }
  }
  return make_report(Property::Consistency, max_violation, tol.tau_norm, witness);
}

void require_valid(const HiddenVariableModel& model, const ToleranceConfig& tol) {
  if (!validate(model, tol).holds) {
    fail(ErrorCode::InvalidModel, "model fails consistency validation");
  }
}

void require_valid(const Behavior& behavior, const ToleranceConfig& tol) {
  if (!validate(behavior, tol).holds) {
    fail(ErrorCode::InvalidBehavior, "behavior fails consistency validation");
  }
}

Behavior aggregate_behavior(const HiddenVariableModel& model, const ToleranceConfig& tol) {
  require_valid(model, tol);
  const ScenarioShape& s = model.shape();
  DenseTable<double> table({s.num_settings_a(), s.num_settings_b(), s.num_outcomes_a(),
                            s.num_outcomes_b()});
  for (Eigen::Index x = 0; x < s.num_settings_a(); ++x) {
    for (Eigen::Index y = 0; y < s.num_settings_b(); ++y) {
      for (Eigen::Index a = 0; a < s.num_outcomes_a(); ++a) {
        for (Eigen::Index b = 0; b < s.num_outcomes_b(); ++b) {
          double acc = 0.0;
          for (Eigen::Index l = 0; l < s.num_lambdas(); ++l) {
            acc += model.weight(x, y, l) * model.kernel(x, y, l, a, b);
          }
          table(x, y, a, b) = acc;
        }
      }
    }
  }
  return Behavior(s.without_lambdas(), std::move(table));
}

Eigen::VectorXd marginal_a(const HiddenVariableModel& model, Eigen::Index x, Eigen::Index y,
                           Eigen::Index l) {
  const ScenarioShape& s = model.shape();
  Eigen::VectorXd marg = Eigen::VectorXd::Zero(s.num_outcomes_a());
  for (Eigen::Index a = 0; a < s.num_outcomes_a(); ++a) {
    double sum = 0.0;
    for (Eigen::Index b = 0; b < s.num_outcomes_b(); ++b) sum += model.kernel(x, y, l, a, b);
    marg[a] = sum;
  }
  return marg;
}

Eigen::VectorXd marginal_b(const HiddenVariableModel& model, Eigen::Index x, Eigen::Index y,
                           Eigen::Index l) {
  const ScenarioShape& s = model.shape();
  Eigen::VectorXd marg = Eigen::VectorXd::Zero(s.num_outcomes_b());
  for (Eigen::Index b = 0; b < s.num_outcomes_b(); ++b) {
    double sum = 0.0;
    for (Eigen::Index a = 0; a < s.num_outcomes_a(); ++a) sum += model.kernel(x, y, l, a, b);
    marg[b] = sum;
  }
  return marg;
}

Eigen::VectorXd marginal_a(const HiddenVariableModel& model, const std::string& x,
                           const std::string& y, const std::string& lambda) {
  const ScenarioShape& s = model.shape();
  return marginal_a(model, s.settings_a().require(x), s.settings_b().require(y),
                    s.lambdas().require(lambda));
}

Eigen::VectorXd marginal_b(const HiddenVariableModel& model, const std::string& x,
                           const std::string& y, const std::string& lambda) {
  const ScenarioShape& s = model.shape();
  return marginal_b(model, s.settings_a().require(x), s.settings_b().require(y),
                    s.lambdas().require(lambda));
}

Behavior kernel_slice_behavior(const HiddenVariableModel& model, Eigen::Index l) {
  const ScenarioShape& s = model.shape();
  DenseTable<double> table({s.num_settings_a(), s.num_settings_b(), s.num_outcomes_a(),
                            s.num_outcomes_b()});
  for (Eigen::Index x = 0; x < s.num_settings_a(); ++x) {
    for (Eigen::Index y = 0; y < s.num_settings_b(); ++y) {
      for (Eigen::Index a = 0; a < s.num_outcomes_a(); ++a) {
        for (Eigen::Index b = 0; b < s.num_outcomes_b(); ++b) {
          table(x, y, a, b) = model.kernel(x, y, l, a, b);
        }
      }
    }
  }
  return Behavior(s.without_lambdas(), std::move(table));
}

Eigen::VectorXd condition_on(const JointDistribution& joint, Eigen::Index l0,
                             double tau_support) {
  if (l0 < 0 || l0 >= joint.p.cols()) {
    fail(ErrorCode::UnknownLabel, "conditioning column out of range");
  }
  const double mass = joint.p.col(l0).sum();
  if (mass <= tau_support) {
    fail(ErrorCode::ZeroSupport,
         "conditioning event '" + joint.labels_l[static_cast<std::size_t>(l0)] +
             "' has probability " + std::to_string(mass));
  }
  return joint.p.col(l0) / mass;
}

JointDistribution joint_ab(const HiddenVariableModel& model, Eigen::Index x, Eigen::Index y,
                           Eigen::Index l) {
  const ScenarioShape& s = model.shape();
  JointDistribution joint;
  joint.labels_j = s.outcomes_a().labels();
  joint.labels_l = s.outcomes_b().labels();
  joint.p.resize(s.num_outcomes_a(), s.num_outcomes_b());
  for (Eigen::Index a = 0; a < s.num_outcomes_a(); ++a) {
    for (Eigen::Index b = 0; b < s.num_outcomes_b(); ++b) {
      joint.p(a, b) = model.kernel(x, y, l, a, b);
    }
  }
  return joint;
}

}  // namespace lhv
