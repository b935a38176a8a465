#include "lhv/properties.hpp"

#include "lhv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lhv {

RelabelMap RelabelMap::identity(const ScenarioShape& shape) {
  if (!(shape.outcomes_a() == shape.outcomes_b())) {
    fail(ErrorCode::IncompatibleRelabel,
         "identity relabel requires equal outcome lists on both sides");
  }
  std::vector<Index> id(static_cast<std::size_t>(shape.num_outcomes_a()));
  for (Index i = 0; i < shape.num_outcomes_a(); ++i) id[static_cast<std::size_t>(i)] = i;
  return RelabelMap(id, id);
}

RelabelMap RelabelMap::from_pairs(const ScenarioShape& shape,
                                  const std::vector<std::pair<std::string, std::string>>& pairs) {
  const Index nb = shape.num_outcomes_b();
  const Index na = shape.num_outcomes_a();
  if (na != nb) {
    fail(ErrorCode::IncompatibleRelabel, "outcome alphabets differ in size; no bijection exists");
  }
  std::vector<Index> b_to_a(static_cast<std::size_t>(nb), Index{-1});
  std::vector<Index> a_to_b(static_cast<std::size_t>(na), Index{-1});
  for (const auto& [b_label, a_label] : pairs) {
    const Index b = shape.outcomes_b().require(b_label);
    const Index a = shape.outcomes_a().require(a_label);
    if (b_to_a[static_cast<std::size_t>(b)] >= 0 || a_to_b[static_cast<std::size_t>(a)] >= 0) {
      fail(ErrorCode::IncompatibleRelabel, "relabel maps '" + b_label + "' or '" + a_label +
                                               "' more than once");
    }
    b_to_a[static_cast<std::size_t>(b)] = a;
    a_to_b[static_cast<std::size_t>(a)] = b;
  }
  for (Index b = 0; b < nb; ++b) {
    if (b_to_a[static_cast<std::size_t>(b)] < 0) {
      fail(ErrorCode::IncompatibleRelabel,
           "relabel does not cover outcome '" + shape.outcomes_b().label(b) + "'");
    }
  }
  return RelabelMap(std::move(b_to_a), std::move(a_to_b));
}

namespace {

using Index = Eigen::Index;

struct MaxTracker {
  double value = 0.0;
  std::optional<Witness> witness;

  // Keeps the first maximizer in scan order (strict improvement only), so
  // witnesses are the lexicographically first cell under the ordered labels.
  void note(double v, const Witness& w) {
    if (v > value) {
      value = v;
      witness = w;
    }
  }
  void merge(const MaxTracker& other) {
    if (other.value > value) *this = other;
  }
};

// Marginals of every kernel, precomputed: pa(x,y,l) over a, pb(x,y,l) over b.
struct KernelMarginals {
  DenseTable<double> pa;  // (x,y,l,a)
  DenseTable<double> pb;  // (x,y,l,b)

  explicit KernelMarginals(const HiddenVariableModel& model)
      : pa({model.shape().num_settings_a(), model.shape().num_settings_b(),
            model.shape().num_lambdas(), model.shape().num_outcomes_a()}),
        pb({model.shape().num_settings_a(), model.shape().num_settings_b(),
            model.shape().num_lambdas(), model.shape().num_outcomes_b()}) {
    const ScenarioShape& s = model.shape();
    for (Index x = 0; x < s.num_settings_a(); ++x) {
      for (Index y = 0; y < s.num_settings_b(); ++y) {
        for (Index l = 0; l < s.num_lambdas(); ++l) {
          for (Index a = 0; a < s.num_outcomes_a(); ++a) {
            double sum = 0.0;
            for (Index b = 0; b < s.num_outcomes_b(); ++b) sum += model.kernel(x, y, l, a, b);
            pa(x, y, l, a) = sum;
          }
          for (Index b = 0; b < s.num_outcomes_b(); ++b) {
            double sum = 0.0;
            for (Index a = 0; a < s.num_outcomes_a(); ++a) sum += model.kernel(x, y, l, a, b);
            pb(x, y, l, b) = sum;
          }
        }
      }
    }
  }
};

MaxTracker weak_locality_scan(const HiddenVariableModel& model, const KernelMarginals& marg,
                              double tau_support) {
  const ScenarioShape& s = model.shape();
  MaxTracker worst;
  // Side A: p(a|x,y,lambda) must not react to y.
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    for (Index y = 0; y + 1 < s.num_settings_b(); ++y) {
      for (Index y2 = y + 1; y2 < s.num_settings_b(); ++y2) {
        for (Index l = 0; l < s.num_lambdas(); ++l) {
          if (!model.lambda_supported(l, tau_support)) continue;
          for (Index a = 0; a < s.num_outcomes_a(); ++a) {
            const double v = std::abs(marg.pa(x, y, l, a) - marg.pa(x, y2, l, a));
            Witness w;
            w.x = s.settings_a().label(x);
            w.y = s.settings_b().label(y);
            w.y_alt = s.settings_b().label(y2);
            w.lambda = s.lambdas().label(l);
            w.a = s.outcomes_a().label(a);
            worst.note(v, w);
          }
        }
      }
    }
  }
  // Side B: p(b|x,y,lambda) must not react to x.
  for (Index x = 0; x + 1 < s.num_settings_a(); ++x) {
    for (Index x2 = x + 1; x2 < s.num_settings_a(); ++x2) {
      for (Index y = 0; y < s.num_settings_b(); ++y) {
        for (Index l = 0; l < s.num_lambdas(); ++l) {
          if (!model.lambda_supported(l, tau_support)) continue;
          for (Index b = 0; b < s.num_outcomes_b(); ++b) {
            const double v = std::abs(marg.pb(x, y, l, b) - marg.pb(x2, y, l, b));
            Witness w;
            w.x = s.settings_a().label(x);
            w.x_alt = s.settings_a().label(x2);
            w.y = s.settings_b().label(y);
            w.lambda = s.lambdas().label(l);
            w.b = s.outcomes_b().label(b);
            worst.note(v, w);
          }
        }
      }
    }
  }
  return worst;
}

MaxTracker outcome_independence_scan(const HiddenVariableModel& model,
                                     const KernelMarginals& marg, double tau_support) {
  const ScenarioShape& s = model.shape();
  MaxTracker worst;
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    for (Index y = 0; y < s.num_settings_b(); ++y) {
      for (Index l = 0; l < s.num_lambdas(); ++l) {
        if (!model.cell_supported(x, y, l, tau_support)) continue;
        for (Index a = 0; a < s.num_outcomes_a(); ++a) {
          for (Index b = 0; b < s.num_outcomes_b(); ++b) {
            const double v =
                std::abs(model.kernel(x, y, l, a, b) - marg.pa(x, y, l, a) * marg.pb(x, y, l, b));
            Witness w;
            w.x = s.settings_a().label(x);
            w.y = s.settings_b().label(y);
            w.lambda = s.lambdas().label(l);
            w.a = s.outcomes_a().label(a);
            w.b = s.outcomes_b().label(b);
            worst.note(v, w);
          }
        }
      }
    }
  }
  return worst;
}

}  // namespace

PropertyReport check_weak_locality(const HiddenVariableModel& model, const ToleranceConfig& tol) {
  require_valid(model, tol);
  const KernelMarginals marg(model);
  const MaxTracker worst = weak_locality_scan(model, marg, tol.tau_support);
  return make_report(Property::WeakLocality, worst.value, tol.tau_prop, worst.witness);
}

PropertyReport check_outcome_independence(const HiddenVariableModel& model,
                                          const ToleranceConfig& tol) {
  require_valid(model, tol);
  const KernelMarginals marg(model);
  const MaxTracker worst = outcome_independence_scan(model, marg, tol.tau_support);
  return make_report(Property::OutcomeIndependence, worst.value, tol.tau_prop, worst.witness);
}

PropertyReport check_local_causality(const HiddenVariableModel& model,
                                     const ToleranceConfig& tol) {
  require_valid(model, tol);
  const ScenarioShape& s = model.shape();
  const KernelMarginals marg(model);

  // Direct test of the factorized form with setting-independent one-side
  // marginals: p-bar(a|x,l) averages p(a|x,y,l) over y with equal weights
  // (and symmetrically for b), since the factorization literally has no
  // distant setting in either factor.
  DenseTable<double> pbar_a({s.num_settings_a(), s.num_lambdas(), s.num_outcomes_a()});
  DenseTable<double> pbar_b({s.num_settings_b(), s.num_lambdas(), s.num_outcomes_b()});
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    for (Index l = 0; l < s.num_lambdas(); ++l) {
      for (Index a = 0; a < s.num_outcomes_a(); ++a) {
        double sum = 0.0;
        for (Index y = 0; y < s.num_settings_b(); ++y) sum += marg.pa(x, y, l, a);
        pbar_a(x, l, a) = sum / static_cast<double>(s.num_settings_b());
      }
    }
  }
  for (Index y = 0; y < s.num_settings_b(); ++y) {
    for (Index l = 0; l < s.num_lambdas(); ++l) {
      for (Index b = 0; b < s.num_outcomes_b(); ++b) {
        double sum = 0.0;
        for (Index x = 0; x < s.num_settings_a(); ++x) sum += marg.pb(x, y, l, b);
        pbar_b(y, l, b) = sum / static_cast<double>(s.num_settings_a());
      }
    }
  }

  MaxTracker direct;
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    for (Index y = 0; y < s.num_settings_b(); ++y) {
      for (Index l = 0; l < s.num_lambdas(); ++l) {
        if (!model.cell_supported(x, y, l, tol.tau_support)) continue;
        for (Index a = 0; a < s.num_outcomes_a(); ++a) {
          for (Index b = 0; b < s.num_outcomes_b(); ++b) {
            const double v =
                std::abs(model.kernel(x, y, l, a, b) - pbar_a(x, l, a) * pbar_b(y, l, b));
            Witness w;
            w.x = s.settings_a().label(x);
            w.y = s.settings_b().label(y);
            w.lambda = s.lambdas().label(l);
            w.a = s.outcomes_a().label(a);
            w.b = s.outcomes_b().label(b);
            direct.note(v, w);
          }
        }
      }
    }
  }

  // Local causality is equivalent to weak locality + outcome independence;
  // fold their violations into the verdict so "holds" means exactly that
  // both ingredients pass along with the direct factorization.
  MaxTracker worst = direct;
  worst.merge(weak_locality_scan(model, marg, tol.tau_support));
  worst.merge(outcome_independence_scan(model, marg, tol.tau_support));
  return make_report(Property::LocalCausality, worst.value, tol.tau_prop, worst.witness);
}

bool verify_lc_equivalence(const HiddenVariableModel& model, const ToleranceConfig& tol) {
  const bool lc = check_local_causality(model, tol).holds;
  const bool wl = check_weak_locality(model, tol).holds;
  const bool oi = check_outcome_independence(model, tol).holds;
  return lc == (wl && oi);
}

PropertyReport check_measurement_independence(const HiddenVariableModel& model,
                                              const ToleranceConfig& tol) {
  require_valid(model, tol);
  const ScenarioShape& s = model.shape();
  MaxTracker worst;
  const Index npairs = s.num_settings_a() * s.num_settings_b();
  for (Index p = 0; p < npairs; ++p) {
    const Index x = p / s.num_settings_b();
    const Index y = p % s.num_settings_b();
    for (Index p2 = p + 1; p2 < npairs; ++p2) {
      const Index x2 = p2 / s.num_settings_b();
      const Index y2 = p2 % s.num_settings_b();
      for (Index l = 0; l < s.num_lambdas(); ++l) {
        const double v = std::abs(model.weight(x, y, l) - model.weight(x2, y2, l));
        Witness w;
        w.x = s.settings_a().label(x);
        w.y = s.settings_b().label(y);
        w.x_alt = s.settings_a().label(x2);
        w.y_alt = s.settings_b().label(y2);
        w.lambda = s.lambdas().label(l);
        worst.note(v, w);
      }
    }
  }
  return make_report(Property::MeasurementIndependence, worst.value, tol.tau_prop, worst.witness);
}

PropertyReport check_determinism(const HiddenVariableModel& model, const ToleranceConfig& tol) {
  require_valid(model, tol);
  const ScenarioShape& s = model.shape();
  const KernelMarginals marg(model);
  MaxTracker worst;
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    for (Index y = 0; y < s.num_settings_b(); ++y) {
      for (Index l = 0; l < s.num_lambdas(); ++l) {
        if (!model.cell_supported(x, y, l, tol.tau_support)) continue;
        // Distance of each one-side marginal from its nearest point mass.
        double max_a = 0.0;
        for (Index a = 0; a < s.num_outcomes_a(); ++a) max_a = std::max(max_a, marg.pa(x, y, l, a));
        double max_b = 0.0;
        for (Index b = 0; b < s.num_outcomes_b(); ++b) max_b = std::max(max_b, marg.pb(x, y, l, b));
        Witness w;
        w.x = s.settings_a().label(x);
        w.y = s.settings_b().label(y);
        w.lambda = s.lambdas().label(l);
        worst.note(1.0 - max_a, w);
        worst.note(1.0 - max_b, w);
      }
    }
  }
  return make_report(Property::Determinism, worst.value, tol.tau_prop, worst.witness);
}

PropertyReport check_perfect_correlation(const Behavior& behavior, const std::string& x0,
                                         const std::string& y0, const RelabelMap& relabel,
                                         const ToleranceConfig& tol) {
  require_valid(behavior, tol);
  const ScenarioShape& s = behavior.shape();
  const Index x = s.settings_a().require(x0);
  const Index y = s.settings_b().require(y0);
  double agree = 0.0;
  for (Index a = 0; a < s.num_outcomes_a(); ++a) {
    agree += behavior.at(x, y, a, relabel.b_for_a(a));
  }
  Witness w;
  w.x = x0;
  w.y = y0;
  return make_report(Property::PerfectCorrelation, 1.0 - agree, tol.tau_prop, w);
}

LemmaResult lemma_conditioning_preserves_determinism(const JointDistribution& joint,
                                                     const ToleranceConfig& tol) {
  tol.check();
  const Eigen::VectorXd marg_j = joint.marginal_j();
  Eigen::Index j0 = 0;
  const double peak = marg_j.maxCoeff(&j0);
  if (1.0 - peak > tol.tau_prop) {
    fail(ErrorCode::NotDeterministicPremise,
         "j-marginal is not a point mass (max entry " + std::to_string(peak) + ")");
  }
  LemmaResult result;
  for (Eigen::Index l = 0; l < joint.p.cols(); ++l) {
    if (joint.p.col(l).sum() <= tol.tau_support) continue;
    const Eigen::VectorXd cond = condition_on(joint, l, tol.tau_support);
    Eigen::Index jc = 0;
    const double cpeak = cond.maxCoeff(&jc);
    if (jc != j0 || 1.0 - cpeak > tol.tau_prop) {
      result.holds = false;
      result.witness_l = joint.labels_l[static_cast<std::size_t>(l)];
      return result;
    }
  }
  return result;
}

}  // namespace lhv
