#include "lhv/scenarios.hpp"

#include "lhv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lhv {

namespace {

using Index = Eigen::Index;

DenseTable<double> zero_weights(const ScenarioShape& s) {
  return DenseTable<double>({s.num_settings_a(), s.num_settings_b(), s.num_lambdas()});
}

DenseTable<double> zero_kernels(const ScenarioShape& s) {
  return DenseTable<double>({s.num_settings_a(), s.num_settings_b(), s.num_lambdas(),
                             s.num_outcomes_a(), s.num_outcomes_b()});
}

constexpr double kUnitNormTol = 1e-12;

Eigen::Vector3d parse_direction_token(const std::string& token) {
  if (token == "x") return Eigen::Vector3d::UnitX();
  if (token == "y") return Eigen::Vector3d::UnitY();
  if (token == "z") return Eigen::Vector3d::UnitZ();
  std::istringstream in(token);
  std::string part;
  std::vector<double> comps;
  while (std::getline(in, part, ':')) {
    try {
      std::size_t used = 0;
      comps.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      fail(ErrorCode::BadParams, "cannot parse direction component '" + part + "'");
    }
  }
  if (comps.size() != 3) {
    fail(ErrorCode::BadParams, "direction '" + token + "' needs three ':'-separated components");
  }
  return Eigen::Vector3d(comps[0], comps[1], comps[2]);
}

const std::vector<std::string> kPlusMinus = {"+1", "-1"};

double outcome_sign(Index i) { return i == 0 ? 1.0 : -1.0; }

}  // namespace

DirectionSet::DirectionSet(std::vector<std::string> labels,
                           std::vector<Eigen::Vector3d> directions)
    : labels_(std::move(labels)), directions_(std::move(directions)) {
  if (labels_.size() != directions_.size()) {
    fail(ErrorCode::BadParams, "direction labels and vectors differ in length");
  }
  if (directions_.empty()) fail(ErrorCode::BadParams, "direction set is empty");
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    if (std::abs(directions_[i].norm() - 1.0) > kUnitNormTol) {
      fail(ErrorCode::NonUnitDirection,
           "direction '" + labels_[i] + "' has norm " + std::to_string(directions_[i].norm()));
    }
  }
}

DirectionSet DirectionSet::parse(const std::string& spec) {
  std::vector<std::string> labels;
  std::vector<Eigen::Vector3d> dirs;
  std::istringstream in(spec);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) fail(ErrorCode::BadParams, "empty direction token in '" + spec + "'");
    labels.push_back(token);
    dirs.push_back(parse_direction_token(token));
  }
  return DirectionSet(std::move(labels), std::move(dirs));
}

HiddenVariableModel make_prop1_counterexample(int n) {
  if (n < 2) fail(ErrorCode::BadCardinality, "need at least 2 outcomes, got " + std::to_string(n));
  std::vector<std::string> outcomes;
  outcomes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) outcomes.push_back(std::to_string(i));
  ScenarioShape shape({"x0"}, {"y0"}, outcomes, outcomes, {"l0"});
  DenseTable<double> weights = zero_weights(shape);
  DenseTable<double> kernels = zero_kernels(shape);
  weights(0, 0, 0) = 1.0;
  const double p = 1.0 / static_cast<double>(n);
  for (Index a = 0; a < n; ++a) kernels(0, 0, 0, a, a) = p;
  return HiddenVariableModel(shape, std::move(weights), std::move(kernels));
}

namespace {

ScenarioShape spin_shape(const DirectionSet& dirs_a, const DirectionSet& dirs_b,
                         std::vector<std::string> lambdas = {}) {
  return ScenarioShape(dirs_a.labels(), dirs_b.labels(), kPlusMinus, kPlusMinus,
                       std::move(lambdas));
}

}  // namespace

Behavior make_singlet_behavior(const DirectionSet& dirs_a, const DirectionSet& dirs_b) {
  ScenarioShape shape = spin_shape(dirs_a, dirs_b);
  DenseTable<double> table({shape.num_settings_a(), shape.num_settings_b(),
                            shape.num_outcomes_a(), shape.num_outcomes_b()});
  for (Index x = 0; x < shape.num_settings_a(); ++x) {
    for (Index y = 0; y < shape.num_settings_b(); ++y) {
      const double dot = dirs_a.direction(static_cast<std::size_t>(x))
                             .dot(dirs_b.direction(static_cast<std::size_t>(y)));
      for (Index a = 0; a < 2; ++a) {
        for (Index b = 0; b < 2; ++b) {
          // Kept as 0.25 * 2 * (half-kernel) rounding pattern: see
          // make_example1_model, whose aggregate must match cell for cell.
          table(x, y, a, b) = 0.25 * (1.0 - outcome_sign(a) * outcome_sign(b) * dot);
        }
      }
    }
  }
  return Behavior(std::move(shape), std::move(table));
}

HiddenVariableModel make_example1_model(const DirectionSet& dirs_a, const DirectionSet& dirs_b) {
  ScenarioShape shape = spin_shape(dirs_a, dirs_b, kPlusMinus);
  DenseTable<double> weights = zero_weights(shape);
  DenseTable<double> kernels = zero_kernels(shape);
  for (Index x = 0; x < shape.num_settings_a(); ++x) {
    for (Index y = 0; y < shape.num_settings_b(); ++y) {
      const double dot = dirs_a.direction(static_cast<std::size_t>(x))
                             .dot(dirs_b.direction(static_cast<std::size_t>(y)));
      for (Index l = 0; l < 2; ++l) {
        weights(x, y, l) = 0.5;
        for (Index a = 0; a < 2; ++a) {
          // b is pinned to lambda (the signalled second-region outcome).
          kernels(x, y, l, a, l) = 0.5 * (1.0 - outcome_sign(a) * outcome_sign(l) * dot);
        }
      }
    }
  }
  return HiddenVariableModel(std::move(shape), std::move(weights), std::move(kernels));
}

HiddenVariableModel make_example2_model(const DirectionSet& dirs) {
  ScenarioShape shape = spin_shape(dirs, dirs, kPlusMinus);
  DenseTable<double> weights = zero_weights(shape);
  DenseTable<double> kernels = zero_kernels(shape);
  for (Index x = 0; x < shape.num_settings_a(); ++x) {
    for (Index y = 0; y < shape.num_settings_b(); ++y) {
      const double dot = dirs.direction(static_cast<std::size_t>(x))
                             .dot(dirs.direction(static_cast<std::size_t>(y)));
      for (Index l = 0; l < 2; ++l) {
        weights(x, y, l) = 0.5;
        for (Index a = 0; a < 2; ++a) {
          kernels(x, y, l, a, l) = 0.5 * (1.0 + outcome_sign(a) * outcome_sign(l) * dot);
        }
      }
    }
  }
  return HiddenVariableModel(std::move(shape), std::move(weights), std::move(kernels));
}

HiddenVariableModel make_einstein_box_model() {
  ScenarioShape shape({"detect-R1"}, {"detect-R2"}, {"found", "not-found"},
                      {"found", "not-found"}, {"psi"});
  DenseTable<double> weights = zero_weights(shape);
  DenseTable<double> kernels = zero_kernels(shape);
  weights(0, 0, 0) = 1.0;
  kernels(0, 0, 0, 0, 1) = 0.5;  // found in R1, hence not in R2
  kernels(0, 0, 0, 1, 0) = 0.5;  // and vice versa
  return HiddenVariableModel(std::move(shape), std::move(weights), std::move(kernels));
}

Behavior make_pr_box_behavior() {
  ScenarioShape shape({"0", "1"}, {"0", "1"}, kPlusMinus, kPlusMinus);
  DenseTable<double> table({2, 2, 2, 2});
  for (Index x = 0; x < 2; ++x) {
    for (Index y = 0; y < 2; ++y) {
      const double target = (x == 1 && y == 1) ? -1.0 : 1.0;  // required a.b product
      for (Index a = 0; a < 2; ++a) {
        for (Index b = 0; b < 2; ++b) {
          table(x, y, a, b) = (outcome_sign(a) * outcome_sign(b) == target) ? 0.5 : 0.0;
        }
      }
    }
  }
  return Behavior(std::move(shape), std::move(table));
}

HiddenVariableModel behavior_as_singleton_model(const Behavior& behavior,
                                                const std::string& lambda_label) {
  const ScenarioShape& s = behavior.shape();
  ScenarioShape shape = s.with_lambdas({lambda_label});
  DenseTable<double> weights = zero_weights(shape);
  DenseTable<double> kernels = zero_kernels(shape);
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    for (Index y = 0; y < s.num_settings_b(); ++y) {
      weights(x, y, 0) = 1.0;
      for (Index a = 0; a < s.num_outcomes_a(); ++a) {
        for (Index b = 0; b < s.num_outcomes_b(); ++b) {
          kernels(x, y, 0, a, b) = behavior.at(x, y, a, b);
        }
      }
    }
  }
  return HiddenVariableModel(std::move(shape), std::move(weights), std::move(kernels));
}

DeterminismWitness verify_prop2(const HiddenVariableModel& model, const std::string& x0,
                                const std::string& y0, const RelabelMap& relabel,
                                const ToleranceConfig& tol) {
  require_valid(model, tol);
  DeterminismWitness out;
  out.oi_report = check_outcome_independence(model, tol);
  out.pc_report = check_perfect_correlation(aggregate_behavior(model, tol), x0, y0, relabel, tol);
  if (!out.premises_hold()) return out;

  const ScenarioShape& s = model.shape();
  const Index x = s.settings_a().require(x0);
  const Index y = s.settings_b().require(y0);
  for (Index l = 0; l < s.num_lambdas(); ++l) {
    if (!model.cell_supported(x, y, l, tol.tau_support)) continue;
    const Eigen::VectorXd pa = marginal_a(model, x, y, l);
    const Eigen::VectorXd pb = marginal_b(model, x, y, l);
    Index a0 = 0, b0 = 0;
    const double peak_a = pa.maxCoeff(&a0);
    const double peak_b = pb.maxCoeff(&b0);
    const bool deterministic = (1.0 - peak_a) <= tol.tau_prop && (1.0 - peak_b) <= tol.tau_prop &&
                               relabel.a_for_b(b0) == a0;
    if (deterministic) {
      out.deterministic_at.emplace(s.lambdas().label(l),
                                   std::make_pair(s.outcomes_a().label(a0),
                                                  s.outcomes_b().label(b0)));
    } else {
      out.violations.push_back(s.lambdas().label(l));
    }
  }
  return out;
}

IncompletenessWitness incompleteness_witness(const Behavior& behavior, const std::string& x0,
                                             const std::string& y0, const RelabelMap& relabel,
                                             const ToleranceConfig& tol) {
  require_valid(behavior, tol);
  const PropertyReport pc = check_perfect_correlation(behavior, x0, y0, relabel, tol);
  if (!pc.holds) {
    fail(ErrorCode::NotPerfectlyCorrelated,
         "behavior is not perfectly correlated at (" + x0 + ", " + y0 + "): violation " +
             std::to_string(pc.max_violation));
  }
  const HiddenVariableModel state_as_lambda = behavior_as_singleton_model(behavior);
  IncompletenessWitness out;
  out.oi_report = check_outcome_independence(state_as_lambda, tol);
  out.violation = out.oi_report.max_violation;
  return out;
}

// ---------------------------------------------------------------------------
// Fuzz-corpus generators.

namespace {

std::vector<std::string> lambda_labels(int n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back("l" + std::to_string(i));
  return out;
}

// Dirichlet(1,...,1): normalized exponentials, uniform on the simplex.
Eigen::VectorXd dirichlet_uniform(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd v(n);
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    double u = unit(rng);
    while (u <= 0.0) u = unit(rng);
    v[i] = -std::log(u);
    sum += v[i];
  }
  return v / sum;
}

void fill_weights(DenseTable<double>& weights, const ScenarioShape& s, std::mt19937_64& rng,
                  bool setting_dependent) {
  const Index nl = s.num_lambdas();
  Eigen::VectorXd shared = dirichlet_uniform(nl, rng);
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    for (Index y = 0; y < s.num_settings_b(); ++y) {
      const Eigen::VectorXd w = setting_dependent ? dirichlet_uniform(nl, rng) : shared;
      for (Index l = 0; l < nl; ++l) weights(x, y, l) = w[l];
    }
  }
}

}  // namespace

HiddenVariableModel random_strategy_mixture(const ScenarioShape& base_shape, int num_lambdas,
                                            std::mt19937_64& rng,
                                            bool setting_dependent_weights) {
  ScenarioShape shape = base_shape.with_lambdas(lambda_labels(num_lambdas));
  DenseTable<double> weights = zero_weights(shape);
  DenseTable<double> kernels = zero_kernels(shape);
  fill_weights(weights, shape, rng, setting_dependent_weights);
  std::uniform_int_distribution<Index> pick_a(0, shape.num_outcomes_a() - 1);
  std::uniform_int_distribution<Index> pick_b(0, shape.num_outcomes_b() - 1);
  for (Index l = 0; l < shape.num_lambdas(); ++l) {
    std::vector<Index> fa(static_cast<std::size_t>(shape.num_settings_a()));
    std::vector<Index> fb(static_cast<std::size_t>(shape.num_settings_b()));
    for (auto& v : fa) v = pick_a(rng);
    for (auto& v : fb) v = pick_b(rng);
    for (Index x = 0; x < shape.num_settings_a(); ++x) {
      for (Index y = 0; y < shape.num_settings_b(); ++y) {
        kernels(x, y, l, fa[static_cast<std::size_t>(x)], fb[static_cast<std::size_t>(y)]) = 1.0;
      }
    }
  }
  return HiddenVariableModel(std::move(shape), std::move(weights), std::move(kernels));
}

HiddenVariableModel random_correlated_deterministic(const ScenarioShape& base_shape,
                                                    int num_lambdas, const std::string& x0,
                                                    const std::string& y0,
                                                    std::mt19937_64& rng) {
  if (!(base_shape.outcomes_a() == base_shape.outcomes_b())) {
    fail(ErrorCode::BadParams, "correlated corpus needs equal outcome alphabets");
  }
  ScenarioShape shape = base_shape.with_lambdas(lambda_labels(num_lambdas));
  const Index ix0 = shape.settings_a().require(x0);
  const Index iy0 = shape.settings_b().require(y0);
  DenseTable<double> weights = zero_weights(shape);
  DenseTable<double> kernels = zero_kernels(shape);
  std::bernoulli_distribution coin(0.5);
  fill_weights(weights, shape, rng, coin(rng));
  std::uniform_int_distribution<Index> pick_a(0, shape.num_outcomes_a() - 1);
  std::uniform_int_distribution<Index> pick_b(0, shape.num_outcomes_b() - 1);
  for (Index l = 0; l < shape.num_lambdas(); ++l) {
    std::vector<Index> fa(static_cast<std::size_t>(shape.num_settings_a()));
    std::vector<Index> fb(static_cast<std::size_t>(shape.num_settings_b()));
    for (auto& v : fa) v = pick_a(rng);
    for (auto& v : fb) v = pick_b(rng);
    // Identity-relabel agreement at the perfectly correlated pair.
    fb[static_cast<std::size_t>(iy0)] = fa[static_cast<std::size_t>(ix0)];
    for (Index x = 0; x < shape.num_settings_a(); ++x) {
      for (Index y = 0; y < shape.num_settings_b(); ++y) {
        kernels(x, y, l, fa[static_cast<std::size_t>(x)], fb[static_cast<std::size_t>(y)]) = 1.0;
      }
    }
  }
  return HiddenVariableModel(std::move(shape), std::move(weights), std::move(kernels));
}

HiddenVariableModel random_product_noise(const ScenarioShape& base_shape, int num_lambdas,
                                         std::mt19937_64& rng) {
  ScenarioShape shape = base_shape.with_lambdas(lambda_labels(num_lambdas));
  DenseTable<double> weights = zero_weights(shape);
  DenseTable<double> kernels = zero_kernels(shape);
  fill_weights(weights, shape, rng, false);
  for (Index l = 0; l < shape.num_lambdas(); ++l) {
    std::vector<Eigen::VectorXd> pa, pb;
    for (Index x = 0; x < shape.num_settings_a(); ++x) {
      pa.push_back(dirichlet_uniform(shape.num_outcomes_a(), rng));
    }
    for (Index y = 0; y < shape.num_settings_b(); ++y) {
      pb.push_back(dirichlet_uniform(shape.num_outcomes_b(), rng));
    }
    for (Index x = 0; x < shape.num_settings_a(); ++x) {
      for (Index y = 0; y < shape.num_settings_b(); ++y) {
        for (Index a = 0; a < shape.num_outcomes_a(); ++a) {
          for (Index b = 0; b < shape.num_outcomes_b(); ++b) {
            kernels(x, y, l, a, b) =
                pa[static_cast<std::size_t>(x)][a] * pb[static_cast<std::size_t>(y)][b];
          }
        }
      }
    }
  }
  return HiddenVariableModel(std::move(shape), std::move(weights), std::move(kernels));
}

HiddenVariableModel random_signalling(const ScenarioShape& base_shape, std::mt19937_64& rng) {
  if (!(base_shape.outcomes_a() == base_shape.outcomes_b())) {
    fail(ErrorCode::BadParams, "signalling corpus needs equal outcome alphabets");
  }
  const Index nl = base_shape.num_outcomes_b();
  std::vector<std::string> lambdas = base_shape.outcomes_b().labels();
  ScenarioShape shape = base_shape.with_lambdas(std::move(lambdas));
  DenseTable<double> weights = zero_weights(shape);
  DenseTable<double> kernels = zero_kernels(shape);
  fill_weights(weights, shape, rng, false);
  // b is pinned to lambda while a's distribution depends on (x, y, lambda):
  // outcome independent, generically signalling.
  for (Index l = 0; l < nl; ++l) {
    for (Index x = 0; x < shape.num_settings_a(); ++x) {
      for (Index y = 0; y < shape.num_settings_b(); ++y) {
        const Eigen::VectorXd qa = dirichlet_uniform(shape.num_outcomes_a(), rng);
        for (Index a = 0; a < shape.num_outcomes_a(); ++a) kernels(x, y, l, a, l) = qa[a];
      }
    }
  }
  return HiddenVariableModel(std::move(shape), std::move(weights), std::move(kernels));
}

HiddenVariableModel random_correlated_singleton(const ScenarioShape& base_shape,
                                                std::mt19937_64& rng) {
  ScenarioShape shape = base_shape.with_lambdas({"l0"});
  DenseTable<double> weights = zero_weights(shape);
  DenseTable<double> kernels = zero_kernels(shape);
  for (Index x = 0; x < shape.num_settings_a(); ++x) {
    for (Index y = 0; y < shape.num_settings_b(); ++y) {
      weights(x, y, 0) = 1.0;
      const Eigen::VectorXd joint =
          dirichlet_uniform(shape.num_outcomes_a() * shape.num_outcomes_b(), rng);
      Index i = 0;
      for (Index a = 0; a < shape.num_outcomes_a(); ++a) {
        for (Index b = 0; b < shape.num_outcomes_b(); ++b) kernels(x, y, 0, a, b) = joint[i++];
      }
    }
  }
  return HiddenVariableModel(std::move(shape), std::move(weights), std::move(kernels));
}

}  // namespace lhv
