#pragma once

#include "lhv/behavior.hpp"
#include "lhv/model.hpp"
#include "lhv/properties.hpp"

#include <Eigen/Core>

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace lhv {

/// Labeled unit vectors in 3-space used as spin-measurement settings.
class DirectionSet {
 public:
  DirectionSet(std::vector<std::string> labels, std::vector<Eigen::Vector3d> directions);

  /// Comma-separated tokens: the axis names x, y, z, or colon-separated
  /// component triples like "0.6:0:0.8".  Components must form a unit
  /// vector within 1e-12.
  static DirectionSet parse(const std::string& spec);

  std::size_t size() const { return directions_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Eigen::Vector3d>& directions() const { return directions_; }
  const Eigen::Vector3d& direction(std::size_t i) const { return directions_[i]; }
  const std::string& label(std::size_t i) const { return labels_[i]; }

 private:
  std::vector<std::string> labels_;
  std::vector<Eigen::Vector3d> directions_;
};

/// Single setting per side, n outcomes, single lambda, kernel (1/n) delta_ab.
/// Weakly local and perfectly correlated, yet not deterministic for n >= 2.
HiddenVariableModel make_prop1_counterexample(int n);

/// p(a,b|x,y) = (1 - a b x.y)/4 over outcomes {+1,-1}.
Behavior make_singlet_behavior(const DirectionSet& dirs_a, const DirectionSet& dirs_b);

/// Signalling model reproducing the singlet statistics: lambda is the
/// second-region outcome, weights 1/2, kernel delta_{b,lambda} times
/// (1 - a lambda x.y)/2.  Outcome-independent but not weakly local.
HiddenVariableModel make_example1_model(const DirectionSet& dirs_a, const DirectionSet& dirs_b);

/// Same skeleton with the sign flipped: perfectly correlated at equal
/// settings (lambda is the earlier-region outcome of the same particle).
HiddenVariableModel make_example2_model(const DirectionSet& dirs);

/// Single particle in a two-region superposition: one setting pair,
/// outcomes found / not-found, single lambda (the wave function), kernel
/// 1/2 on the two anticorrelated cells.
HiddenVariableModel make_einstein_box_model();

/// PR-box behavior on 2x2 settings, outcomes {+1,-1}: probability 1/2 on
/// the cells where a.b = -1 iff both settings are "1".
Behavior make_pr_box_behavior();

/// The behavior reinterpreted as a single-lambda model (lambda = the state
/// preparation itself; kernel = behavior).
HiddenVariableModel behavior_as_singleton_model(const Behavior& behavior,
                                                const std::string& lambda_label = "psi");

/// Outcome of the outcome-independence + perfect-correlation => determinism
/// check on one model.
struct DeterminismWitness {
  PropertyReport oi_report;
  PropertyReport pc_report;
  /// lambda label -> (a', matching b') with p(A=a'|x0,y0,lambda) = 1.
  std::map<std::string, std::pair<std::string, std::string>> deterministic_at;
  /// Supported lambdas whose marginals at (x0,y0) are not point masses.
  /// Non-empty only if the premises hold yet determinism fails, which the
  /// theorem rules out at tol -> 0; treat as a library bug.
  std::vector<std::string> violations;

  bool premises_hold() const { return oi_report.holds && pc_report.holds; }
};

DeterminismWitness verify_prop2(const HiddenVariableModel& model, const std::string& x0,
                                const std::string& y0, const RelabelMap& relabel,
                                const ToleranceConfig& tol = {});

struct IncompletenessWitness {
  double violation = 0.0;       // outcome-independence violation of the
                                // state-as-lambda description
  PropertyReport oi_report;
};

/// Treats the quantum state itself as the hidden variable and measures how
/// far that single-lambda description is from outcome independence.  A
/// strictly positive value witnesses incompleteness under the
/// outcome-independence assumption.  Requires perfect correlation at
/// (x0,y0) under the relabel.
IncompletenessWitness incompleteness_witness(const Behavior& behavior, const std::string& x0,
                                             const std::string& y0, const RelabelMap& relabel,
                                             const ToleranceConfig& tol = {});

// Fuzz-corpus generators (seeded, reproducible).

/// Mixture of K deterministic strategies with Dirichlet-uniform weights;
/// optionally setting-dependent weights (breaking measurement independence
/// without touching the kernels).
HiddenVariableModel random_strategy_mixture(const ScenarioShape& base_shape, int num_lambdas,
                                            std::mt19937_64& rng,
                                            bool setting_dependent_weights = false);

/// Per-lambda deterministic kernels whose outcomes agree at (x0,y0) under
/// the identity relabel; satisfies outcome independence and perfect
/// correlation by construction.  Requires equal outcome alphabets.
HiddenVariableModel random_correlated_deterministic(const ScenarioShape& base_shape,
                                                    int num_lambdas, const std::string& x0,
                                                    const std::string& y0, std::mt19937_64& rng);

/// Random product kernels p(a|x,lambda) p(b|y,lambda): weakly local and
/// outcome independent up to floating noise.
HiddenVariableModel random_product_noise(const ScenarioShape& base_shape, int num_lambdas,
                                         std::mt19937_64& rng);

/// Kernels delta_{b,lambda} q(a|x,y,lambda) with y-dependent q: outcome
/// independent, weak locality generically broken.
HiddenVariableModel random_signalling(const ScenarioShape& base_shape, std::mt19937_64& rng);

/// Single lambda whose kernel correlates a and b: outcome independence
/// generically broken, weak locality vacuous at a single setting pair or
/// broken when the correlated part varies with the distant setting.
HiddenVariableModel random_correlated_singleton(const ScenarioShape& base_shape,
                                                std::mt19937_64& rng);

}  // namespace lhv
