#pragma once

#include "lhv/model.hpp"
#include "lhv/report.hpp"
#include "lhv/shape.hpp"
#include "lhv/tolerances.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lhv {

/// Bijection outcomes_b -> outcomes_a used to phrase perfect correlation for
/// scenarios whose natural pairing is not the identity (e.g. anticorrelated
/// outcomes, or differently named detector labels).
class RelabelMap {
 public:
  using Index = Eigen::Index;

  /// Requires outcomes_a == outcomes_b as ordered lists.
  static RelabelMap identity(const ScenarioShape& shape);

  /// Pairs are (b label, a label); must cover outcomes_b bijectively.
  static RelabelMap from_pairs(const ScenarioShape& shape,
                               const std::vector<std::pair<std::string, std::string>>& pairs);

  /// Index of b mapped to outcome a (the preimage of a).
  Index b_for_a(Index a) const { return a_to_b_[static_cast<std::size_t>(a)]; }
  Index a_for_b(Index b) const { return b_to_a_[static_cast<std::size_t>(b)]; }

 private:
  RelabelMap(std::vector<Index> b_to_a, std::vector<Index> a_to_b)
      : b_to_a_(std::move(b_to_a)), a_to_b_(std::move(a_to_b)) {}

  std::vector<Index> b_to_a_;
  std::vector<Index> a_to_b_;
};

/// Largest change of p(a|x,y,lambda) under a change of the distant setting
/// (and symmetrically for b).  Lambdas with no support anywhere are skipped.
PropertyReport check_weak_locality(const HiddenVariableModel& model,
                                   const ToleranceConfig& tol = {});

/// Largest cellwise gap between the kernel and the product of its own
/// (x,y)-local marginals, over supported (x,y,lambda) cells.
PropertyReport check_outcome_independence(const HiddenVariableModel& model,
                                          const ToleranceConfig& tol = {});

/// Factorization p(a,b|x,y,lambda) = p(a|x,lambda) p(b|y,lambda) with
/// setting-averaged one-side marginals.  The reported violation is the max
/// of the direct factorization gap, the weak-locality violation, and the
/// outcome-independence violation, so the verdict coincides with
/// "weak locality and outcome independence both hold".
PropertyReport check_local_causality(const HiddenVariableModel& model,
                                     const ToleranceConfig& tol = {});

/// Metamorphic check: local causality holds iff weak locality and outcome
/// independence both hold, at the same tolerance.
bool verify_lc_equivalence(const HiddenVariableModel& model, const ToleranceConfig& tol = {});

/// Largest change of p(lambda|x,y) across setting pairs.
PropertyReport check_measurement_independence(const HiddenVariableModel& model,
                                              const ToleranceConfig& tol = {});

/// Distance of the farthest supported one-side marginal from a point mass
/// (1 - max entry).
PropertyReport check_determinism(const HiddenVariableModel& model,
                                 const ToleranceConfig& tol = {});

/// 1 - sum_a p(a, relabel^-1(a) | x0, y0).
PropertyReport check_perfect_correlation(const Behavior& behavior, const std::string& x0,
                                         const std::string& y0, const RelabelMap& relabel,
                                         const ToleranceConfig& tol = {});

struct LemmaResult {
  bool holds = true;
  std::optional<std::string> witness_l;  // an l whose conditional moved the point mass
};

/// A deterministic j-marginal stays deterministic at the same point under
/// conditioning on any supported l.  Throws NotDeterministicPremise when the
/// j-marginal is not a point mass within tol.
LemmaResult lemma_conditioning_preserves_determinism(const JointDistribution& joint,
                                                     const ToleranceConfig& tol = {});

}  // namespace lhv
