#pragma once

#include "lhv/behavior.hpp"
#include "lhv/dense_table.hpp"
#include "lhv/model.hpp"
#include "lhv/report.hpp"
#include "lhv/tolerances.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lhv {

/// Assignment of one outcome per setting on each side.
struct DeterministicStrategy {
  std::vector<Eigen::Index> outcome_a;  // per settings_a index
  std::vector<Eigen::Index> outcome_b;  // per settings_b index
};

/// All deterministic strategies of the shape, duplicate-free, in
/// lexicographic order of the concatenated outcome tuples.  Guarded at
/// max_count (default 10^6).
std::vector<DeterministicStrategy> enumerate_deterministic_strategies(
    const ScenarioShape& shape, std::uint64_t max_count = 1000000);

std::uint64_t count_deterministic_strategies(const ScenarioShape& shape);

/// The 0/1 behavior generated by a strategy.
Behavior strategy_behavior(const ScenarioShape& shape, const DeterministicStrategy& strategy);

/// Separating functional found when a behavior lies outside the local
/// polytope: a per-cell coefficient table c with
///     c . behavior  >  max over deterministic strategies of  c . strategy.
/// Coefficients are canonicalized to zero mean per setting pair and sup
/// norm 1, so for binary scenarios a violated CHSH facet is reported with
/// its conventional value (local bound 2).
struct BellCertificate {
  DenseTable<double> coefficients;  // axes (x,y,a,b)
  double behavior_value = 0.0;
  double local_bound = 0.0;
  double gap = 0.0;  // behavior_value - local_bound, > 0 for a certificate
};

struct LocalDecomposition {
  std::vector<double> weights;  // aligned with enumerate_deterministic_strategies
  double residual = 0.0;        // max cellwise reconstruction error
};

struct LocalDecompositionResult {
  bool feasible = false;
  std::optional<LocalDecomposition> decomposition;  // set when feasible
  std::optional<BellCertificate> certificate;       // set when infeasible
};

/// Local-polytope membership by linear feasibility over the enumerated
/// strategies.  Shapes with at most 16 strategies are decided in exact
/// rational arithmetic; larger shapes use the double-precision solver.
LocalDecompositionResult local_decomposition(const Behavior& behavior, double tol = 1e-8,
                                             std::uint64_t max_strategies = 1000000);

/// S = E(x,y) + E(x,y') + E(x',y) - E(x',y') with E the +-1 correlator.
/// Outcome labels must parse to the alphabet {+1,-1}.
double chsh_value(const Behavior& behavior, const std::string& x, const std::string& x_prime,
                  const std::string& y, const std::string& y_prime);

/// The eight setting/outcome sign symmetries of the CHSH functional for a
/// 2-setting 2-outcome shape; returns the maximum |S| and the attaining
/// coefficient table.
double max_chsh_violation(const Behavior& behavior, DenseTable<double>* coefficients = nullptr);

/// Relaxed one-way decomposition of the kernels: per lambda,
///     w(l) p(a|x,l) p(b|a,y,l) + (1-w(l)) p(a|b,x,l) p(b|y,l).
struct OneWayDecomposition {
  ScenarioShape shape;
  DenseTable<double> w_ab;      // (l), weight of the A->B branch; B->A gets 1-w
  DenseTable<double> p_a_x;     // (l,x,a)
  DenseTable<double> p_b_ay;    // (l,y,a,b)
  DenseTable<double> p_a_bx;    // (l,x,b,a)
  DenseTable<double> p_b_y;     // (l,y,b)

  static OneWayDecomposition zeros(const ScenarioShape& shape);

  /// Reconstructed kernel value.
  double reconstruct(Eigen::Index x, Eigen::Index y, Eigen::Index l, Eigen::Index a,
                     Eigen::Index b) const;
};

/// Max cellwise gap between the model's kernels and the decomposition's
/// reconstruction, over supported cells.
PropertyReport verify_oneway_form(const HiddenVariableModel& model,
                                  const OneWayDecomposition& decomposition,
                                  const ToleranceConfig& tol = {});

/// The embedding that realizes any locally causal model in one-way form:
/// both branches equal the p(a|x,l) p(b|y,l) product of the model's
/// setting-averaged marginals, w = 1/2.
OneWayDecomposition canonical_oneway_embedding(const HiddenVariableModel& model);

struct OneWaySearchResult {
  bool found = false;
  double residual = 0.0;           // best residual encountered
  OneWayDecomposition decomposition;  // best candidate (single lambda)
  /// The search is a heuristic (grid over w + alternating least squares);
  /// found == false bounds nothing and is NOT a proof of infeasibility.
  std::string note;
};

/// Heuristic search for a single-lambda one-way decomposition of a
/// behavior: grid over w with grid_steps points in [0,1], alternating
/// least squares on the factor tables with projection onto the
/// probability simplex.  Deterministic for a fixed seed.
OneWaySearchResult search_oneway_single_lambda(const Behavior& behavior, int grid_steps = 11,
                                               double tol = 1e-9, std::uint64_t seed = 1);

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

}  // namespace lhv
