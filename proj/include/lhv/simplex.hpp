#pragma once

#include "lhv/errors.hpp"

#include <cstddef>
#include <type_traits>
#include <vector>

namespace lhv::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::Optimal;
  Scalar objective{};
  std::vector<Scalar> x;
};

template <typename Scalar>
Scalar lp_pivot_eps() {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return Scalar(1e-11);
  } else {
    return Scalar(0);  // exact arithmetic
  }
}

/// Two-phase dense tableau simplex with Bland's rule for
///     min c.x   s.t.  A x = b,  x >= 0.
/// Deterministic; exact when Scalar is an exact rational type.  Dense and
/// unscaled: intended for the desk-scale programs in this library, not as a
/// general LP solver.
template <typename Scalar>
LpResult<Scalar> solve_lp_standard(std::size_t m, std::size_t n, std::vector<Scalar> A,
                                   std::vector<Scalar> b, const std::vector<Scalar>& c,
                                   long max_pivots = 200000) {
  using std::abs;
  const Scalar eps = lp_pivot_eps<Scalar>();
  const std::size_t width = n + m + 1;  // columns + artificials + rhs
  std::vector<Scalar> T(m * width, Scalar(0));
  std::vector<std::size_t> basis(m);
  std::vector<bool> row_active(m, true);

  for (std::size_t i = 0; i < m; ++i) {
    bool flip = b[i] < Scalar(0);
    for (std::size_t j = 0; j < n; ++j) {
      T[i * width + j] = flip ? -A[i * n + j] : A[i * n + j];
    }
    T[i * width + n + i] = Scalar(1);
    T[i * width + width - 1] = flip ? -b[i] : b[i];
    basis[i] = n + i;
  }

  std::vector<Scalar> red(width, Scalar(0));  // reduced-cost row incl. rhs slot
  Scalar objective(0);

  auto rebuild_costs = [&](const std::vector<Scalar>& cost) {
    for (std::size_t j = 0; j < width; ++j) red[j] = j < cost.size() ? cost[j] : Scalar(0);
    objective = Scalar(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (!row_active[i]) continue;
      const Scalar cb = basis[i] < cost.size() ? cost[basis[i]] : Scalar(0);
      if (cb == Scalar(0)) continue;
      for (std::size_t j = 0; j < width - 1; ++j) red[j] -= cb * T[i * width + j];
      objective += cb * T[i * width + width - 1];
    }
  };

  auto pivot = [&](std::size_t pr, std::size_t pc) {
    const Scalar piv = T[pr * width + pc];
    for (std::size_t j = 0; j < width; ++j) T[pr * width + j] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == pr || !row_active[i]) continue;
      const Scalar f = T[i * width + pc];
      if (f == Scalar(0)) continue;
      for (std::size_t j = 0; j < width; ++j) T[i * width + j] -= f * T[pr * width + j];
    }
    const Scalar fr = red[pc];
    if (fr != Scalar(0)) {
      for (std::size_t j = 0; j < width - 1; ++j) red[j] -= fr * T[pr * width + j];
      objective += fr * T[pr * width + width - 1];
    }
    basis[pr] = pc;
  };

  long pivots = 0;
  auto run_phase = [&](std::size_t num_cols) -> bool {
    // num_cols limits which columns may enter (excludes artificials in
    // phase 2).  Returns false on unbounded.
    for (;;) {
      std::size_t enter = width;
      for (std::size_t j = 0; j < num_cols; ++j) {  // Bland: first improving column
        if (red[j] < -eps) {
          enter = j;
          break;
        }
      }
      if (enter == width) return true;  // optimal
      std::size_t leave = m;
      bool have_ratio = false;
      Scalar best_ratio{};
      for (std::size_t i = 0; i < m; ++i) {
        if (!row_active[i]) continue;
        const Scalar aij = T[i * width + enter];
        if (aij <= eps) continue;
        const Scalar ratio = T[i * width + width - 1] / aij;
        if (!have_ratio || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          have_ratio = true;
          best_ratio = ratio;
          leave = i;
        }
      }
      if (!have_ratio) return false;  // unbounded
      pivot(leave, enter);
      if (++pivots > max_pivots) {
        fail(ErrorCode::BadParams, "simplex pivot limit exceeded");
      }
    }
  };

  // Phase 1: minimize the sum of artificials.
  {
    std::vector<Scalar> cost(n + m, Scalar(0));
    for (std::size_t j = n; j < n + m; ++j) cost[j] = Scalar(1);
    rebuild_costs(cost);
    run_phase(n + m);  // cannot be unbounded (objective >= 0)
    if (objective > (std::is_floating_point_v<Scalar> ? Scalar(1e-8) : Scalar(0))) {
      return {LpStatus::Infeasible, objective, {}};
    }
    // Drive leftover artificials out of the basis, or drop redundant rows.
    for (std::size_t i = 0; i < m; ++i) {
      if (!row_active[i] || basis[i] < n) continue;
      std::size_t pc = width;
      for (std::size_t j = 0; j < n; ++j) {
        if (abs(T[i * width + j]) > eps && T[i * width + j] != Scalar(0)) {
          pc = j;
          break;
        }
      }
      if (pc == width) {
        row_active[i] = false;  // redundant constraint
      } else {
        pivot(i, pc);
      }
    }
  }

  // Phase 2.
  {
    std::vector<Scalar> cost(c);
    cost.resize(n + m, Scalar(0));
    rebuild_costs(cost);
    if (!run_phase(n)) return {LpStatus::Unbounded, Scalar(0), {}};
  }

  LpResult<Scalar> result;
  result.status = LpStatus::Optimal;
  result.objective = objective;
  result.x.assign(n, Scalar(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (row_active[i] && basis[i] < n) {
      result.x[basis[i]] = T[i * width + width - 1];
    }
  }
  return result;
}

}  // namespace lhv::detail
