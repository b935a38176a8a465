#include "lhv/feasibility.hpp"

#include "lhv/errors.hpp"
#include "lhv/simplex.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace lhv {

namespace {

using Index = Eigen::Index;
using Rational = boost::multiprecision::cpp_rational;

}  // namespace

std::uint64_t count_deterministic_strategies(const ScenarioShape& shape) {
  auto checked_pow = [](std::uint64_t base, Index exp) {
    std::uint64_t out = 1;
    for (Index i = 0; i < exp; ++i) {
      if (out > (1ull << 62) / base) return std::uint64_t{1} << 63;  // saturate
      out *= base;
    }
    return out;
  };
  const std::uint64_t na = checked_pow(static_cast<std::uint64_t>(shape.num_outcomes_a()),
                                       shape.num_settings_a());
  const std::uint64_t nb = checked_pow(static_cast<std::uint64_t>(shape.num_outcomes_b()),
                                       shape.num_settings_b());
  if (na > (1ull << 62) / std::max<std::uint64_t>(nb, 1)) return std::uint64_t{1} << 63;
  return na * nb;
}

std::vector<DeterministicStrategy> enumerate_deterministic_strategies(const ScenarioShape& shape,
                                                                      std::uint64_t max_count) {
  const std::uint64_t total = count_deterministic_strategies(shape);
  if (total > max_count) {
    fail(ErrorCode::TooLarge, std::to_string(total) + " deterministic strategies exceed the " +
                                  std::to_string(max_count) + " guard");
  }
  std::vector<DeterministicStrategy> out;
  out.reserve(total);
  DeterministicStrategy s;
  s.outcome_a.assign(static_cast<std::size_t>(shape.num_settings_a()), 0);
  s.outcome_b.assign(static_cast<std::size_t>(shape.num_settings_b()), 0);
  // Odometer over the concatenated tuple (f_a, f_b), last coordinate
  // fastest, which is lexicographic order of the tuples.
  for (;;) {
    out.push_back(s);
    int pos = static_cast<int>(s.outcome_a.size() + s.outcome_b.size()) - 1;
    for (; pos >= 0; --pos) {
      const bool is_b = pos >= static_cast<int>(s.outcome_a.size());
      Index& digit = is_b ? s.outcome_b[static_cast<std::size_t>(
                                pos - static_cast<int>(s.outcome_a.size()))]
                          : s.outcome_a[static_cast<std::size_t>(pos)];
      const Index radix = is_b ? shape.num_outcomes_b() : shape.num_outcomes_a();
      if (++digit < radix) break;
      digit = 0;
    }
    if (pos < 0) break;
  }
  return out;
}

Behavior strategy_behavior(const ScenarioShape& shape, const DeterministicStrategy& strategy) {
  DenseTable<double> table({shape.num_settings_a(), shape.num_settings_b(),
                            shape.num_outcomes_a(), shape.num_outcomes_b()});
  for (Index x = 0; x < shape.num_settings_a(); ++x) {
    for (Index y = 0; y < shape.num_settings_b(); ++y) {
      table(x, y, strategy.outcome_a[static_cast<std::size_t>(x)],
            strategy.outcome_b[static_cast<std::size_t>(y)]) = 1.0;
    }
  }
  return Behavior(shape.without_lambdas(), std::move(table));
}

namespace {

// Cell values of a strategy without materializing its behavior.
inline bool strategy_hits(const DeterministicStrategy& s, Index x, Index y, Index a, Index b) {
  return s.outcome_a[static_cast<std::size_t>(x)] == a &&
         s.outcome_b[static_cast<std::size_t>(y)] == b;
}

struct CellIndexer {
  Index nx, ny, na, nb;
  explicit CellIndexer(const ScenarioShape& s)
      : nx(s.num_settings_a()), ny(s.num_settings_b()), na(s.num_outcomes_a()),
        nb(s.num_outcomes_b()) {}
  Index count() const { return nx * ny * na * nb; }
  Index operator()(Index x, Index y, Index a, Index b) const {
    return ((x * ny + y) * na + a) * nb + b;
  }
};

// min t  s.t.  |(M q - p)_i| <= t,  sum q = 1,  q >= 0.
// Columns: q (nS), t, u (nc), v (nc).
template <typename Scalar>
detail::LpResult<Scalar> solve_weight_lp(const std::vector<DeterministicStrategy>& strategies,
                                         const Behavior& behavior, const CellIndexer& cells) {
  const std::size_t nS = strategies.size();
  const std::size_t nc = static_cast<std::size_t>(cells.count());
  const std::size_t n = nS + 1 + 2 * nc;
  const std::size_t m = 2 * nc + 1;
  std::vector<Scalar> A(m * n, Scalar(0));
  std::vector<Scalar> b(m, Scalar(0));
  std::vector<Scalar> c(n, Scalar(0));
  c[nS] = Scalar(1);  // minimize t

  for (Index x = 0; x < cells.nx; ++x) {
    for (Index y = 0; y < cells.ny; ++y) {
      for (Index a = 0; a < cells.na; ++a) {
        for (Index bb = 0; bb < cells.nb; ++bb) {
          const std::size_t i = static_cast<std::size_t>(cells(x, y, a, bb));
          const Scalar p(behavior.at(x, y, a, bb));
          for (std::size_t s = 0; s < nS; ++s) {
            if (strategy_hits(strategies[s], x, y, a, bb)) {
              A[i * n + s] = Scalar(1);
              A[(nc + i) * n + s] = Scalar(-1);
            }
          }
          A[i * n + nS] = Scalar(-1);
          A[i * n + nS + 1 + i] = Scalar(1);
          b[i] = p;
          A[(nc + i) * n + nS] = Scalar(-1);
          A[(nc + i) * n + nS + 1 + nc + i] = Scalar(1);
          b[nc + i] = -p;
        }
      }
    }
  }
  for (std::size_t s = 0; s < nS; ++s) A[(2 * nc) * n + s] = Scalar(1);
  b[2 * nc] = Scalar(1);
  return detail::solve_lp_standard<Scalar>(m, n, std::move(A), std::move(b), c);
}

// max  c.p - B  over coefficient tables c in [-1,1] with zero mean per
// setting pair, subject to c.s <= B for every strategy s.  Encoded with
// u = c + 1 in [0,2].  Columns: u (nc), B+ , B-, strategy slacks (nS),
// box slacks (nc).
template <typename Scalar>
detail::LpResult<Scalar> solve_certificate_lp(const std::vector<DeterministicStrategy>& strategies,
                                              const Behavior& behavior, const CellIndexer& cells) {
  const std::size_t nS = strategies.size();
  const std::size_t nc = static_cast<std::size_t>(cells.count());
  const std::size_t nxy = static_cast<std::size_t>(cells.nx * cells.ny);
  const std::size_t n = nc + 2 + nS + nc;
  const std::size_t m = nS + nc + nxy;
  std::vector<Scalar> A(m * n, Scalar(0));
  std::vector<Scalar> b(m, Scalar(0));
  std::vector<Scalar> c(n, Scalar(0));

  // Objective: minimize -(sum_i p_i u_i) + B+ - B-.
  for (Index x = 0; x < cells.nx; ++x) {
    for (Index y = 0; y < cells.ny; ++y) {
      for (Index a = 0; a < cells.na; ++a) {
        for (Index bb = 0; bb < cells.nb; ++bb) {
          c[static_cast<std::size_t>(cells(x, y, a, bb))] = Scalar(-behavior.at(x, y, a, bb));
        }
      }
    }
  }
  c[nc] = Scalar(1);
  c[nc + 1] = Scalar(-1);

  // Strategy rows: sum_i M_is u_i - B+ + B- + slack_s = sum_i M_is (= nxy).
  for (std::size_t s = 0; s < nS; ++s) {
    for (Index x = 0; x < cells.nx; ++x) {
      for (Index y = 0; y < cells.ny; ++y) {
        const Index a = strategies[s].outcome_a[static_cast<std::size_t>(x)];
        const Index bb = strategies[s].outcome_b[static_cast<std::size_t>(y)];
        A[s * n + static_cast<std::size_t>(cells(x, y, a, bb))] = Scalar(1);
      }
    }
    A[s * n + nc] = Scalar(-1);
    A[s * n + nc + 1] = Scalar(1);
    A[s * n + nc + 2 + s] = Scalar(1);
    b[s] = Scalar(static_cast<double>(nxy));
  }
  // Box rows: u_i + w_i = 2.
  for (std::size_t i = 0; i < nc; ++i) {
    A[(nS + i) * n + i] = Scalar(1);
    A[(nS + i) * n + nc + 2 + nS + i] = Scalar(1);
    b[nS + i] = Scalar(2);
  }
  // Centering rows: sum_(a,b) u = na * nb per setting pair.
  for (Index x = 0; x < cells.nx; ++x) {
    for (Index y = 0; y < cells.ny; ++y) {
      const std::size_t row = nS + nc + static_cast<std::size_t>(x * cells.ny + y);
      for (Index a = 0; a < cells.na; ++a) {
        for (Index bb = 0; bb < cells.nb; ++bb) {
          A[row * n + static_cast<std::size_t>(cells(x, y, a, bb))] = Scalar(1);
        }
      }
      b[row] = Scalar(static_cast<double>(cells.na * cells.nb));
    }
  }
  return detail::solve_lp_standard<Scalar>(m, n, std::move(A), std::move(b), c);
}

template <typename Scalar>
double to_double(const Scalar& v) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return v;
  } else {
    return static_cast<double>(v);
  }
}

template <typename Scalar>
LocalDecompositionResult run_local_decomposition(
    const std::vector<DeterministicStrategy>& strategies, const Behavior& behavior, double tol) {
  const CellIndexer cells(behavior.shape());
  LocalDecompositionResult result;

  auto weight_lp = solve_weight_lp<Scalar>(strategies, behavior, cells);
  if (weight_lp.status != detail::LpStatus::Optimal) {
    fail(ErrorCode::BadParams, "weight LP failed to solve");  // cannot happen: always feasible
  }
  if (to_double(weight_lp.objective) <= tol) {
    LocalDecomposition dec;
    dec.weights.resize(strategies.size());
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      dec.weights[s] = to_double(weight_lp.x[s]);
    }
    // Recompute the max cell residual directly from the weights.
    double residual = 0.0;
    for (Index x = 0; x < cells.nx; ++x) {
      for (Index y = 0; y < cells.ny; ++y) {
        for (Index a = 0; a < cells.na; ++a) {
          for (Index bb = 0; bb < cells.nb; ++bb) {
            double rec = 0.0;
            for (std::size_t s = 0; s < strategies.size(); ++s) {
              if (strategy_hits(strategies[s], x, y, a, bb)) rec += dec.weights[s];
            }
            residual = std::max(residual, std::abs(rec - behavior.at(x, y, a, bb)));
          }
        }
      }
    }
    dec.residual = residual;
    result.feasible = true;
    result.decomposition = std::move(dec);
    return result;
  }

  auto cert_lp = solve_certificate_lp<Scalar>(strategies, behavior, cells);
  if (cert_lp.status != detail::LpStatus::Optimal) {
    fail(ErrorCode::BadParams, "certificate LP failed to solve");
  }
  BellCertificate cert;
  cert.coefficients = DenseTable<double>({cells.nx, cells.ny, cells.na, cells.nb});
  for (Index x = 0; x < cells.nx; ++x) {
    for (Index y = 0; y < cells.ny; ++y) {
      for (Index a = 0; a < cells.na; ++a) {
        for (Index bb = 0; bb < cells.nb; ++bb) {
          cert.coefficients(x, y, a, bb) =
              to_double(cert_lp.x[static_cast<std::size_t>(cells(x, y, a, bb))]) - 1.0;
        }
      }
    }
  }
  double value = 0.0;
  for (Index x = 0; x < cells.nx; ++x) {
    for (Index y = 0; y < cells.ny; ++y) {
      for (Index a = 0; a < cells.na; ++a) {
        for (Index bb = 0; bb < cells.nb; ++bb) {
          value += cert.coefficients(x, y, a, bb) * behavior.at(x, y, a, bb);
        }
      }
    }
  }
  double bound = -std::numeric_limits<double>::infinity();
  for (const DeterministicStrategy& s : strategies) {
    double sv = 0.0;
    for (Index x = 0; x < cells.nx; ++x) {
      for (Index y = 0; y < cells.ny; ++y) {
        sv += cert.coefficients(x, y, s.outcome_a[static_cast<std::size_t>(x)],
                                s.outcome_b[static_cast<std::size_t>(y)]);
      }
    }
    bound = std::max(bound, sv);
  }
  cert.behavior_value = value;
  cert.local_bound = bound;
  cert.gap = value - bound;
  result.feasible = false;
  result.certificate = std::move(cert);
  return result;
}

}  // namespace

LocalDecompositionResult local_decomposition(const Behavior& behavior, double tol,
                                             std::uint64_t max_strategies) {
  require_valid(behavior);
  if (!(tol > 0.0)) fail(ErrorCode::BadParams, "tolerance must be positive");
  const std::vector<DeterministicStrategy> strategies =
      enumerate_deterministic_strategies(behavior.shape(), max_strategies);
  // Small shapes are decided in exact rational arithmetic, which removes
  // any dependence on floating-point LP behavior from the verdict.
  if (strategies.size() <= 16) {
    return run_local_decomposition<Rational>(strategies, behavior, tol);
  }
  return run_local_decomposition<double>(strategies, behavior, tol);
}

namespace {

double outcome_value(const std::string& label) {
  try {
    std::size_t used = 0;
    const double v = std::stod(label, &used);
    if (used == label.size() && (v == 1.0 || v == -1.0)) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::BadOutcomeAlphabet, "outcome label '" + label + "' is not +1 or -1");
}

double correlator(const Behavior& behavior, Index x, Index y, const Eigen::VectorXd& sign_a,
                  const Eigen::VectorXd& sign_b) {
  double e = 0.0;
  const ScenarioShape& s = behavior.shape();
  for (Index a = 0; a < s.num_outcomes_a(); ++a) {
    for (Index b = 0; b < s.num_outcomes_b(); ++b) {
      e += sign_a[a] * sign_b[b] * behavior.at(x, y, a, b);
    }
  }
  return e;
}

Eigen::VectorXd outcome_signs(const LabelAxis& axis) {
  Eigen::VectorXd signs(axis.size());
  for (Index i = 0; i < axis.size(); ++i) signs[i] = outcome_value(axis.label(i));
  if (axis.size() != 2 || signs[0] == signs[1]) {
    fail(ErrorCode::BadOutcomeAlphabet, "outcome alphabet must be exactly {+1, -1}");
  }
  return signs;
}

}  // namespace

double chsh_value(const Behavior& behavior, const std::string& x, const std::string& x_prime,
                  const std::string& y, const std::string& y_prime) {
  require_valid(behavior);
  const ScenarioShape& s = behavior.shape();
  const Eigen::VectorXd sa = outcome_signs(s.outcomes_a());
  const Eigen::VectorXd sb = outcome_signs(s.outcomes_b());
  const Index ix = s.settings_a().require(x);
  const Index ix2 = s.settings_a().require(x_prime);
  const Index iy = s.settings_b().require(y);
  const Index iy2 = s.settings_b().require(y_prime);
  return correlator(behavior, ix, iy, sa, sb) + correlator(behavior, ix, iy2, sa, sb) +
         correlator(behavior, ix2, iy, sa, sb) - correlator(behavior, ix2, iy2, sa, sb);
}

double max_chsh_violation(const Behavior& behavior, DenseTable<double>* coefficients) {
  require_valid(behavior);
  const ScenarioShape& s = behavior.shape();
  if (s.num_settings_a() != 2 || s.num_settings_b() != 2) {
    fail(ErrorCode::ShapeMismatch, "CHSH scan needs two settings per side");
  }
  const Eigen::VectorXd sa = outcome_signs(s.outcomes_a());
  const Eigen::VectorXd sb = outcome_signs(s.outcomes_b());
  Eigen::Matrix2d E;
  for (Index x = 0; x < 2; ++x) {
    for (Index y = 0; y < 2; ++y) E(x, y) = correlator(behavior, x, y, sa, sb);
  }
  double best = -1.0;
  Eigen::Matrix2d best_signs = Eigen::Matrix2d::Ones();
  for (int minus_pos = 0; minus_pos < 4; ++minus_pos) {
    Eigen::Matrix2d signs = Eigen::Matrix2d::Ones();
    signs(minus_pos / 2, minus_pos % 2) = -1.0;
    for (double global : {1.0, -1.0}) {
      const double value = global * (signs.array() * E.array()).sum();
      if (value > best) {
        best = value;
        best_signs = global * signs;
      }
    }
  }
  if (coefficients != nullptr) {
    *coefficients = DenseTable<double>({2, 2, 2, 2});
    for (Index x = 0; x < 2; ++x) {
      for (Index y = 0; y < 2; ++y) {
        for (Index a = 0; a < 2; ++a) {
          for (Index b = 0; b < 2; ++b) {
            (*coefficients)(x, y, a, b) = best_signs(x, y) * sa[a] * sb[b];
          }
        }
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// One-way decompositions.

OneWayDecomposition OneWayDecomposition::zeros(const ScenarioShape& shape) {
  OneWayDecomposition d{shape,
                        DenseTable<double>({shape.num_lambdas()}),
                        DenseTable<double>({shape.num_lambdas(), shape.num_settings_a(),
                                            shape.num_outcomes_a()}),
                        DenseTable<double>({shape.num_lambdas(), shape.num_settings_b(),
                                            shape.num_outcomes_a(), shape.num_outcomes_b()}),
                        DenseTable<double>({shape.num_lambdas(), shape.num_settings_a(),
                                            shape.num_outcomes_b(), shape.num_outcomes_a()}),
                        DenseTable<double>({shape.num_lambdas(), shape.num_settings_b(),
                                            shape.num_outcomes_b()})};
  return d;
}

double OneWayDecomposition::reconstruct(Index x, Index y, Index l, Index a, Index b) const {
  const double w = w_ab(l);
  return w * p_a_x(l, x, a) * p_b_ay(l, y, a, b) +
         (1.0 - w) * p_a_bx(l, x, b, a) * p_b_y(l, y, b);
}

PropertyReport verify_oneway_form(const HiddenVariableModel& model,
                                  const OneWayDecomposition& decomposition,
                                  const ToleranceConfig& tol) {
  require_valid(model, tol);
  if (!(decomposition.shape == model.shape())) {
    fail(ErrorCode::ShapeMismatch, "decomposition shape does not match model shape");
  }
  const ScenarioShape& s = model.shape();
  double worst = 0.0;
  std::optional<Witness> witness;
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    for (Index y = 0; y < s.num_settings_b(); ++y) {
      for (Index l = 0; l < s.num_lambdas(); ++l) {
        if (!model.cell_supported(x, y, l, tol.tau_support)) continue;
        for (Index a = 0; a < s.num_outcomes_a(); ++a) {
          for (Index b = 0; b < s.num_outcomes_b(); ++b) {
            const double v = std::abs(model.kernel(x, y, l, a, b) -
                                      decomposition.reconstruct(x, y, l, a, b));
            if (v > worst) {
              worst = v;
              Witness w;
              w.x = s.settings_a().label(x);
              w.y = s.settings_b().label(y);
              w.lambda = s.lambdas().label(l);
              w.a = s.outcomes_a().label(a);
              w.b = s.outcomes_b().label(b);
              witness = w;
            }
          }
        }
      }
    }
  }
  return make_report(Property::OneWayForm, worst, tol.tau_prop, witness);
}

OneWayDecomposition canonical_oneway_embedding(const HiddenVariableModel& model) {
  const ScenarioShape& s = model.shape();
  OneWayDecomposition d = OneWayDecomposition::zeros(s);
  for (Index l = 0; l < s.num_lambdas(); ++l) {
    d.w_ab(l) = 0.5;
    // Setting-averaged marginals; exact for locally causal kernels.
    for (Index x = 0; x < s.num_settings_a(); ++x) {
      Eigen::VectorXd pa = Eigen::VectorXd::Zero(s.num_outcomes_a());
      for (Index y = 0; y < s.num_settings_b(); ++y) pa += marginal_a(model, x, y, l);
      pa /= static_cast<double>(s.num_settings_b());
      for (Index a = 0; a < s.num_outcomes_a(); ++a) {
        d.p_a_x(l, x, a) = pa[a];
        for (Index b = 0; b < s.num_outcomes_b(); ++b) d.p_a_bx(l, x, b, a) = pa[a];
      }
    }
    for (Index y = 0; y < s.num_settings_b(); ++y) {
      Eigen::VectorXd pb = Eigen::VectorXd::Zero(s.num_outcomes_b());
      for (Index x = 0; x < s.num_settings_a(); ++x) pb += marginal_b(model, x, y, l);
      pb /= static_cast<double>(s.num_settings_a());
      for (Index b = 0; b < s.num_outcomes_b(); ++b) {
        d.p_b_y(l, y, b) = pb[b];
        for (Index a = 0; a < s.num_outcomes_a(); ++a) d.p_b_ay(l, y, a, b) = pb[b];
      }
    }
  }
  return d;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double theta = 0.0;
  double running = 0.0;
  for (Index i = 0; i < n; ++i) {
    running += u[static_cast<std::size_t>(i)];
    const double t = (running - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

namespace {

// State of the single-lambda alternating-least-squares fit.
struct OneWayFit {
  Eigen::MatrixXd a1;                // (x, a)       p(a|x)
  std::vector<Eigen::MatrixXd> b1;   // [y](a, b)    p(b|a,y)
  std::vector<Eigen::MatrixXd> a2;   // [x](b, a)    p(a|b,x)
  Eigen::MatrixXd b2;                // (y, b)       p(b|y)
  double w = 1.0;

  double model(Index x, Index y, Index a, Index b) const {
    return w * a1(x, a) * b1[static_cast<std::size_t>(y)](a, b) +
           (1.0 - w) * a2[static_cast<std::size_t>(x)](b, a) * b2(y, b);
  }
};

double max_residual(const Behavior& p, const OneWayFit& fit) {
  const ScenarioShape& s = p.shape();
  double worst = 0.0;
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    for (Index y = 0; y < s.num_settings_b(); ++y) {
      for (Index a = 0; a < s.num_outcomes_a(); ++a) {
        for (Index b = 0; b < s.num_outcomes_b(); ++b) {
          worst = std::max(worst, std::abs(p.at(x, y, a, b) - fit.model(x, y, a, b)));
        }
      }
    }
  }
  return worst;
}

void als_sweep(const Behavior& p, OneWayFit& fit) {
  const ScenarioShape& s = p.shape();
  const Index nx = s.num_settings_a(), ny = s.num_settings_b();
  const Index na = s.num_outcomes_a(), nb = s.num_outcomes_b();
  const double w = fit.w, cw = 1.0 - fit.w;

  // a1(x, a): least squares against coefficient w * b1[y](a, b).
  for (Index x = 0; x < nx; ++x) {
    Eigen::VectorXd sol(na);
    for (Index a = 0; a < na; ++a) {
      double num = 0.0, den = 0.0;
      for (Index y = 0; y < ny; ++y) {
        for (Index b = 0; b < nb; ++b) {
          const double coeff = w * fit.b1[static_cast<std::size_t>(y)](a, b);
          const double target =
              p.at(x, y, a, b) - cw * fit.a2[static_cast<std::size_t>(x)](b, a) * fit.b2(y, b);
          num += coeff * target;
          den += coeff * coeff;
        }
      }
      sol[a] = den > 1e-30 ? num / den : fit.a1(x, a);
    }
    fit.a1.row(x) = project_to_simplex(sol).transpose();
  }
  // b1[y](a, b): rows over b for each (y, a).
  for (Index y = 0; y < ny; ++y) {
    for (Index a = 0; a < na; ++a) {
      Eigen::VectorXd sol(nb);
      for (Index b = 0; b < nb; ++b) {
        double num = 0.0, den = 0.0;
        for (Index x = 0; x < nx; ++x) {
          const double coeff = w * fit.a1(x, a);
          const double target =
              p.at(x, y, a, b) - cw * fit.a2[static_cast<std::size_t>(x)](b, a) * fit.b2(y, b);
          num += coeff * target;
          den += coeff * coeff;
        }
        sol[b] = den > 1e-30 ? num / den : fit.b1[static_cast<std::size_t>(y)](a, b);
      }
      fit.b1[static_cast<std::size_t>(y)].row(a) = project_to_simplex(sol).transpose();
    }
  }
  // a2[x](b, a): rows over a for each (x, b).
  for (Index x = 0; x < nx; ++x) {
    for (Index b = 0; b < nb; ++b) {
      Eigen::VectorXd sol(na);
      for (Index a = 0; a < na; ++a) {
        double num = 0.0, den = 0.0;
        for (Index y = 0; y < ny; ++y) {
          const double coeff = cw * fit.b2(y, b);
          const double target =
              p.at(x, y, a, b) - w * fit.a1(x, a) * fit.b1[static_cast<std::size_t>(y)](a, b);
          num += coeff * target;
          den += coeff * coeff;
        }
        sol[a] = den > 1e-30 ? num / den : fit.a2[static_cast<std::size_t>(x)](b, a);
      }
      fit.a2[static_cast<std::size_t>(x)].row(b) = project_to_simplex(sol).transpose();
    }
  }
  // b2(y, b).
  for (Index y = 0; y < ny; ++y) {
    Eigen::VectorXd sol(nb);
    for (Index b = 0; b < nb; ++b) {
      double num = 0.0, den = 0.0;
      for (Index x = 0; x < nx; ++x) {
        for (Index a = 0; a < na; ++a) {
          const double coeff = cw * fit.a2[static_cast<std::size_t>(x)](b, a);
          const double target =
              p.at(x, y, a, b) - w * fit.a1(x, a) * fit.b1[static_cast<std::size_t>(y)](a, b);
          num += coeff * target;
          den += coeff * coeff;
        }
      }
      sol[b] = den > 1e-30 ? num / den : fit.b2(y, b);
    }
    fit.b2.row(y) = project_to_simplex(sol).transpose();
  }
}

OneWayFit initial_fit(const Behavior& p) {
  const ScenarioShape& s = p.shape();
  const Index nx = s.num_settings_a(), ny = s.num_settings_b();
  const Index na = s.num_outcomes_a(), nb = s.num_outcomes_b();
  OneWayFit fit;
  fit.a1.setZero(nx, na);
  fit.b2.setZero(ny, nb);
  fit.b1.assign(static_cast<std::size_t>(ny), Eigen::MatrixXd::Zero(na, nb));
  fit.a2.assign(static_cast<std::size_t>(nx), Eigen::MatrixXd::Zero(nb, na));
  // Setting-averaged conditionals of the behavior itself.
  for (Index x = 0; x < nx; ++x) {
    Eigen::VectorXd pa = Eigen::VectorXd::Zero(na);
    for (Index y = 0; y < ny; ++y) pa += p.marginal_a(x, y);
    pa /= static_cast<double>(ny);
    fit.a1.row(x) = pa.transpose();
  }
  for (Index y = 0; y < ny; ++y) {
    Eigen::VectorXd pb = Eigen::VectorXd::Zero(nb);
    for (Index x = 0; x < nx; ++x) pb += p.marginal_b(x, y);
    pb /= static_cast<double>(nx);
    fit.b2.row(y) = pb.transpose();
  }
  for (Index y = 0; y < ny; ++y) {
    for (Index a = 0; a < na; ++a) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(nb);
      for (Index x = 0; x < nx; ++x) {
        for (Index b = 0; b < nb; ++b) row[b] += p.at(x, y, a, b);
      }
      const double mass = row.sum();
      if (mass > 1e-12) {
        fit.b1[static_cast<std::size_t>(y)].row(a) = (row / mass).transpose();
      } else {
        fit.b1[static_cast<std::size_t>(y)].row(a).setConstant(1.0 / static_cast<double>(nb));
      }
    }
  }
  for (Index x = 0; x < nx; ++x) {
    for (Index b = 0; b < nb; ++b) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(na);
      for (Index y = 0; y < ny; ++y) {
        for (Index a = 0; a < na; ++a) row[a] += p.at(x, y, a, b);
      }
      const double mass = row.sum();
      if (mass > 1e-12) {
        fit.a2[static_cast<std::size_t>(x)].row(b) = (row / mass).transpose();
      } else {
        fit.a2[static_cast<std::size_t>(x)].row(b).setConstant(1.0 / static_cast<double>(na));
      }
    }
  }
  return fit;
}

OneWayFit random_fit(const Behavior& p, std::mt19937_64& rng) {
  const ScenarioShape& s = p.shape();
  OneWayFit fit = initial_fit(p);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_simplex_row = [&](Index n) {
    Eigen::RowVectorXd row(n);
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      row[i] = -std::log(std::max(unit(rng), 1e-12));
      sum += row[i];
    }
    return Eigen::RowVectorXd(row / sum);
  };
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    fit.a1.row(x) = random_simplex_row(s.num_outcomes_a());
    for (Index b = 0; b < s.num_outcomes_b(); ++b) {
      fit.a2[static_cast<std::size_t>(x)].row(b) = random_simplex_row(s.num_outcomes_a());
    }
  }
  for (Index y = 0; y < s.num_settings_b(); ++y) {
    fit.b2.row(y) = random_simplex_row(s.num_outcomes_b());
    for (Index a = 0; a < s.num_outcomes_a(); ++a) {
      fit.b1[static_cast<std::size_t>(y)].row(a) = random_simplex_row(s.num_outcomes_b());
    }
  }
  return fit;
}

OneWayDecomposition fit_to_decomposition(const Behavior& behavior, const OneWayFit& fit) {
  const ScenarioShape s = behavior.shape().with_lambdas({"l0"});
  OneWayDecomposition d = OneWayDecomposition::zeros(s);
  d.w_ab(0) = fit.w;
  for (Index x = 0; x < s.num_settings_a(); ++x) {
    for (Index a = 0; a < s.num_outcomes_a(); ++a) {
      d.p_a_x(0, x, a) = fit.a1(x, a);
      for (Index b = 0; b < s.num_outcomes_b(); ++b) {
        d.p_a_bx(0, x, b, a) = fit.a2[static_cast<std::size_t>(x)](b, a);
      }
    }
  }
  for (Index y = 0; y < s.num_settings_b(); ++y) {
    for (Index b = 0; b < s.num_outcomes_b(); ++b) {
      d.p_b_y(0, y, b) = fit.b2(y, b);
      for (Index a = 0; a < s.num_outcomes_a(); ++a) {
        d.p_b_ay(0, y, a, b) = fit.b1[static_cast<std::size_t>(y)](a, b);
      }
    }
  }
  return d;
}

}  // namespace

OneWaySearchResult search_oneway_single_lambda(const Behavior& behavior, int grid_steps,
                                               double tol, std::uint64_t seed) {
  require_valid(behavior);
  if (grid_steps < 2) fail(ErrorCode::BadParams, "grid_steps must be at least 2");
  if (!(tol > 0.0)) fail(ErrorCode::BadParams, "tolerance must be positive");

  constexpr int kRestarts = 2;
  constexpr int kMaxSweeps = 200;
  constexpr double kStallTol = 1e-14;

  OneWaySearchResult result;
  result.residual = std::numeric_limits<double>::infinity();
  result.note =
      "heuristic grid + alternating least squares; a miss is not a proof of infeasibility";

  std::mt19937_64 rng(seed);
  for (int gi = 0; gi < grid_steps; ++gi) {
    const double w = static_cast<double>(gi) / static_cast<double>(grid_steps - 1);
    for (int attempt = 0; attempt <= kRestarts; ++attempt) {
      OneWayFit fit = attempt == 0 ? initial_fit(behavior) : random_fit(behavior, rng);
      fit.w = w;
      double prev = max_residual(behavior, fit);
      double best_here = prev;
      for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        als_sweep(behavior, fit);
        const double res = max_residual(behavior, fit);
        best_here = std::min(best_here, res);
        if (std::abs(prev - res) < kStallTol) break;
        prev = res;
      }
      const double res = max_residual(behavior, fit);
      if (res < result.residual) {
        result.residual = res;
        result.decomposition = fit_to_decomposition(behavior, fit);
      }
      if (result.residual <= tol) {
        result.found = true;
        return result;
      }
    }
  }
  result.found = result.residual <= tol;
  return result;
}

}  // namespace lhv
