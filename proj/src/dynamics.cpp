#include "lhv/dynamics.hpp"

#include "lhv/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace lhv {

double potential(double separation, const SystemParams& params) {
  const double ax = std::abs(separation);
  if (ax <= params.d) return -params.gamma * std::pow(ax, 1.5);
  return -params.gamma * std::pow(params.d, 1.5);
}

double force_on_right(double separation, const SystemParams& params) {
  // V depends on x = x_R - x_L; force on the right particle is -dV/dx_R =
  // -V'(x).  The particles repel: the force pushes x outward.
  const double ax = std::abs(separation);
  if (ax > params.d || ax == 0.0) return 0.0;
  const double sign = separation > 0.0 ? 1.0 : -1.0;
  return 1.5 * params.gamma * std::sqrt(ax) * sign;
}

double TrajectoryFamily::tau() const {
  const double m = params.m, g = params.gamma;
  return 2.0 * std::pow(params.d * m * m / (g * g), 0.25);
}

PhasePoint eval_trajectory(const TrajectoryFamily& family, double t) {
  if (t < 0.0) fail(ErrorCode::NegativeTime, "trajectory defined for t >= 0");
  const SystemParams& p = family.params;
  const double T = family.pause_time;
  const double tau = family.tau();
  PhasePoint out;
  if (t <= T) {
    out.x_r = 0.0;
    out.v_r = 0.0;
  } else if (t <= T + tau) {
    const double dt = t - T;
    const double k = p.gamma * p.gamma / (32.0 * p.m * p.m);
    out.x_r = k * dt * dt * dt * dt;
    out.v_r = 4.0 * k * dt * dt * dt;
  } else {
    const double v = std::sqrt(p.gamma / p.m) * std::pow(p.d, 0.75);
    out.x_r = 0.5 * p.d + v * (t - T - tau);
    out.v_r = v;
  }
  out.x_l = -out.x_r;
  out.v_l = -out.v_r;
  return out;
}

double energy(const TrajectoryFamily& family, double t) {
  const PhasePoint s = eval_trajectory(family, t);
  const double x = s.x_r - s.x_l;
  const double xdot = s.v_r - s.v_l;
  // Separation-coordinate convention: kinetic term m xdot^2 / 4.
  return 0.25 * family.params.m * xdot * xdot + potential(x, family.params);
}

double ode_residual(const TrajectoryFamily& family, const std::vector<double>& grid, double h) {
  if (!(h > 0.0)) fail(ErrorCode::BadParams, "finite-difference step must be positive");
  const double margin = 10.0 * h;
  const double T = family.pause_time;
  const double tau = family.tau();
  double worst = 0.0;
  for (double t : grid) {
    if (t - h < 0.0) fail(ErrorCode::BadParams, "grid point " + std::to_string(t) +
                                                    " leaves t >= 0 under the stencil");
    if (std::abs(t - T) < margin || std::abs(t - (T + tau)) < margin) {
      fail(ErrorCode::GridTouchesBreakpoint,
           "grid point " + std::to_string(t) + " is within " + std::to_string(margin) +
               " of a branch join");
    }
    const PhasePoint lo = eval_trajectory(family, t - h);
    const PhasePoint mid = eval_trajectory(family, t);
    const PhasePoint hi = eval_trajectory(family, t + h);
    const double acc = (hi.x_r - 2.0 * mid.x_r + lo.x_r) / (h * h);
    const double force = force_on_right(mid.x_r - mid.x_l, family.params);
    worst = std::max(worst, std::abs(family.params.m * acc - force));
  }
  return worst;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) fail(ErrorCode::BadParams, "linspace needs at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
  out.back() = hi;
  return out;
}

namespace {

// Time at which x_R reaches the detector, from the inverted third branch.
double detection_time(const TrajectoryFamily& family, double distance) {
  const SystemParams& p = family.params;
  return family.pause_time + family.tau() +
         (distance - 0.5 * p.d) * std::sqrt(p.m / p.gamma) * std::pow(p.d, -0.75);
}

}  // namespace

DetectorSummary simulate_detectors(const std::vector<TrajectoryFamily>& families,
                                   const DetectorConfig& detectors, double horizon) {
  DetectorSummary summary;
  int agreeing = 0;
  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -std::numeric_limits<double>::infinity();
  for (const TrajectoryFamily& family : families) {
    if (!(detectors.distance > 0.5 * family.params.d)) {
      fail(ErrorCode::BadParams, "detectors must sit beyond d/2 from the origin");
    }
    DetectionRecord rec;
    rec.pause_time = family.pause_time;
    rec.tau = family.tau();
    // The left detector fires when x_L = -distance, i.e. -x_L reaches the
    // distance; by x_L = -x_R both closed forms give the same instant.
    const double t_right = detection_time(family, detectors.distance);
    const double t_left = detection_time(family, detectors.distance);
    if (t_right <= horizon) {
      rec.detected = true;
      rec.t_right = t_right;
      rec.t_left = t_left;
      t_min = std::min(t_min, t_right);
      t_max = std::max(t_max, t_right);
      if (t_left == t_right) ++agreeing;
    } else {
      ++summary.undetected_runs;
      ++agreeing;  // both sides agree: no detection yet on either
    }
    summary.runs.push_back(rec);
  }
  summary.within_run_agreement =
      summary.runs.empty() ? 1.0
                           : static_cast<double>(agreeing) / static_cast<double>(summary.runs.size());
  summary.detection_time_spread = (t_max > t_min) ? t_max - t_min : 0.0;
  return summary;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryFamily& family,
                          const std::vector<double>& grid) {
  out << "t,x_R,x_L,v_R,v_L,E\n";
  for (double t : grid) {
    const PhasePoint s = eval_trajectory(family, t);
    out << format_number(t) << ',' << format_number(s.x_r) << ',' << format_number(s.x_l) << ','
        << format_number(s.v_r) << ',' << format_number(s.v_l) << ','
        << format_number(energy(family, t)) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const DetectorSummary& summary) {
  out << "T,tau,t_detect\n";
  for (const DetectionRecord& rec : summary.runs) {
    out << format_number(rec.pause_time) << ',' << format_number(rec.tau) << ',';
    if (rec.detected) out << format_number(rec.t_right);
    out << '\n';
  }
}

}  // namespace lhv
