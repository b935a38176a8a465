#pragma once

#include "lhv/errors.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace lhv {

/// Two equal-mass classical particles on a line with a short-range
/// attractive |separation|^(3/2) potential, cut off beyond separation d.
struct SystemParams {
  double m = 1.0;      // particle mass
  double gamma = 1.0;  // coupling, energy / length^(3/2)
  double d = 1.0;      // interaction cutoff separation

  void check() const {
    if (!(m > 0.0) || !(gamma > 0.0) || !(d > 0.0)) {
      fail(ErrorCode::BadParams, "m, gamma, d must be strictly positive");
    }
  }
};

/// V(x) = -gamma |x|^(3/2) for |x| <= d, else -gamma d^(3/2); continuous at
/// the cutoff.
double potential(double separation, const SystemParams& params);

/// Force on the right-moving particle, -dV/dx_R at separation x = 2 x_R.
double force_on_right(double separation, const SystemParams& params);

/// One member of the non-unique solution family with both particles at
/// rest at the origin: it pauses for time T, repels for a fixed duration
/// tau, then moves freely.  T is arbitrary, which is the indeterminism.
struct TrajectoryFamily {
  SystemParams params;
  double pause_time = 0.0;  // T >= 0

  TrajectoryFamily(SystemParams p, double T) : params(p), pause_time(T) {
    params.check();
    if (T < 0.0) fail(ErrorCode::BadParams, "pause time must be >= 0");
  }

  /// Duration of the interacting branch, 2 (d m^2 / gamma^2)^(1/4).
  double tau() const;
};

struct PhasePoint {
  double x_r = 0.0;
  double x_l = 0.0;
  double v_r = 0.0;
  double v_l = 0.0;
};

/// Piecewise closed form; x_L = -x_R throughout.  Throws NegativeTime.
PhasePoint eval_trajectory(const TrajectoryFamily& family, double t);

/// Total energy m v_r^2 + V(x) at separation x = x_R - x_L, with the
/// separation-coordinate kinetic term (1/4) m xdot^2 as the convention;
/// identically 0 along every family member.
double energy(const TrajectoryFamily& family, double t);

/// Max over the grid of |m xdd_R - F(x)| with xdd_R by central differences
/// of step h on the closed form.  Grid points must stay clear of the two
/// branch joins by 10 h (GridTouchesBreakpoint otherwise).
double ode_residual(const TrajectoryFamily& family, const std::vector<double>& grid, double h);

/// Evenly spaced grid of n points spanning [lo, hi].
std::vector<double> linspace(double lo, double hi, int n);

/// Symmetric detectors at +-distance from the origin, switched on at t=0.
struct DetectorConfig {
  double distance = 1.0;  // must exceed d/2 of the system in use
};

struct DetectionRecord {
  double pause_time = 0.0;
  double tau = 0.0;
  bool detected = false;
  double t_left = 0.0;   // set when detected
  double t_right = 0.0;  // set when detected
};

struct DetectorSummary {
  std::vector<DetectionRecord> runs;
  double within_run_agreement = 0.0;  // fraction of runs whose two readouts agree
  double detection_time_spread = 0.0; // max - min detection time over detected runs
  int undetected_runs = 0;
};

/// Closed-form detection times for each family; families that do not reach
/// the detectors by the horizon are reported undetected, not fatal.
DetectorSummary simulate_detectors(const std::vector<TrajectoryFamily>& families,
                                   const DetectorConfig& detectors, double horizon);

/// One row per grid time: t,x_R,x_L,v_R,v_L,E.
void write_trajectory_csv(std::ostream& out, const TrajectoryFamily& family,
                          const std::vector<double>& grid);

/// One row per family: T,tau,t_detect (t_detect empty when undetected).
void write_summary_csv(std::ostream& out, const DetectorSummary& summary);

}  // namespace lhv
