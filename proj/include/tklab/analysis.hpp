#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tklab/integrate.hpp"

namespace tklab {

struct DecayFit {
  double rate = 0.0;       // -slope of the log-linear fit
  double t_start = 0.0;
  double t_end = 0.0;
  double r_squared = 0.0;
  bool floor_reached = false;
  int n_points = 0;
};

struct FitError : std::runtime_error {
  bool floor_reached;
  FitError(const std::string& what, bool floor)
      : std::runtime_error(what), floor_reached(floor) {}
};

/// Least-squares slope of ln(value) over the trailing window_fraction of
/// the samples whose value exceeds floor. Requires at least 10 usable
/// samples in the window.
DecayFit fit_decay(const std::vector<std::pair<double, double>>& series,
                   double window_fraction, double floor = 1e-12);

/// Supremum of admissible temperature-consensus rates,
/// kappa2 zeta_min T*^2 / (T_inf^2 (T*^2 + eta^2 T_inf)).
double temp_decay_bound(const ModelParams& params, double t_infinity);

/// Supremum of admissible homogeneous synchronization rates,
/// kappa1 psi_min / T_inf.
double sync_rate_bound(const ModelParams& params, double t_infinity);

/// arcsin(d_nu * t_ref / (kappa1 psi_min)), or nullopt when the argument
/// reaches 1 (infeasible, not an error). t_ref is the largest initial
/// temperature for the transient angle and T_inf for the asymptotic bound.
std::optional<double> practical_sync_bound(double d_nu, double t_ref,
                                           const ModelParams& params);

double l1_distance(const Vec& phases_a, const Vec& phases_b);

/// Contraction rate bound for equal-sum twin solutions,
/// (kappa1 psi_min / T_inf) * sin(2 d_inf) / (2 d_inf).
double l1_stability_rate_bound(const ModelParams& params, double t_infinity,
                               double d_inf);

struct ClaimVerdict {
  std::string claim_id;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string notes;
};

// Sample-level slack attributed to integrator error, not model error.
inline double monotonicity_slack(double value) {
  return 1e-9 * (1.0 + std::abs(value));
}

/// Known trajectory claim ids:
///   entropy_monotone        entropy nondecreasing across samples
///   temp_bounds             min temp nondecreasing, max temp nonincreasing
///   conserved_g             conserved functional drift within tolerance
///   diameter_contraction    D(Theta) <= D(Theta_in) (homogeneous, D_in < pi)
///   quarter_circle          tail max of D(Theta) against the arcsin bound
///   phase_sum_convergence   sum(theta) - t sum(nu) settles in the tail
///   order_functional        sum psi_ab cos(theta_a - theta_b) nondecreasing
/// Unknown ids throw std::invalid_argument.
std::vector<ClaimVerdict> verify_trajectory(
    const TkTrajectory& traj, const ModelParams& params,
    const std::vector<std::string>& claims);

/// Largest per-oscillator phase excursion (max minus min) over the last
/// `fraction` of the samples; the convergence certificate for limit
/// extraction.
double tail_phase_variation(const TkTrajectory& traj, double fraction = 0.1);

/// Max of a sampled quantity over the trailing fraction of a trajectory.
double tail_max(const std::vector<std::pair<double, double>>& series,
                double fraction = 0.1);

double order_functional(const Vec& phases, const ModelParams& params);

}  // namespace tklab
