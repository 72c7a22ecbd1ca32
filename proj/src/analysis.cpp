#include "tklab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tklab {

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series,
                   double window_fraction, double floor) {
  if (!(window_fraction > 0.0) || !(window_fraction < 1.0))
    throw std::invalid_argument("window_fraction must lie in (0,1)");
  if (!(floor > 0.0)) throw std::invalid_argument("floor must be positive");

  std::vector<std::pair<double, double>> usable;
  bool floor_hit = false;
  for (const auto& [t, v] : series) {
    if (!(v > 0.0))
      throw std::invalid_argument("fit_decay needs positive series values");
    if (v > floor) {
      usable.emplace_back(t, v);
    } else {
      floor_hit = true;
    }
  }
  const std::size_t window =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::llround(window_fraction *
                                                static_cast<double>(usable.size()))));
  if (usable.size() < 10 || window < 10)
    throw FitError("insufficient samples above floor for a decay fit",
                   true);

  const std::size_t first = usable.size() - window;
  double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  for (std::size_t i = first; i < usable.size(); ++i) {
    const double t = usable[i].first;
    const double y = std::log(usable[i].second);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    syy += y * y;
  }
  const double m = static_cast<double>(window);
  const double denom = m * stt - st * st;
  if (denom == 0.0)
    throw FitError("degenerate time axis in decay fit", floor_hit);
  const double slope = (m * sty - st * sy) / denom;

  DecayFit fit;
  fit.rate = -slope;
  fit.t_start = usable[first].first;
  fit.t_end = usable.back().first;
  fit.floor_reached = floor_hit;
  fit.n_points = static_cast<int>(window);
  const double ss_tot = syy - sy * sy / m;
  if (ss_tot > 0.0) {
    const double ss_reg = slope * (sty - st * sy / m);
    fit.r_squared = std::clamp(ss_reg / ss_tot, 0.0, 1.0);
  } else {
    fit.r_squared = 1.0;  // constant log-series: exact fit with slope 0
  }
  return fit;
}

double temp_decay_bound(const ModelParams& params, double t_infinity) {
  const double ts2 = params.t_star * params.t_star;
  return params.kappa2 * params.zeta_min() * ts2 /
         (t_infinity * t_infinity * (ts2 + params.eta * params.eta * t_infinity));
}

double sync_rate_bound(const ModelParams& params, double t_infinity) {
  return params.kappa1 * params.psi_min() / t_infinity;
}

std::optional<double> practical_sync_bound(double d_nu, double t_ref,
                                           const ModelParams& params) {
  const double arg = d_nu * t_ref / (params.kappa1 * params.psi_min());
  if (!(arg < 1.0)) return std::nullopt;
  return std::asin(arg);
}

double l1_distance(const Vec& phases_a, const Vec& phases_b) {
  if (phases_a.size() != phases_b.size())
    throw std::invalid_argument("l1_distance: mismatched lengths");
  return (phases_a - phases_b).lpNorm<1>();
}

double l1_stability_rate_bound(const ModelParams& params, double t_infinity,
                               double d_inf) {
  if (!(d_inf > 0.0) || !(d_inf < M_PI / 2.0))
    throw std::invalid_argument("d_inf must lie in (0, pi/2)");
  return params.kappa1 * params.psi_min() / t_infinity *
         std::sin(2.0 * d_inf) / (2.0 * d_inf);
}

double order_functional(const Vec& phases, const ModelParams& params) {
  double acc = 0.0;
  for (int a = 0; a < params.n; ++a)
    for (int b = 0; b < params.n; ++b)
      acc += params.psi(a, b) * std::cos(phases[a] - phases[b]);
  return acc;
}

double tail_phase_variation(const TkTrajectory& traj, double fraction) {
  const std::size_t n_samples = traj.samples.size();
  if (n_samples < 2) return 0.0;
  const std::size_t first = static_cast<std::size_t>(
      std::floor((1.0 - fraction) * static_cast<double>(n_samples - 1)));
  const int n = static_cast<int>(traj.samples.front().state.phases.size());
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    double lo = traj.samples[first].state.phases[a];
    double hi = lo;
    for (std::size_t i = first; i < n_samples; ++i) {
      const double v = traj.samples[i].state.phases[a];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

double tail_max(const std::vector<std::pair<double, double>>& series,
                double fraction) {
  if (series.empty()) return 0.0;
  const std::size_t first = static_cast<std::size_t>(
      std::floor((1.0 - fraction) * static_cast<double>(series.size() - 1)));
  double hi = series[first].second;
  for (std::size_t i = first; i < series.size(); ++i)
    hi = std::max(hi, series[i].second);
  return hi;
}

namespace {

ClaimVerdict check_monotone(const std::string& id,
                            const std::vector<std::pair<double, double>>& s,
                            bool nondecreasing) {
  ClaimVerdict v;
  v.claim_id = id;
  // Per-step check: each violation must stay within the slack at that
  // sample. measured is the largest violation, bound its slack.
  double worst_excess = -std::numeric_limits<double>::infinity();
  v.measured = 0.0;
  v.bound = monotonicity_slack(s.empty() ? 0.0 : s[0].second);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double step =
        nondecreasing ? s[i - 1].second - s[i].second
                      : s[i].second - s[i - 1].second;
    const double slack = monotonicity_slack(s[i].second);
    if (step - slack > worst_excess) {
      worst_excess = step - slack;
      v.measured = step;
      v.bound = slack;
    }
  }
  v.tolerance = v.bound;
  v.pass = s.size() < 2 || worst_excess <= 0.0;
  return v;
}

}  // namespace

std::vector<ClaimVerdict> verify_trajectory(
    const TkTrajectory& traj, const ModelParams& params,
    const std::vector<std::string>& claims) {
  std::vector<ClaimVerdict> out;
  const auto& samples = traj.samples;

  for (const std::string& id : claims) {
    if (id == "entropy_monotone") {
      out.push_back(check_monotone(
          id, traj.series([](const TkSample& s) { return s.obs.entropy; }),
          true));
    } else if (id == "temp_bounds") {
      ClaimVerdict lo = check_monotone(
          id,
          traj.series(
              [](const TkSample& s) { return s.state.temps.minCoeff(); }),
          true);
      ClaimVerdict hi = check_monotone(
          id,
          traj.series(
              [](const TkSample& s) { return s.state.temps.maxCoeff(); }),
          false);
      ClaimVerdict v;
      v.claim_id = id;
      v.measured = std::max(lo.measured, hi.measured);
      v.tolerance = std::max(lo.tolerance, hi.tolerance);
      v.bound = v.tolerance;
      v.pass = lo.pass && hi.pass;
      v.notes = "min temp nondecreasing, max temp nonincreasing";
      out.push_back(std::move(v));
    } else if (id == "conserved_g") {
      ClaimVerdict v;
      v.claim_id = id;
      const double g0 = samples.front().obs.conserved_g;
      double drift = 0.0;
      for (const auto& s : samples)
        drift = std::max(drift, std::abs(s.obs.conserved_g - g0));
      v.measured = drift;
      v.tolerance = 1e-6 * std::abs(g0);
      v.bound = v.tolerance;
      v.pass = drift <= v.tolerance;
      out.push_back(std::move(v));
    } else if (id == "diameter_contraction") {
      ClaimVerdict v;
      v.claim_id = id;
      const double d_nu = phase_diameter(params.nat_freq);
      const double d0 = samples.front().obs.phase_diameter;
      if (d_nu != 0.0 || !(d0 < M_PI)) {
        v.pass = false;
        v.notes = "framework violated: needs identical frequencies and "
                  "initial diameter below pi";
        out.push_back(std::move(v));
        continue;
      }
      double worst = 0.0;
      for (const auto& s : samples)
        worst = std::max(worst, s.obs.phase_diameter);
      v.measured = worst;
      v.bound = d0;
      v.tolerance = monotonicity_slack(d0);
      v.pass = worst <= d0 + v.tolerance;
      out.push_back(std::move(v));
    } else if (id == "quarter_circle") {
      ClaimVerdict v;
      v.claim_id = id;
      const double t_inf = asymptotic_temperature(
          samples.front().state.temps, params.eta, params.t_star);
      const auto bound =
          practical_sync_bound(phase_diameter(params.nat_freq), t_inf, params);
      if (!bound) {
        v.pass = false;
        v.notes = "infeasible: D(nu) T_inf / (kappa1 psi_min) >= 1";
        out.push_back(std::move(v));
        continue;
      }
      v.measured = tail_max(
          traj.series([](const TkSample& s) { return s.obs.phase_diameter; }));
      v.bound = *bound;
      v.tolerance = 1e-3;
      v.pass = v.measured <= v.bound + v.tolerance;
      out.push_back(std::move(v));
    } else if (id == "phase_sum_convergence") {
      ClaimVerdict v;
      v.claim_id = id;
      const double nu_sum = params.nat_freq.sum();
      auto series = traj.series([nu_sum](const TkSample& s) {
        return s.obs.phase_sum - s.t * nu_sum;
      });
      const std::size_t first = static_cast<std::size_t>(
          std::floor(0.9 * static_cast<double>(series.size() - 1)));
      double lo = series[first].second, hi = lo;
      for (std::size_t i = first; i < series.size(); ++i) {
        lo = std::min(lo, series[i].second);
        hi = std::max(hi, series[i].second);
      }
      v.measured = hi - lo;
      v.tolerance = 1e-6;
      v.bound = v.tolerance;
      v.pass = v.measured <= v.tolerance;
      out.push_back(std::move(v));
    } else if (id == "order_functional") {
      out.push_back(check_monotone(
          id,
          traj.series([&params](const TkSample& s) {
            return order_functional(s.state.phases, params);
          }),
          true));
    } else {
      throw std::invalid_argument("unknown claim id: " + id);
    }
  }
  return out;
}

}  // namespace tklab
