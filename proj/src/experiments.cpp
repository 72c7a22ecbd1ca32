#include "tklab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tklab {

namespace {

constexpr double kTailTol = 1e-8;

bool is_homogeneous(const ModelParams& params) {
  return phase_diameter(params.nat_freq) == 0.0;
}

// Conditions (cond1)-(cond2) for the heterogeneous framework. Returns the
// transient concentration angle theta_*.
double check_heterogeneous_framework(const ModelParams& params,
                                     const EnsembleState& init) {
  const double nu_sum = params.nat_freq.sum();
  if (std::abs(nu_sum) > 1e-12 * (1.0 + params.nat_freq.cwiseAbs().sum()))
    throw InfeasibleScenarioError("cond1: sum(nu) = " +
                                  std::to_string(nu_sum) + ", not zero");
  if (!(params.zeta_min() > 0.0))
    throw InfeasibleScenarioError("cond1: zeta_min <= 0");
  if (!(params.psi_min() > 0.0))
    throw InfeasibleScenarioError("cond1: psi_min <= 0");
  const double d_nu = phase_diameter(params.nat_freq);
  const double t_n = init.temps.maxCoeff();
  const auto theta_star = practical_sync_bound(d_nu, t_n, params);
  if (!theta_star)
    throw InfeasibleScenarioError(
        "cond2: D(nu) T_N^in / (kappa1 psi_min) >= 1");
  if (!(phase_diameter(init.phases) < M_PI - *theta_star))
    throw InfeasibleScenarioError(
        "cond2: D(Theta^in) >= pi - theta_*");
  return *theta_star;
}

void check_framework(const Scenario& scenario, const EnsembleState& init) {
  for (const std::string& claim : scenario.claims) {
    if (claim == "diameter_contraction" || claim == "order_functional") {
      if (!is_homogeneous(scenario.params))
        throw InfeasibleScenarioError("claim " + claim +
                                      " needs identical natural frequencies");
      if (claim == "diameter_contraction" &&
          !(phase_diameter(init.phases) < M_PI))
        throw InfeasibleScenarioError(
            "claim diameter_contraction needs D(Theta^in) < pi");
    } else if (claim == "quarter_circle") {
      check_heterogeneous_framework(scenario.params, init);
    }
  }
  if (scenario.pairing == Pairing::kuramoto_shadow ||
      scenario.pairing == Pairing::twin_l1) {
    check_heterogeneous_framework(scenario.params, init);
  }
  if (scenario.pairing == Pairing::tcs_reduction &&
      !is_homogeneous(scenario.params)) {
    throw InfeasibleScenarioError(
        "tcs_reduction needs identical natural frequencies");
  }
}

TkTrajectory integrate_kuramoto_until_locked(const ModelParams& params,
                                             const Vec& phases0,
                                             double t_infinity,
                                             IntegratorOptions options,
                                             double tail_tol, double t_max,
                                             bool* converged) {
  for (;;) {
    TkTrajectory traj =
        integrate_kuramoto(params, phases0, t_infinity, options);
    if (tail_phase_variation(traj) < tail_tol) {
      if (converged) *converged = true;
      return traj;
    }
    if (options.t_end >= t_max) {
      if (converged) *converged = false;
      return traj;
    }
    options.t_end = std::min(2.0 * options.t_end, t_max);
  }
}

Mat2 default_ring_lattice(int n) {
  Mat2 lattice(n, 2);
  for (int a = 0; a < n; ++a) {
    const double angle = 2.0 * M_PI * a / n;
    lattice(a, 0) = std::cos(angle);
    lattice(a, 1) = std::sin(angle);
  }
  return lattice;
}

}  // namespace

TkTrajectory integrate_tk_until_locked(const ModelParams& params,
                                       const EnsembleState& initial,
                                       IntegratorOptions options,
                                       double tail_tol, double t_max,
                                       bool* converged) {
  for (;;) {
    TkTrajectory traj = integrate_tk(params, initial, options);
    if (tail_phase_variation(traj) < tail_tol) {
      if (converged) *converged = true;
      return traj;
    }
    if (options.t_end >= t_max) {
      if (converged) *converged = false;
      return traj;
    }
    options.t_end = std::min(2.0 * options.t_end, t_max);
  }
}

ShiftReport kuramoto_shadow(const Scenario& tk_scenario, double tail_tol) {
  const Scenario& sc = tk_scenario;
  sc.validate();
  const EnsembleState init = sc.make_initial();
  check_heterogeneous_framework(sc.params, init);

  const double t_inf =
      asymptotic_temperature(init.temps, sc.params.eta, sc.params.t_star);
  const double t_max = std::max(4.0 * sc.options.t_end, 400.0);

  ShiftReport report;
  report.t_infinity = t_inf;
  report.bound = shift_bound(sc.params, init.temps);

  bool tk_conv = false, km_conv = false;
  TkTrajectory tk = integrate_tk_until_locked(sc.params, init, sc.options,
                                              tail_tol, t_max, &tk_conv);
  TkTrajectory km = integrate_kuramoto_until_locked(
      sc.params, init.phases, t_inf, sc.options, tail_tol, t_max, &km_conv);
  report.tail_variation_tk = tail_phase_variation(tk);
  report.tail_variation_km = tail_phase_variation(km);
  report.conclusive = tk_conv && km_conv;

  const Vec diff = tk.back().state.phases - km.back().state.phases;
  report.z = diff.mean();
  report.spread = (diff.array() - report.z).abs().maxCoeff();
  report.pass = report.conclusive && report.spread <= 1e-5 &&
                std::abs(report.z) <= report.bound + 1e-9;
  return report;
}

L1Report twin_l1(const Scenario& base_scenario, const Vec& perturbation) {
  const Scenario& sc = base_scenario;
  sc.validate();
  const EnsembleState init = sc.make_initial();
  const int n = sc.params.n;
  if (perturbation.size() != n)
    throw std::invalid_argument("perturbation has wrong length");
  const double psum = perturbation.sum();
  if (std::abs(psum) >
      1e-10 * (1.0 + perturbation.cwiseAbs().sum()))
    throw std::invalid_argument(
        "perturbation changes the phase sum (sum = " + std::to_string(psum) +
        ")");

  const double t_inf =
      asymptotic_temperature(init.temps, sc.params.eta, sc.params.t_star);
  const Vec twin0 = init.phases + perturbation;

  // Both twins must satisfy the heterogeneous framework with T_inf as the
  // reference temperature.
  const double d_nu = phase_diameter(sc.params.nat_freq);
  const auto theta_star_inf = practical_sync_bound(d_nu, t_inf, sc.params);
  if (!theta_star_inf)
    throw InfeasibleScenarioError(
        "cond2: D(nu) T_inf / (kappa1 psi_min) >= 1");
  if (!(phase_diameter(init.phases) < M_PI - *theta_star_inf) ||
      !(phase_diameter(twin0) < M_PI - *theta_star_inf))
    throw InfeasibleScenarioError(
        "cond2: twin diameter >= pi - theta_*");

  // Coupled integration keeps both twins on one step sequence so the l1
  // distance is sampled on a common time grid.
  const ModelParams& params = sc.params;
  FlatRhs rhs = [&params, t_inf, n](double, const Vec& y) {
    Vec dy(2 * n);
    dy.head(n) = kuramoto_rhs(y.head(n), params, t_inf);
    dy.tail(n) = kuramoto_rhs(y.tail(n), params, t_inf);
    return dy;
  };
  Vec y0(2 * n);
  y0.head(n) = init.phases;
  y0.tail(n) = twin0;

  // Pick t_end so the l1 distance decays to ~1e-8: long enough for a tail
  // fit, short enough to stay above the numerical floor.
  const double l1_0 = l1_distance(init.phases, twin0);
  double rate_guess =
      l1_stability_rate_bound(params, t_inf,
                              std::min(*theta_star_inf + 0.1, M_PI / 2 - 0.05));
  IntegratorOptions opts = sc.options;
  if (l1_0 > 0.0) {
    opts.t_end = std::clamp(std::log(l1_0 / 1e-8) / rate_guess, sc.options.t_end,
                            300.0);
  }
  FlatTrajectory flat = integrate_flat(rhs, y0, 0.0, opts);

  std::vector<std::pair<double, double>> l1_series;
  double d_tail = 0.0;
  const std::size_t first_tail = static_cast<std::size_t>(
      std::floor(0.9 * static_cast<double>(flat.times.size() - 1)));
  for (std::size_t i = 0; i < flat.times.size(); ++i) {
    const Vec a = flat.states[i].head(n);
    const Vec b = flat.states[i].tail(n);
    l1_series.emplace_back(flat.times[i], l1_distance(a, b));
    if (i >= first_tail)
      d_tail = std::max({d_tail, phase_diameter(a), phase_diameter(b)});
  }

  L1Report report;
  // The contraction estimate holds for every admissible angle above the
  // asymptotic diameter; measured tail diameter plus a small margin,
  // clamped into the admissible arc.
  report.d_inf = std::clamp(d_tail + 0.01, *theta_star_inf + 1e-6,
                            M_PI / 2.0 - 1e-9);
  report.bound = l1_stability_rate_bound(params, t_inf, report.d_inf);
  report.final_l1 = l1_series.back().second;

  report.monotone_tail = true;
  for (std::size_t i = std::max<std::size_t>(first_tail, 1);
       i < l1_series.size(); ++i) {
    if (l1_series[i].second - l1_series[i - 1].second >
        monotonicity_slack(l1_series[i].second)) {
      report.monotone_tail = false;
    }
  }

  if (l1_0 == 0.0) {
    // Identical twins stay identical; report a zero-rate fit.
    report.fit = DecayFit{};
    report.pass = report.final_l1 <= 1e-12;
    return report;
  }
  report.fit = fit_decay(l1_series, 0.5, 1e-12);
  report.pass =
      report.monotone_tail && report.fit.rate >= 0.9 * report.bound;
  return report;
}

ReductionReport tcs_reduction(const Scenario& tk_scenario,
                              const Mat2& lattice_positions) {
  const Scenario& sc = tk_scenario;
  sc.validate();
  if (!is_homogeneous(sc.params) ||
      sc.params.nat_freq.cwiseAbs().maxCoeff() != 0.0)
    throw InfeasibleScenarioError(
        "tcs_reduction needs identically zero natural frequencies");
  if (!(sc.params.eta > 0.0))
    throw InfeasibleScenarioError("tcs_reduction needs eta > 0");

  const EnsembleState init = sc.make_initial();
  const TcsState tcs_init = ansatz_embed(init, sc.params, lattice_positions);

  // Fixed-step integration keeps both systems on one time grid.
  IntegratorOptions opts = sc.options;
  opts.method = Method::rk4_fixed;
  if (!(opts.dt > 0.0)) {
    opts.dt = std::min(default_dt(sc.params, init.temps),
                       opts.t_end / 2000.0);
  }
  const long steps = std::lround(std::ceil(opts.t_end / opts.dt));
  opts.output_stride = static_cast<int>(std::max<long>(1, steps / 500));

  TkTrajectory tk = integrate_tk(sc.params, init, opts);
  TcsTrajectory tcs = integrate_tcs(sc.params, tcs_init, opts);

  ReductionReport report;
  const std::size_t count = std::min(tk.samples.size(), tcs.samples.size());
  Vec prev_phases = init.phases;
  for (std::size_t i = 0; i < count; ++i) {
    AnsatzProjection proj =
        ansatz_project(tcs.samples[i].state, sc.params, &prev_phases);
    prev_phases = proj.phases;
    const double dphase =
        (proj.phases - tk.samples[i].state.phases).cwiseAbs().maxCoeff();
    const double dtemp =
        (proj.temps - tk.samples[i].state.temps).cwiseAbs().maxCoeff();
    report.times.push_back(tk.samples[i].t);
    report.phase_deviation.push_back(dphase);
    report.temp_deviation.push_back(dtemp);
    report.ansatz_residual.push_back(proj.residual);
    report.max_phase_deviation = std::max(report.max_phase_deviation, dphase);
    report.max_temp_deviation = std::max(report.max_temp_deviation, dtemp);
    report.max_ansatz_residual =
        std::max(report.max_ansatz_residual, proj.residual);
  }
  return report;
}

RunResult run_scenario(const Scenario& scenario) {
  scenario.validate();
  const EnsembleState init = scenario.make_initial();
  check_framework(scenario, init);

  RunResult result;
  result.report.scenario_name = scenario.name;
  result.report.hash = scenario_hash(scenario);
  result.report.seed = scenario.random_init ? scenario.random_init->seed : 0;

  result.trajectory = integrate_tk(scenario.params, init, scenario.options);

  const double t_inf = asymptotic_temperature(init.temps, scenario.params.eta,
                                              scenario.params.t_star);
  auto& measures = result.report.measures;
  measures["t_infinity"] = t_inf;
  measures["temp_decay_bound"] = temp_decay_bound(scenario.params, t_inf);
  measures["sync_rate_bound"] = sync_rate_bound(scenario.params, t_inf);
  const auto qc_bound = practical_sync_bound(
      phase_diameter(scenario.params.nat_freq), t_inf, scenario.params);
  if (qc_bound) measures["quarter_circle_bound"] = *qc_bound;

  result.report.verdicts =
      verify_trajectory(result.trajectory, scenario.params, scenario.claims);

  if (scenario.pairing == Pairing::kuramoto_shadow) {
    ShiftReport shadow = kuramoto_shadow(scenario);
    measures["shadow_z"] = shadow.z;
    measures["shadow_spread"] = shadow.spread;
    measures["shift_bound"] = shadow.bound;
    ClaimVerdict v;
    v.claim_id = "kuramoto_shadow";
    v.measured = std::abs(shadow.z);
    v.bound = shadow.bound;
    v.tolerance = 1e-5;
    v.pass = shadow.pass;
    v.notes = shadow.conclusive ? "spread " + std::to_string(shadow.spread)
                                : "inconclusive: tail variation too large";
    result.report.verdicts.push_back(std::move(v));
  } else if (scenario.pairing == Pairing::twin_l1) {
    // Default twin: a deterministic zero-sum perturbation of the initial
    // phases, scaled to stay inside the admissible arc.
    const int n = scenario.params.n;
    Vec perturbation(n);
    std::mt19937_64 rng(result.report.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    for (int i = 0; i < n; ++i) perturbation[i] = dist(rng);
    perturbation.array() -= perturbation.mean();
    L1Report twin = twin_l1(scenario, perturbation);
    measures["l1_rate"] = twin.fit.rate;
    measures["l1_rate_bound"] = twin.bound;
    measures["l1_d_inf"] = twin.d_inf;
    ClaimVerdict v;
    v.claim_id = "l1_stability";
    v.measured = twin.fit.rate;
    v.bound = 0.9 * twin.bound;
    v.pass = twin.pass;
    result.report.verdicts.push_back(std::move(v));
  } else if (scenario.pairing == Pairing::tcs_reduction) {
    ReductionReport red =
        tcs_reduction(scenario, default_ring_lattice(scenario.params.n));
    measures["reduction_max_phase_deviation"] = red.max_phase_deviation;
    measures["reduction_max_temp_deviation"] = red.max_temp_deviation;
    measures["reduction_max_ansatz_residual"] = red.max_ansatz_residual;
    result.report.notes +=
        "tcs_reduction reports findings only; no pass/fail threshold. ";
  }
  return result;
}

// ---------------------------------------------------------------------------
// Monte Carlo claim campaigns.

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Mat random_symmetric(std::mt19937_64& rng, int n, double lo, double hi) {
  Mat m(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      m(a, b) = uniform(rng, lo, hi);
      m(b, a) = m(a, b);
    }
  }
  return m;
}

// Generic positive-network ensemble with distributed frequencies; used by
// the entropy / temperature-bound / conservation campaigns.
Scenario generic_scenario(std::mt19937_64& rng) {
  Scenario sc;
  const int n = uniform_int(rng, 3, 12);
  sc.params = ModelParams::uniform(n, uniform(rng, 0.5, 2.0),
                                   uniform(rng, 0.5, 2.0), uniform(rng, 0.0, 1.2),
                                   uniform(rng, 0.7, 1.5));
  sc.params.psi = random_symmetric(rng, n, 0.5, 1.5);
  sc.params.zeta = random_symmetric(rng, n, 0.5, 1.5);
  for (int i = 0; i < n; ++i) sc.params.nat_freq[i] = uniform(rng, -1.0, 1.0);
  EnsembleState init;
  init.phases = Vec::Zero(n);
  init.temps = Vec::Zero(n);
  for (int i = 0; i < n; ++i) init.phases[i] = uniform(rng, -M_PI, M_PI);
  for (int i = 0; i < n; ++i) init.temps[i] = uniform(rng, 0.5, 2.5);
  sc.initial = std::move(init);
  sc.options.rel_tol = 1e-10;
  sc.options.abs_tol = 1e-12;
  sc.options.t_end = 10.0;
  return sc;
}

// Narrower parameter box that keeps the consensus-rate bound away from
// zero, so decay fits finish at desk scale.
Scenario rate_scenario(std::mt19937_64& rng, bool homogeneous) {
  Scenario sc;
  const int n = uniform_int(rng, 3, 10);
  sc.params = ModelParams::uniform(n, uniform(rng, 0.5, 2.0),
                                   uniform(rng, 1.0, 2.0), uniform(rng, 0.0, 0.8),
                                   uniform(rng, 0.9, 1.3));
  sc.params.psi = random_symmetric(rng, n, 0.5, 1.5);
  sc.params.zeta = random_symmetric(rng, n, 0.8, 1.5);
  EnsembleState init;
  init.phases = Vec::Zero(n);
  init.temps = Vec::Zero(n);
  const double width = uniform(rng, 0.8, M_PI - 0.1);
  for (int i = 0; i < n; ++i)
    init.phases[i] = uniform(rng, -width / 2.0, width / 2.0);
  for (int i = 0; i < n; ++i) init.temps[i] = uniform(rng, 0.6, 1.8);
  // Guarantee a visible temperature spread for decay measurements.
  init.temps[0] = 0.6;
  init.temps[n - 1] = 1.8;
  if (!homogeneous) {
    // Zero-sum frequencies scaled to a strict cond2 margin.
    Vec nu(n);
    for (int i = 0; i < n; ++i) nu[i] = uniform(rng, -1.0, 1.0);
    nu.array() -= nu.mean();
    const double d_nu = phase_diameter(nu);
    const double target = uniform(rng, 0.2, 0.7);
    const double scale = target * sc.params.kappa1 * sc.params.psi_min() /
                         (init.temps.maxCoeff() * d_nu);
    sc.params.nat_freq = scale * nu;
    // Re-cut the phases inside the cond2 arc with a safety margin.
    const double max_width = M_PI - std::asin(target) - 0.05;
    const double cut = uniform(rng, 0.5, max_width);
    for (int i = 0; i < n; ++i)
      init.phases[i] = uniform(rng, -cut / 2.0, cut / 2.0);
  }
  sc.initial = std::move(init);
  sc.options.rel_tol = 1e-10;
  sc.options.abs_tol = 1e-12;
  sc.options.t_end = 20.0;
  return sc;
}

TrialResult verdict_trial(const Scenario& sc, const std::string& claim) {
  Scenario run = sc;
  run.claims = {claim};
  RunResult result = run_scenario(run);
  const ClaimVerdict& v = result.report.verdicts.front();
  TrialResult out;
  out.pass = v.pass;
  out.margin = v.bound + v.tolerance - v.measured;
  if (!v.pass) out.note = "claim " + claim + " failed";
  return out;
}

TrialResult temp_consensus_trial(std::mt19937_64& rng) {
  Scenario sc = rate_scenario(rng, false);
  const EnsembleState init = *sc.initial;
  const double t_inf =
      asymptotic_temperature(init.temps, sc.params.eta, sc.params.t_star);
  const double bound = temp_decay_bound(sc.params, t_inf);
  const double d_t0 = init.temps.maxCoeff() - init.temps.minCoeff();
  sc.options.t_end = std::clamp(std::log(d_t0 / 1e-9) / bound, 10.0, 250.0);

  TkTrajectory traj = integrate_tk(sc.params, init, sc.options);
  DecayFit fit = fit_decay(
      traj.series([](const TkSample& s) { return s.obs.temp_diameter; }), 0.5,
      1e-12);

  TrialResult out;
  const double final_gap =
      (traj.back().state.temps.array() - t_inf).abs().maxCoeff();
  const bool rate_ok = fit.rate >= 0.9 * bound;
  const bool limit_ok = final_gap <= 1e-8;
  out.pass = rate_ok && limit_ok;
  out.margin = fit.rate / bound - 0.9;
  if (!rate_ok)
    out.note = "rate " + std::to_string(fit.rate) + " below 0.9 x " +
               std::to_string(bound);
  else if (!limit_ok)
    out.note = "final temperature gap " + std::to_string(final_gap);
  return out;
}

TrialResult sync_rate_trial(std::mt19937_64& rng) {
  Scenario sc = rate_scenario(rng, true);
  const EnsembleState init = *sc.initial;
  const double t_inf =
      asymptotic_temperature(init.temps, sc.params.eta, sc.params.t_star);
  const double bound = sync_rate_bound(sc.params, t_inf);
  const double d0 = phase_diameter(init.phases);
  sc.options.t_end = std::clamp(std::log(d0 / 1e-9) / bound, 10.0, 250.0);

  TkTrajectory traj = integrate_tk(sc.params, init, sc.options);
  TrialResult out;

  double worst_excess = 0.0;
  for (const auto& s : traj.samples) {
    worst_excess = std::max(worst_excess, s.obs.phase_diameter - d0 -
                                              monotonicity_slack(d0));
  }
  if (worst_excess > 0.0) {
    out.pass = false;
    out.margin = -worst_excess;
    out.note = "phase diameter exceeded its initial value";
    return out;
  }

  DecayFit fit = fit_decay(
      traj.series([](const TkSample& s) { return s.obs.phase_diameter; }), 0.5,
      1e-12);
  out.pass = fit.rate >= 0.9 * bound;
  out.margin = fit.rate / bound - 0.9;
  if (!out.pass)
    out.note = "rate " + std::to_string(fit.rate) + " below 0.9 x " +
               std::to_string(bound);
  return out;
}

TrialResult quarter_circle_trial(std::mt19937_64& rng) {
  Scenario sc = rate_scenario(rng, false);
  check_heterogeneous_framework(sc.params, *sc.initial);

  bool converged = false;
  TkTrajectory traj = integrate_tk_until_locked(
      sc.params, *sc.initial, sc.options, kTailTol, 400.0, &converged);
  const double t_inf = asymptotic_temperature(
      sc.initial->temps, sc.params.eta, sc.params.t_star);
  const auto bound = practical_sync_bound(
      phase_diameter(sc.params.nat_freq), t_inf, sc.params);

  TrialResult out;
  const double tail = tail_max(
      traj.series([](const TkSample& s) { return s.obs.phase_diameter; }));
  out.pass = converged && bound && tail <= *bound + 1e-3;
  out.margin = bound ? *bound + 1e-3 - tail : -1.0;
  if (!converged) out.note = "no tail-variation certificate";
  if (bound && tail > *bound + 1e-3)
    out.note = "tail diameter " + std::to_string(tail) + " above bound " +
               std::to_string(*bound);
  return out;
}

TrialResult phase_locking_trial(std::mt19937_64& rng) {
  Scenario sc = rate_scenario(rng, false);
  check_heterogeneous_framework(sc.params, *sc.initial);

  bool converged = false;
  TkTrajectory traj = integrate_tk_until_locked(
      sc.params, *sc.initial, sc.options, kTailTol, 400.0, &converged);
  const double t_inf = asymptotic_temperature(
      sc.initial->temps, sc.params.eta, sc.params.t_star);
  const double residual =
      phase_locked_residual(sc.params, t_inf, traj.back().state.phases)
          .lpNorm<Eigen::Infinity>();

  TrialResult out;
  out.pass = converged && residual <= 1e-6;
  out.margin = 1e-6 - residual;
  if (!converged)
    out.note = "no tail-variation certificate";
  else if (!out.pass)
    out.note = "equilibrium residual " + std::to_string(residual);
  return out;
}

TrialResult shadow_trial(std::mt19937_64& rng) {
  Scenario sc = rate_scenario(rng, false);
  // Moderate temperature spread keeps the shift well inside its bound.
  for (int i = 0; i < sc.params.n; ++i)
    sc.initial->temps[i] = uniform(rng, 0.8, 1.6);
  ShiftReport report = kuramoto_shadow(sc);
  TrialResult out;
  out.pass = report.pass;
  out.margin = report.bound - std::abs(report.z);
  if (!report.conclusive)
    out.note = "inconclusive: tail variation too large";
  else if (!report.pass)
    out.note = "z " + std::to_string(report.z) + " spread " +
               std::to_string(report.spread) + " bound " +
               std::to_string(report.bound);
  return out;
}

TrialResult l1_trial(std::mt19937_64& rng) {
  Scenario sc = rate_scenario(rng, false);
  const int n = sc.params.n;
  // Leave headroom for the perturbed twin inside the cond2 arc.
  const double d0 = phase_diameter(sc.initial->phases);
  if (d0 > 2.0) sc.initial->phases *= 2.0 / d0;
  Vec perturbation(n);
  for (int i = 0; i < n; ++i) perturbation[i] = uniform(rng, -0.1, 0.1);
  perturbation.array() -= perturbation.mean();
  L1Report report = twin_l1(sc, perturbation);
  TrialResult out;
  out.pass = report.pass;
  out.margin = report.bound > 0.0 ? report.fit.rate / report.bound - 0.9 : 0.0;
  if (!report.monotone_tail)
    out.note = "l1 grew between tail samples";
  else if (!report.pass)
    out.note = "l1 rate " + std::to_string(report.fit.rate) + " below 0.9 x " +
               std::to_string(report.bound);
  return out;
}

TrialResult bipolar_trial(std::mt19937_64& rng) {
  Scenario sc = rate_scenario(rng, true);
  const int n = sc.params.n;
  sc.params.psi = Mat::Ones(n, n);
  // Full-circle data with a usable order parameter.
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (int i = 0; i < n; ++i)
      sc.initial->phases[i] = uniform(rng, -M_PI, M_PI);
    if (order_parameter(sc.initial->phases) >= 0.3) break;
  }

  bool converged = false;
  TkTrajectory traj = integrate_tk_until_locked(
      sc.params, *sc.initial, sc.options, kTailTol, 600.0, &converged);
  BipolarClassification cls =
      classify_bipolar(traj.back().state.phases, 1e-4);

  TrialResult out;
  out.pass = converged && cls.kind != PhaseClass::other;
  out.margin = out.pass ? 1.0 : -1.0;
  if (!converged)
    out.note = "no tail-variation certificate";
  else if (cls.kind == PhaseClass::other)
    out.note = "final state neither coherent nor antipodal";
  return out;
}

TrialResult tcs_conservation_trial(std::mt19937_64& rng) {
  const int n = uniform_int(rng, 3, 8);
  ModelParams params = ModelParams::uniform(
      n, uniform(rng, 0.5, 1.5), uniform(rng, 0.5, 1.5), uniform(rng, 0.3, 1.0),
      uniform(rng, 0.9, 1.3));
  params.psi = random_symmetric(rng, n, 0.5, 1.5);
  params.zeta = random_symmetric(rng, n, 0.5, 1.5);

  TcsState init;
  init.positions = Mat2(n, 2);
  init.velocities = Mat2(n, 2);
  init.temps = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    init.positions(i, 0) = uniform(rng, -1.0, 1.0);
    init.positions(i, 1) = uniform(rng, -1.0, 1.0);
    init.velocities(i, 0) = uniform(rng, -0.5, 0.5);
    init.velocities(i, 1) = uniform(rng, -0.5, 0.5);
    init.temps[i] = uniform(rng, 0.8, 1.6);
  }

  IntegratorOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-12;
  opts.t_end = 5.0;

  TcsTrajectory traj = integrate_tcs(params, init, opts);

  auto momentum = [](const TcsState& s) {
    return Vec2(s.velocities.col(0).sum(), s.velocities.col(1).sum());
  };
  auto energy = [](const TcsState& s) {
    return s.temps.sum() + 0.5 * s.velocities.rowwise().squaredNorm().sum();
  };
  const Vec2 p0 = momentum(init);
  const double e0 = energy(init);
  double p_drift = 0.0, e_drift = 0.0;
  for (const auto& s : traj.samples) {
    p_drift = std::max(p_drift, (momentum(s.state) - p0).norm());
    e_drift = std::max(e_drift, std::abs(energy(s.state) - e0));
  }
  const double p_tol = 1e-8 * (1.0 + p0.norm());
  const double e_tol = 1e-8 * (1.0 + std::abs(e0));

  // Galilean two-path comparison.
  const Vec2 c(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  TcsTrajectory shifted_path =
      integrate_tcs(params, galilean_shift(init, c), opts);
  TcsState evolve_then_shift = galilean_shift(traj.samples.back().state, c);
  const TcsState& shift_then_evolve = shifted_path.samples.back().state;
  double gal_dev = std::max(
      {(evolve_then_shift.positions - shift_then_evolve.positions)
           .cwiseAbs()
           .maxCoeff(),
       (evolve_then_shift.velocities - shift_then_evolve.velocities)
           .cwiseAbs()
           .maxCoeff(),
       (evolve_then_shift.temps - shift_then_evolve.temps)
           .cwiseAbs()
           .maxCoeff()});

  TrialResult out;
  out.pass = p_drift <= p_tol && e_drift <= e_tol && gal_dev <= 1e-6;
  out.margin = std::min({p_tol - p_drift, e_tol - e_drift, 1e-6 - gal_dev});
  if (!out.pass)
    out.note = "momentum drift " + std::to_string(p_drift) +
               ", energy drift " + std::to_string(e_drift) +
               ", Galilean deviation " + std::to_string(gal_dev);
  return out;
}

}  // namespace

TrialResult run_claim_trial(const std::string& claim_id,
                            std::mt19937_64& rng) {
  if (claim_id == "entropy_monotone" || claim_id == "temp_bounds" ||
      claim_id == "conserved_g") {
    return verdict_trial(generic_scenario(rng), claim_id);
  }
  if (claim_id == "order_functional") {
    Scenario sc = rate_scenario(rng, true);
    return verdict_trial(sc, claim_id);
  }
  if (claim_id == "temp_consensus_rate") return temp_consensus_trial(rng);
  if (claim_id == "sync_rate") return sync_rate_trial(rng);
  if (claim_id == "quarter_circle") return quarter_circle_trial(rng);
  if (claim_id == "phase_locking_residual") return phase_locking_trial(rng);
  if (claim_id == "kuramoto_shadow") return shadow_trial(rng);
  if (claim_id == "l1_stability") return l1_trial(rng);
  if (claim_id == "bipolar_classification") return bipolar_trial(rng);
  if (claim_id == "tcs_conservation") return tcs_conservation_trial(rng);
  throw std::invalid_argument("unknown claim id: " + claim_id);
}

AggregateReport monte_carlo(const std::string& claim_id, int n_trials,
                            std::uint64_t seed) {
  AggregateReport report;
  report.claim_id = claim_id;
  report.n_trials = n_trials;
  report.seed = seed;
  if (n_trials <= 0) return report;

  std::mt19937_64 rng(seed);
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_trials; ++i) {
    TrialResult trial = run_claim_trial(claim_id, rng);
    if (trial.pass) ++report.n_pass;
    report.worst_margin = std::min(report.worst_margin, trial.margin);
    report.trials.push_back(std::move(trial));
  }
  report.pass_rate =
      static_cast<double>(report.n_pass) / static_cast<double>(n_trials);
  return report;
}

}  // namespace tklab
