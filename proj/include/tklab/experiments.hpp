#pragma once

#include <map>
#include <memory>
#include <random>

#include "tklab/analysis.hpp"
#include "tklab/equilibrium.hpp"
#include "tklab/scenario.hpp"
#include "tklab/tcs.hpp"

namespace tklab {

struct InfeasibleScenarioError : std::runtime_error {
  std::string condition;  // e.g. "cond2: D(nu) T_N^in / (kappa1 psi_min) >= 1"
  explicit InfeasibleScenarioError(const std::string& cond)
      : std::runtime_error("infeasible scenario: " + cond), condition(cond) {}
};

struct VerificationReport {
  std::string scenario_name;
  std::string hash;
  std::uint64_t seed = 0;
  std::vector<ClaimVerdict> verdicts;
  // Named measured rates, bounds and margins for the report JSON.
  std::map<std::string, double> measures;
  std::string notes;

  bool all_pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }
};

struct RunResult {
  TkTrajectory trajectory;
  std::optional<TkTrajectory> paired;  // shadow / twin runs
  VerificationReport report;
};

/// Validates the scenario against the frameworks required by its claims
/// (throws InfeasibleScenarioError naming the violated condition), runs
/// the simulation (plus the paired run when requested) and assembles the
/// verdicts. Deterministic given the scenario seed.
RunResult run_scenario(const Scenario& scenario);

struct ShiftReport {
  double z = 0.0;        // mean of theta_final - phi_final
  double spread = 0.0;   // max deviation from a pure translation
  double bound = 0.0;    // admissible |z|
  double t_infinity = 0.0;
  double tail_variation_tk = 0.0;
  double tail_variation_km = 0.0;
  bool conclusive = false;  // both runs passed the tail-variation test
  bool pass = false;        // conclusive, spread small, |z| <= bound
};

/// Runs the phase-temperature system and the fixed-temperature system
/// from the same phases and compares their limits. The tail-variation
/// certificate (max phase excursion over the trailing 10% below tail_tol)
/// must hold for both runs, otherwise the report is inconclusive.
ShiftReport kuramoto_shadow(const Scenario& tk_scenario,
                            double tail_tol = 1e-8);

struct L1Report {
  DecayFit fit;
  double bound = 0.0;
  double d_inf = 0.0;
  double final_l1 = 0.0;
  bool monotone_tail = false;  // no tail step grows beyond slack
  bool pass = false;
};

/// Integrates twin fixed-temperature solutions whose initial phase sums
/// agree and measures the contraction of their l1 distance.
L1Report twin_l1(const Scenario& base_scenario, const Vec& perturbation);

struct ReductionReport {
  std::vector<double> times;
  std::vector<double> phase_deviation;  // max |theta_flock - theta_phase|
  std::vector<double> temp_deviation;
  std::vector<double> ansatz_residual;
  double max_phase_deviation = 0.0;
  double max_temp_deviation = 0.0;
  double max_ansatz_residual = 0.0;
};

/// Embeds the initial data into the planar flocking system, integrates
/// both models and reports the deviation time series. Findings only: no
/// pass/fail thresholds. Requires identically zero natural frequencies.
ReductionReport tcs_reduction(const Scenario& tk_scenario,
                              const Mat2& lattice_positions);

struct TrialResult {
  bool pass = false;
  double margin = 0.0;  // signed distance to the failure boundary
  std::string note;
};

struct AggregateReport {
  std::string claim_id;
  int n_trials = 0;
  std::uint64_t seed = 0;
  int n_pass = 0;
  double pass_rate = 1.0;
  double worst_margin = 0.0;
  std::vector<TrialResult> trials;
};

/// Samples n_trials scenarios uniformly inside the claim's framework and
/// aggregates per-trial verdicts. Deterministic given the seed.
/// Claim ids beyond the trajectory claims of verify_trajectory:
///   temp_consensus_rate   fitted D(T) decay vs the consensus-rate bound
///   sync_rate             homogeneous D(Theta) decay vs kappa1 psi_min/T_inf
///   phase_locking_residual  final-state equilibrium residual
///   kuramoto_shadow       translation shift z and its bound
///   l1_stability          twin l1 contraction vs its rate bound
///   bipolar_classification  final state coherent or antipodal (psi == 1)
///   tcs_conservation      momentum/energy drift and Galilean two-path
AggregateReport monte_carlo(const std::string& claim_id, int n_trials,
                            std::uint64_t seed);

/// Single trial of a monte_carlo claim; exposed for the acceptance suite.
TrialResult run_claim_trial(const std::string& claim_id, std::mt19937_64& rng);

/// Integrates the TK system, doubling t_end until the tail-variation
/// certificate holds (or t_max is reached; *converged reports which).
TkTrajectory integrate_tk_until_locked(const ModelParams& params,
                                       const EnsembleState& initial,
                                       IntegratorOptions options,
                                       double tail_tol, double t_max,
                                       bool* converged);

}  // namespace tklab
