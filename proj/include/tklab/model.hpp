#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace tklab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Coupling network, scale constants and natural frequencies for the
/// phase-temperature oscillator system.
///
/// psi and zeta must be symmetric. Diagonal entries are dynamically inert
/// (they multiply sin(0) and 1/T - 1/T) but they do enter psi_min/zeta_min,
/// which range over all index pairs; the factory fills them with 1.
struct ModelParams {
  int n = 0;
  double kappa1 = 1.0;  // phase coupling strength
  double kappa2 = 1.0;  // temperature coupling strength
  double eta = 0.0;     // speed-dimension constant
  double t_star = 1.0;  // reference temperature
  Vec nat_freq;
  Mat psi;
  Mat zeta;
  // When false, only zeta >= 0 is asserted (enough for the entropy
  // principle); the synchronization results need strict positivity.
  bool strictly_positive = true;

  static ModelParams uniform(int n, double kappa1 = 1.0, double kappa2 = 1.0,
                             double eta = 0.0, double t_star = 1.0);

  void validate() const;  // throws std::invalid_argument on violation

  double psi_min() const { return psi.minCoeff(); }
  double psi_max() const { return psi.maxCoeff(); }
  double zeta_min() const { return zeta.minCoeff(); }
  double zeta_max() const { return zeta.maxCoeff(); }
};

/// Phases are unwrapped reals, not reduced mod 2*pi: diameters and phase
/// sums are real-line quantities. Temperatures are strictly positive.
struct EnsembleState {
  double time = 0.0;
  Vec phases;
  Vec temps;

  void validate() const;
};

struct Observables {
  double entropy = 0.0;          // sum of ln T
  double phase_diameter = 0.0;   // max pairwise phase difference
  double temp_diameter = 0.0;
  double order_parameter = 0.0;  // |mean of exp(i theta)|
  double conserved_g = 0.0;      // sum of T + eta^2/(2 T*^2) T^2
  double phase_sum = 0.0;
  double avg_phase = 0.0;
};

struct TkDerivative {
  Vec dphases;
  Vec dtemps;
};

/// Right-hand side of the thermodynamic Kuramoto system.
/// Throws std::domain_error naming the offending index if some T <= 0.
TkDerivative tk_rhs(const EnsembleState& state, const ModelParams& params);

/// Classical Kuramoto right-hand side at fixed temperature t_infinity.
Vec kuramoto_rhs(const Vec& phases, const ModelParams& params,
                 double t_infinity);

double entropy(const EnsembleState& state);

/// d/dt of the entropy, evaluated through the direct form
/// sum over alpha of (1/T_alpha) * dT_alpha. Nonnegative whenever
/// zeta >= 0.
double entropy_production(const EnsembleState& state,
                          const ModelParams& params);

Observables observables(const EnsembleState& state, const ModelParams& params);

/// The common temperature limit: unique positive root of
///   T + eta^2/(2 T*^2) T^2 = mean of (T_in + eta^2/(2 T*^2) T_in^2).
/// Solved with the cancellation-free quadratic branch; linear when eta = 0.
double asymptotic_temperature(const Vec& temps_in, double eta, double t_star);

double phase_diameter(const Vec& phases);
double order_parameter(const Vec& phases);

}  // namespace tklab
