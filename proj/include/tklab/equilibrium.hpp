#pragma once

#include <vector>

#include "tklab/model.hpp"

namespace tklab {

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when damped Newton stagnates; carries the last iterate.
struct NonConvergenceError : std::runtime_error {
  Vec last_iterate;
  double last_residual;
  NonConvergenceError(const std::string& what, Vec iterate, double residual)
      : std::runtime_error(what),
        last_iterate(std::move(iterate)),
        last_residual(residual) {}
};

struct PhaseLockedState {
  Vec phases;
  double t_infinity = 0.0;
  double residual = 0.0;   // max-norm of the equilibrium equations
  double phase_sum = 0.0;
  bool nu_sum_zero = false;
};

/// Solves nu_a + kappa1/(N T_inf) sum_b psi_ab sin(th_b - th_a) = 0 with the
/// phase sum pinned to phase_sum. The equilibrium equations have the
/// rotation null-vector (1,...,1); one of them is replaced by the sum
/// constraint, which makes the augmented Jacobian generically regular.
/// Newton steps are damped by backtracking halving (at most 60 halvings).
PhaseLockedState solve_phase_locked(const ModelParams& params,
                                    double t_infinity, double phase_sum,
                                    const Vec& initial_guess,
                                    double tol = 1e-12, int max_iter = 200);

/// Residual of the phase-locked equations at an arbitrary configuration.
Vec phase_locked_residual(const ModelParams& params, double t_infinity,
                          const Vec& phases);

enum class PhaseClass { coherent, bipolar, other };

struct BipolarClassification {
  PhaseClass kind = PhaseClass::other;
  double phi_inf = 0.0;             // reference angle (mod 2 pi)
  std::vector<int> group_main;      // indices at phi_inf
  std::vector<int> group_antipode;  // indices at phi_inf + pi
};

BipolarClassification classify_bipolar(const Vec& phases,
                                       double angle_tol = 1e-6);

/// Upper bound on |average phase limit - initial average phase|,
/// kappa1 psi_max / (kappa2 zeta_min) *
///   T_N^2 (T*^2 + eta^2 T_N)(T_N - T_1) / (T*^2 T_inf T_1),
/// with T_1, T_N the smallest/largest initial temperatures.
double shift_bound(const ModelParams& params, const Vec& temps_in);

}  // namespace tklab
