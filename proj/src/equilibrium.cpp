#include "tklab/equilibrium.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "tklab/model.hpp"

namespace tklab {

Vec phase_locked_residual(const ModelParams& params, double t_infinity,
                          const Vec& phases) {
  const int n = params.n;
  Vec r = Vec::Zero(n);
  for (int a = 0; a < n; ++a) {
    double acc = 0.0;
    for (int b = 0; b < n; ++b)
      acc += params.psi(a, b) * std::sin(phases[b] - phases[a]);
    r[a] = params.nat_freq[a] + params.kappa1 / (n * t_infinity) * acc;
  }
  return r;
}

namespace {

// Equations 0..n-2 are the equilibrium balances, equation n-1 pins the sum.
Vec augmented_residual(const ModelParams& params, double t_infinity,
                       double phase_sum, const Vec& phases) {
  const int n = params.n;
  Vec g = phase_locked_residual(params, t_infinity, phases);
  Vec r(n);
  r.head(n - 1) = g.head(n - 1);
  r[n - 1] = phases.sum() - phase_sum;
  return r;
}

Mat augmented_jacobian(const ModelParams& params, double t_infinity,
                       const Vec& phases) {
  const int n = params.n;
  const double c = params.kappa1 / (n * t_infinity);
  Mat jac = Mat::Zero(n, n);
  for (int a = 0; a < n - 1; ++a) {
    double diag = 0.0;
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const double w = c * params.psi(a, b) * std::cos(phases[b] - phases[a]);
      jac(a, b) = w;
      diag -= w;
    }
    jac(a, a) = diag;
  }
  jac.row(n - 1).setOnes();
  return jac;
}

}  // namespace

PhaseLockedState solve_phase_locked(const ModelParams& params,
                                    double t_infinity, double phase_sum,
                                    const Vec& initial_guess, double tol,
                                    int max_iter) {
  params.validate();
  if (!(t_infinity > 0.0))
    throw std::invalid_argument("t_infinity must be positive");
  const int n = params.n;
  if (initial_guess.size() != n)
    throw std::invalid_argument("initial_guess has wrong length");

  const double nu_sum = params.nat_freq.sum();
  const double nu_scale = 1.0 + params.nat_freq.cwiseAbs().maxCoeff() * n;
  if (std::abs(nu_sum) > 1e-12 * nu_scale)
    throw InfeasibleError(
        "phase-locked equations are infeasible: sum of natural frequencies "
        "is " +
        std::to_string(nu_sum) + ", not zero");

  Vec theta = initial_guess;
  Vec r = augmented_residual(params, t_infinity, phase_sum, theta);
  double rnorm = r.lpNorm<Eigen::Infinity>();

  for (int iter = 0; iter < max_iter && rnorm > tol; ++iter) {
    Mat jac = augmented_jacobian(params, t_infinity, theta);
    Vec step = jac.partialPivLu().solve(-r);
    if (!step.allFinite())
      throw NonConvergenceError("Newton step is not finite", theta, rnorm);

    double lambda = 1.0;
    bool improved = false;
    for (int halving = 0; halving <= 60; ++halving) {
      Vec candidate = theta + lambda * step;
      Vec rc = augmented_residual(params, t_infinity, phase_sum, candidate);
      const double cnorm = rc.lpNorm<Eigen::Infinity>();
      if (cnorm < rnorm) {
        theta = std::move(candidate);
        r = std::move(rc);
        rnorm = cnorm;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved)
      throw NonConvergenceError(
          "Newton stagnated at residual " + std::to_string(rnorm), theta,
          rnorm);
  }
  if (rnorm > tol)
    throw NonConvergenceError(
        "Newton did not reach tolerance; residual " + std::to_string(rnorm),
        theta, rnorm);

  PhaseLockedState out;
  out.phases = theta;
  out.t_infinity = t_infinity;
  out.residual =
      phase_locked_residual(params, t_infinity, theta).lpNorm<Eigen::Infinity>();
  out.phase_sum = theta.sum();
  out.nu_sum_zero = true;
  return out;
}

BipolarClassification classify_bipolar(const Vec& phases, double angle_tol) {
  BipolarClassification out;
  const int n = static_cast<int>(phases.size());
  if (n == 0) return out;
  constexpr double pi = M_PI;
  constexpr double two_pi = 2.0 * M_PI;

  auto circ_dist = [&](double a, double b) {
    double d = std::fmod(a - b, two_pi);
    if (d > pi) d -= two_pi;
    if (d < -pi) d += two_pi;
    return std::abs(d);
  };

  // Reference direction: first phase; every other phase must sit within
  // angle_tol of it or of its antipode.
  const double ref = phases[0];
  std::vector<int> main_group, anti_group;
  for (int i = 0; i < n; ++i) {
    const double d0 = circ_dist(phases[i], ref);
    const double d1 = circ_dist(phases[i], ref + pi);
    if (d0 <= angle_tol) {
      main_group.push_back(i);
    } else if (d1 <= angle_tol) {
      anti_group.push_back(i);
    } else {
      return out;  // other
    }
  }

  out.phi_inf = std::remainder(ref, two_pi);
  out.group_main = std::move(main_group);
  out.group_antipode = std::move(anti_group);
  out.kind =
      out.group_antipode.empty() ? PhaseClass::coherent : PhaseClass::bipolar;
  return out;
}

double shift_bound(const ModelParams& params, const Vec& temps_in) {
  if (temps_in.size() == 0 || !(temps_in.minCoeff() > 0.0))
    throw std::invalid_argument("temps_in must be positive");
  if (!(params.kappa2 > 0.0))
    throw std::invalid_argument("shift_bound requires kappa2 > 0");
  const double t1 = temps_in.minCoeff();
  const double tn = temps_in.maxCoeff();
  const double t_inf = asymptotic_temperature(temps_in, params.eta, params.t_star);
  const double ts2 = params.t_star * params.t_star;
  const double eta2 = params.eta * params.eta;
  return params.kappa1 * params.psi_max() / (params.kappa2 * params.zeta_min()) *
         tn * tn * (ts2 + eta2 * tn) * (tn - t1) / (ts2 * t_inf * t1);
}

}  // namespace tklab
