#include "tklab/model.hpp"

#include <cmath>
#include <complex>

namespace tklab {

namespace {

void require_positive_temps(const Vec& temps) {
  for (int i = 0; i < temps.size(); ++i) {
    if (!(temps[i] > 0.0)) {
      throw std::domain_error("nonpositive temperature at index " +
                              std::to_string(i) + ": " +
                              std::to_string(temps[i]));
    }
  }
}

}  // namespace

ModelParams ModelParams::uniform(int n, double kappa1, double kappa2,
                                 double eta, double t_star) {
  ModelParams p;
  p.n = n;
  p.kappa1 = kappa1;
  p.kappa2 = kappa2;
  p.eta = eta;
  p.t_star = t_star;
  p.nat_freq = Vec::Zero(n);
  p.psi = Mat::Ones(n, n);
  p.zeta = Mat::Ones(n, n);
  return p;
}

void ModelParams::validate() const {
  if (n <= 0) throw std::invalid_argument("n_oscillators must be positive");
  if (!(kappa1 > 0.0)) throw std::invalid_argument("kappa1 must be positive");
  if (!(kappa2 >= 0.0))
    throw std::invalid_argument("kappa2 must be nonnegative");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  if (!(t_star > 0.0)) throw std::invalid_argument("t_star must be positive");
  if (nat_freq.size() != n)
    throw std::invalid_argument("nat_freq has wrong length");
  if (psi.rows() != n || psi.cols() != n || zeta.rows() != n ||
      zeta.cols() != n)
    throw std::invalid_argument("coupling matrix has wrong shape");
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (psi(a, b) != psi(b, a))
        throw std::invalid_argument("psi is not symmetric at (" +
                                    std::to_string(a) + "," +
                                    std::to_string(b) + ")");
      if (zeta(a, b) != zeta(b, a))
        throw std::invalid_argument("zeta is not symmetric at (" +
                                    std::to_string(a) + "," +
                                    std::to_string(b) + ")");
    }
  }
  if (strictly_positive) {
    if (!(psi_min() > 0.0))
      throw std::invalid_argument("psi must be strictly positive");
    if (!(zeta_min() > 0.0))
      throw std::invalid_argument("zeta must be strictly positive");
  } else {
    if (!(zeta_min() >= 0.0))
      throw std::invalid_argument("zeta must be nonnegative");
  }
}

void EnsembleState::validate() const {
  if (phases.size() != temps.size())
    throw std::invalid_argument("phases and temps have different lengths");
  for (int i = 0; i < phases.size(); ++i) {
    if (!std::isfinite(phases[i]))
      throw std::invalid_argument("non-finite phase at index " +
                                  std::to_string(i));
  }
  require_positive_temps(temps);
}

TkDerivative tk_rhs(const EnsembleState& state, const ModelParams& params) {
  const int n = params.n;
  require_positive_temps(state.temps);
  TkDerivative d;
  d.dphases = Vec::Zero(n);
  d.dtemps = Vec::Zero(n);
  const double ts2 = params.t_star * params.t_star;
  const double eta2 = params.eta * params.eta;
  for (int a = 0; a < n; ++a) {
    double phase_acc = 0.0;
    double temp_acc = 0.0;
    const double ta = state.temps[a];
    for (int b = 0; b < n; ++b) {
      phase_acc += params.psi(a, b) * std::sin(state.phases[b] - state.phases[a]);
      temp_acc += params.zeta(a, b) * (1.0 / ta - 1.0 / state.temps[b]);
    }
    d.dphases[a] = params.nat_freq[a] + params.kappa1 / n * phase_acc / ta;
    d.dtemps[a] = params.kappa2 / n * ts2 / (ts2 + eta2 * ta) * temp_acc;
  }
  return d;
}

Vec kuramoto_rhs(const Vec& phases, const ModelParams& params,
                 double t_infinity) {
  const int n = params.n;
  if (!(t_infinity > 0.0))
    throw std::invalid_argument("t_infinity must be positive");
  Vec d = Vec::Zero(n);
  for (int a = 0; a < n; ++a) {
    double acc = 0.0;
    for (int b = 0; b < n; ++b) {
      acc += params.psi(a, b) * std::sin(phases[b] - phases[a]);
    }
    d[a] = params.nat_freq[a] + params.kappa1 / (n * t_infinity) * acc;
  }
  return d;
}

double entropy(const EnsembleState& state) {
  require_positive_temps(state.temps);
  return state.temps.array().log().sum();
}

double entropy_production(const EnsembleState& state,
                          const ModelParams& params) {
  TkDerivative d = tk_rhs(state, params);
  double s = 0.0;
  for (int a = 0; a < params.n; ++a) s += d.dtemps[a] / state.temps[a];
  return s;
}

double phase_diameter(const Vec& phases) {
  if (phases.size() == 0) return 0.0;
  return phases.maxCoeff() - phases.minCoeff();
}

double order_parameter(const Vec& phases) {
  if (phases.size() == 0) return 0.0;
  std::complex<double> z{0.0, 0.0};
  for (int i = 0; i < phases.size(); ++i) {
    z += std::complex<double>{std::cos(phases[i]), std::sin(phases[i])};
  }
  return std::abs(z) / static_cast<double>(phases.size());
}

Observables observables(const EnsembleState& state,
                        const ModelParams& params) {
  Observables o;
  o.entropy = entropy(state);
  o.phase_diameter = phase_diameter(state.phases);
  o.temp_diameter = state.temps.maxCoeff() - state.temps.minCoeff();
  o.order_parameter = order_parameter(state.phases);
  const double a = params.eta * params.eta / (2.0 * params.t_star * params.t_star);
  o.conserved_g = (state.temps.array() + a * state.temps.array().square()).sum();
  o.phase_sum = state.phases.sum();
  o.avg_phase = o.phase_sum / static_cast<double>(state.phases.size());
  return o;
}

double asymptotic_temperature(const Vec& temps_in, double eta, double t_star) {
  require_positive_temps(temps_in);
  const double a = eta * eta / (2.0 * t_star * t_star);
  const double rhs =
      (temps_in.array() + a * temps_in.array().square()).mean();
  if (a == 0.0) return rhs;
  // Positive root of a T^2 + T - rhs = 0, written so that no cancellation
  // occurs when a*rhs is tiny.
  return 2.0 * rhs / (1.0 + std::sqrt(1.0 + 4.0 * a * rhs));
}

}  // namespace tklab
