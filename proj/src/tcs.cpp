#include "tklab/tcs.hpp"

#include <cmath>

namespace tklab {

void TcsState::validate() const {
  const auto n = temps.size();
  if (positions.rows() != n || velocities.rows() != n)
    throw std::invalid_argument("TcsState field lengths disagree");
  for (int i = 0; i < n; ++i) {
    if (!(temps[i] > 0.0))
      throw std::domain_error("nonpositive temperature at index " +
                              std::to_string(i) + ": " +
                              std::to_string(temps[i]));
  }
}

TcsDerivative tcs_rhs(const TcsState& state, const ModelParams& params) {
  const int n = params.n;
  state.validate();
  const Vec2 vbar = state.mean_velocity();

  TcsDerivative d;
  d.dpositions = state.velocities;
  d.dvelocities = Mat2::Zero(n, 2);
  d.denergy = Vec::Zero(n);
  d.dtemps = Vec::Zero(n);

  for (int a = 0; a < n; ++a) {
    Vec2 acc = Vec2::Zero();
    double eacc = 0.0;
    const Vec2 va = state.velocities.row(a).transpose();
    for (int b = 0; b < n; ++b) {
      const Vec2 vb = state.velocities.row(b).transpose();
      acc += params.psi(a, b) *
             ((vb - vbar) / state.temps[b] - (va - vbar) / state.temps[a]);
      eacc += params.zeta(a, b) * (1.0 / state.temps[a] - 1.0 / state.temps[b]);
    }
    const Vec2 dva = params.kappa1 / n * acc;
    d.dvelocities.row(a) = dva.transpose();
    // Energy balance plus the work done by the mean-velocity frame term.
    d.denergy[a] = params.kappa2 / n * eacc + dva.dot(vbar);
    d.dtemps[a] = d.denergy[a] - va.dot(dva);
  }
  return d;
}

TcsState galilean_shift(const TcsState& state, const Vec2& c) {
  TcsState out = state;
  for (int a = 0; a < state.temps.size(); ++a) {
    out.positions.row(a) += state.time * c.transpose();
    out.velocities.row(a) += c.transpose();
  }
  return out;
}

TcsState ansatz_embed(const EnsembleState& tk_state, const ModelParams& params,
                      const Mat2& lattice_positions) {
  tk_state.validate();
  const int n = params.n;
  TcsState out;
  out.time = tk_state.time;
  out.positions = lattice_positions;
  out.velocities = Mat2::Zero(n, 2);
  out.temps = tk_state.temps;
  for (int a = 0; a < n; ++a) {
    const double speed = params.eta * tk_state.temps[a] / params.t_star;
    out.velocities(a, 0) = speed * std::cos(tk_state.phases[a]);
    out.velocities(a, 1) = speed * std::sin(tk_state.phases[a]);
  }
  return out;
}

AnsatzProjection ansatz_project(const TcsState& state,
                                const ModelParams& params,
                                const Vec* prev_phases) {
  state.validate();
  const int n = static_cast<int>(state.temps.size());
  AnsatzProjection out;
  out.phases = Vec::Zero(n);
  out.temps = state.temps;
  out.residual = 0.0;
  constexpr double two_pi = 2.0 * M_PI;
  for (int a = 0; a < n; ++a) {
    const double speed = state.velocities.row(a).norm();
    if (speed == 0.0)
      throw std::domain_error("degenerate heading: zero velocity at index " +
                              std::to_string(a));
    double theta = std::atan2(state.velocities(a, 1), state.velocities(a, 0));
    if (prev_phases != nullptr) {
      // Nearest continuation against the previous sample.
      theta += two_pi * std::round(((*prev_phases)[a] - theta) / two_pi);
    }
    out.phases[a] = theta;
    const double ratio =
        speed * params.t_star / (params.eta * state.temps[a]);
    out.residual = std::max(out.residual, std::abs(ratio - 1.0));
  }
  return out;
}

}  // namespace tklab
