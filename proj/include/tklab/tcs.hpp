#pragma once

#include "tklab/model.hpp"

namespace tklab {

using Vec2 = Eigen::Vector2d;
// One row per particle: planar positions/velocities.
using Mat2 = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Planar flocking state with per-particle temperature.
struct TcsState {
  double time = 0.0;
  Mat2 positions;
  Mat2 velocities;
  Vec temps;

  Vec2 mean_velocity() const {
    return velocities.colwise().mean().transpose();
  }
  void validate() const;
};

struct TcsDerivative {
  Mat2 dpositions;
  Mat2 dvelocities;
  Vec dtemps;    // recovered from denergy minus v . dv
  Vec denergy;   // d/dt of T + |v|^2/2
};

/// Flocking right-hand side. Works in any inertial frame: the mean
/// velocity is subtracted inside the coupling terms, and the energy
/// balance carries the matching mean-velocity work term, so momentum and
/// total energy derivatives vanish identically.
TcsDerivative tcs_rhs(const TcsState& state, const ModelParams& params);

/// x -> x + t c, v -> v + c, temperatures unchanged.
TcsState galilean_shift(const TcsState& state, const Vec2& c);

/// Places each oscillator's velocity on the heading-angle manifold
/// v = eta (T / T*) exp(i theta), read as a 2-vector.
TcsState ansatz_embed(const EnsembleState& tk_state, const ModelParams& params,
                      const Mat2& lattice_positions);

struct AnsatzProjection {
  Vec phases;       // arg(v), unwrapped against prev_phases when given
  Vec temps;
  double residual;  // max over particles of | |v| T* / (eta T) - 1 |
};

/// Inverse of the embedding. Phases of the first sample land in (-pi, pi];
/// pass the previous sample's phases to get nearest-continuation
/// unwrapping along a trajectory. Throws std::domain_error when some
/// velocity vanishes (degenerate heading).
AnsatzProjection ansatz_project(const TcsState& state,
                                const ModelParams& params,
                                const Vec* prev_phases = nullptr);

}  // namespace tklab
