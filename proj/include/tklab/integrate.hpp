#pragma once

#include <functional>
#include <vector>

#include "tklab/model.hpp"
#include "tklab/tcs.hpp"

namespace tklab {

enum class Method { rk4_fixed, rk45_adaptive };

struct IntegratorOptions {
  Method method = Method::rk45_adaptive;
  double dt = 0.0;  // fixed step, or initial step; 0 picks a heuristic
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double t_end = 10.0;
  int output_stride = 1;
  double positivity_floor = 1e-12;

  void validate() const;
};

/// Thrown when a step cannot be completed (step-size underflow, or a
/// fixed-step positivity violation). Carries the last valid flat state.
struct IntegrationError : std::runtime_error {
  double last_time;
  Vec last_state;
  IntegrationError(const std::string& what, double t, Vec y)
      : std::runtime_error(what), last_time(t), last_state(std::move(y)) {}
};

using FlatRhs = std::function<Vec(double, const Vec&)>;

struct FlatTrajectory {
  std::vector<double> times;
  std::vector<Vec> states;
};

/// Time-steps an arbitrary flat ODE. Components in
/// [positivity_offset, positivity_offset + positivity_count) must stay at
/// or above positivity_floor: adaptive steps that violate this are
/// rejected and retried at half step, the fixed method aborts.
FlatTrajectory integrate_flat(const FlatRhs& rhs, const Vec& y0, double t0,
                              const IntegratorOptions& options,
                              int positivity_offset = 0,
                              int positivity_count = 0);

struct TkSample {
  double t;
  EnsembleState state;
  Observables obs;
};

struct TkTrajectory {
  std::vector<TkSample> samples;
  ModelParams params;
  IntegratorOptions options;

  const TkSample& back() const { return samples.back(); }
  std::size_t size() const { return samples.size(); }

  // Column extraction helpers for analysis and serialization.
  std::vector<double> times() const;
  std::vector<std::pair<double, double>> series(
      const std::function<double(const TkSample&)>& f) const;
};

struct TcsSample {
  double t;
  TcsState state;
};

struct TcsTrajectory {
  std::vector<TcsSample> samples;
  ModelParams params;
  IntegratorOptions options;
};

/// Default step heuristic: a hundredth of the fastest local rate estimate
/// min(T_min / (kappa1 psi_max), T_min^2 / (kappa2 zeta_max)).
double default_dt(const ModelParams& params, const Vec& temps_in);

TkTrajectory integrate_tk(const ModelParams& params,
                          const EnsembleState& initial,
                          const IntegratorOptions& options);

/// Integrates the fixed-temperature Kuramoto system; the trajectory
/// stores temps identically equal to t_infinity so that observables and
/// serialization work uniformly.
TkTrajectory integrate_kuramoto(const ModelParams& params, const Vec& phases0,
                                double t_infinity,
                                const IntegratorOptions& options);

TcsTrajectory integrate_tcs(const ModelParams& params, const TcsState& initial,
                            const IntegratorOptions& options);

}  // namespace tklab
