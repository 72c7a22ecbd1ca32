#include "tklab/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace tklab {

void IntegratorOptions::validate() const {
  if (method == Method::rk4_fixed && !(dt > 0.0))
    throw std::invalid_argument("fixed-step method requires dt > 0");
  if (dt < 0.0) throw std::invalid_argument("dt must be nonnegative");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (output_stride < 1)
    throw std::invalid_argument("output_stride must be positive");
  if (!(positivity_floor > 0.0))
    throw std::invalid_argument("positivity_floor must be positive");
}

namespace {

bool positivity_ok(const Vec& y, int offset, int count, double floor) {
  for (int i = offset; i < offset + count; ++i) {
    if (!(y[i] >= floor)) return false;
  }
  return true;
}

bool all_finite(const Vec& y) {
  for (int i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) return false;
  }
  return true;
}

Vec rk4_step(const FlatRhs& rhs, double t, const Vec& y, double h) {
  const Vec k1 = rhs(t, y);
  const Vec k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
  const Vec k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
  const Vec k4 = rhs(t + h, y + h * k3);
  return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Dormand-Prince 5(4) pair.
struct Dopri45Result {
  Vec y5;       // 5th-order solution
  double error; // scaled error norm
};

Dopri45Result dopri45_step(const FlatRhs& rhs, double t, const Vec& y,
                           double h, double rel_tol, double abs_tol) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const Vec k1 = rhs(t, y);
  const Vec k2 = rhs(t + c2 * h, y + h * (a21 * k1));
  const Vec k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const Vec k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vec k5 =
      rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vec k6 = rhs(
      t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Dopri45Result out;
  out.y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const Vec k7 = rhs(t + h, out.y5);
  const Vec err =
      h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

  double norm2 = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    const double scale =
        abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(out.y5[i]));
    const double r = err[i] / scale;
    norm2 += r * r;
  }
  out.error = std::sqrt(norm2 / static_cast<double>(y.size()));
  return out;
}

}  // namespace

FlatTrajectory integrate_flat(const FlatRhs& rhs, const Vec& y0, double t0,
                              const IntegratorOptions& options,
                              int positivity_offset, int positivity_count) {
  options.validate();
  if (!all_finite(y0))
    throw std::invalid_argument("initial state contains non-finite values");
  if (!positivity_ok(y0, positivity_offset, positivity_count,
                     options.positivity_floor))
    throw std::invalid_argument(
        "initial state violates the positivity floor");

  FlatTrajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(y0);

  const double t_final = t0 + options.t_end;
  double t = t0;
  Vec y = y0;
  long step_index = 0;

  auto record = [&](double tn, const Vec& yn, bool force) {
    ++step_index;
    if (force || step_index % options.output_stride == 0) {
      traj.times.push_back(tn);
      traj.states.push_back(yn);
    }
  };

  if (options.method == Method::rk4_fixed) {
    const double h = options.dt;
    const long n_steps = std::lround(std::ceil(options.t_end / h - 1e-12));
    for (long i = 0; i < n_steps; ++i) {
      const double hi = std::min(h, t_final - t);
      Vec y_next = rk4_step(rhs, t, y, hi);
      if (!all_finite(y_next) ||
          !positivity_ok(y_next, positivity_offset, positivity_count,
                         options.positivity_floor)) {
        throw IntegrationError(
            "fixed-step integration left the admissible region at t = " +
                std::to_string(t + hi),
            t, y);
      }
      t += hi;
      y = std::move(y_next);
      record(t, y, i == n_steps - 1);
    }
    return traj;
  }

  // Adaptive path.
  double h = options.dt > 0.0 ? options.dt : options.t_end / 100.0;
  h = std::min(h, options.t_end);
  const double h_min_scale = 1e-14;
  while (t < t_final) {
    h = std::min(h, t_final - t);
    if (!(h > h_min_scale * std::max(1.0, std::abs(t)))) {
      throw IntegrationError("step-size underflow at t = " + std::to_string(t),
                             t, y);
    }
    Dopri45Result r =
        dopri45_step(rhs, t, y, h, options.rel_tol, options.abs_tol);
    const bool admissible =
        all_finite(r.y5) && positivity_ok(r.y5, positivity_offset,
                                          positivity_count,
                                          options.positivity_floor);
    if (!admissible) {
      h *= 0.5;
      continue;
    }
    if (r.error <= 1.0) {
      t += h;
      y = std::move(r.y5);
      record(t, y, t >= t_final);
      const double grow =
          r.error > 0.0 ? 0.9 * std::pow(r.error, -0.2) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      h *= std::clamp(0.9 * std::pow(r.error, -0.2), 0.2, 0.9);
    }
  }
  return traj;
}

std::vector<double> TkTrajectory::times() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.t);
  return out;
}

std::vector<std::pair<double, double>> TkTrajectory::series(
    const std::function<double(const TkSample&)>& f) const {
  std::vector<std::pair<double, double>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.emplace_back(s.t, f(s));
  return out;
}

double default_dt(const ModelParams& params, const Vec& temps_in) {
  const double t_min = temps_in.minCoeff();
  double scale = t_min / (params.kappa1 * params.psi_max());
  if (params.kappa2 > 0.0 && params.zeta_max() > 0.0) {
    scale = std::min(scale, t_min * t_min / (params.kappa2 * params.zeta_max()));
  }
  return 0.01 * scale;
}

TkTrajectory integrate_tk(const ModelParams& params,
                          const EnsembleState& initial,
                          const IntegratorOptions& options) {
  params.validate();
  initial.validate();
  const int n = params.n;
  if (initial.phases.size() != n)
    throw std::invalid_argument("initial state size does not match params");

  IntegratorOptions opts = options;
  if (opts.dt == 0.0 && opts.method == Method::rk45_adaptive)
    opts.dt = default_dt(params, initial.temps);

  Vec y0(2 * n);
  y0.head(n) = initial.phases;
  y0.tail(n) = initial.temps;

  FlatRhs rhs = [&params, n](double, const Vec& y) {
    EnsembleState s;
    s.phases = y.head(n);
    s.temps = y.tail(n);
    TkDerivative d = tk_rhs(s, params);
    Vec dy(2 * n);
    dy.head(n) = d.dphases;
    dy.tail(n) = d.dtemps;
    return dy;
  };

  FlatTrajectory flat = integrate_flat(rhs, y0, initial.time, opts, n, n);

  TkTrajectory traj;
  traj.params = params;
  traj.options = opts;
  traj.samples.reserve(flat.times.size());
  for (std::size_t i = 0; i < flat.times.size(); ++i) {
    TkSample s;
    s.t = flat.times[i];
    s.state.time = flat.times[i];
    s.state.phases = flat.states[i].head(n);
    s.state.temps = flat.states[i].tail(n);
    s.obs = observables(s.state, params);
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

TkTrajectory integrate_kuramoto(const ModelParams& params, const Vec& phases0,
                                double t_infinity,
                                const IntegratorOptions& options) {
  params.validate();
  if (!(t_infinity > 0.0))
    throw std::invalid_argument("t_infinity must be positive");
  const int n = params.n;

  IntegratorOptions opts = options;
  if (opts.dt == 0.0 && opts.method == Method::rk45_adaptive)
    opts.dt = default_dt(params, Vec::Constant(n, t_infinity));

  FlatRhs rhs = [&params, t_infinity](double, const Vec& y) {
    return kuramoto_rhs(y, params, t_infinity);
  };

  FlatTrajectory flat = integrate_flat(rhs, phases0, 0.0, opts);

  TkTrajectory traj;
  traj.params = params;
  traj.options = opts;
  traj.samples.reserve(flat.times.size());
  for (std::size_t i = 0; i < flat.times.size(); ++i) {
    TkSample s;
    s.t = flat.times[i];
    s.state.time = flat.times[i];
    s.state.phases = flat.states[i];
    s.state.temps = Vec::Constant(n, t_infinity);
    s.obs = observables(s.state, params);
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

TcsTrajectory integrate_tcs(const ModelParams& params, const TcsState& initial,
                            const IntegratorOptions& options) {
  params.validate();
  initial.validate();
  const int n = params.n;

  IntegratorOptions opts = options;
  if (opts.dt == 0.0 && opts.method == Method::rk45_adaptive)
    opts.dt = default_dt(params, initial.temps);

  // Layout: [pos_x pos_y vel_x vel_y temps], n entries each.
  Vec y0(5 * n);
  y0.segment(0, n) = initial.positions.col(0);
  y0.segment(n, n) = initial.positions.col(1);
  y0.segment(2 * n, n) = initial.velocities.col(0);
  y0.segment(3 * n, n) = initial.velocities.col(1);
  y0.segment(4 * n, n) = initial.temps;

  auto unpack = [n](double t, const Vec& y) {
    TcsState s;
    s.time = t;
    s.positions = Mat2(n, 2);
    s.velocities = Mat2(n, 2);
    s.positions.col(0) = y.segment(0, n);
    s.positions.col(1) = y.segment(n, n);
    s.velocities.col(0) = y.segment(2 * n, n);
    s.velocities.col(1) = y.segment(3 * n, n);
    s.temps = y.segment(4 * n, n);
    return s;
  };

  FlatRhs rhs = [&params, n, unpack](double t, const Vec& y) {
    TcsState s = unpack(t, y);
    TcsDerivative d = tcs_rhs(s, params);
    Vec dy(5 * n);
    dy.segment(0, n) = d.dpositions.col(0);
    dy.segment(n, n) = d.dpositions.col(1);
    dy.segment(2 * n, n) = d.dvelocities.col(0);
    dy.segment(3 * n, n) = d.dvelocities.col(1);
    dy.segment(4 * n, n) = d.dtemps;
    return dy;
  };

  FlatTrajectory flat =
      integrate_flat(rhs, y0, initial.time, opts, 4 * n, n);

  TcsTrajectory traj;
  traj.params = params;
  traj.options = opts;
  traj.samples.reserve(flat.times.size());
  for (std::size_t i = 0; i < flat.times.size(); ++i) {
    traj.samples.push_back({flat.times[i], unpack(flat.times[i], flat.states[i])});
  }
  return traj;
}

}  // namespace tklab
