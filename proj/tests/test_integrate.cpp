#include <cmath>
#include <random>

#include "doctest.h"
#include "tklab/integrate.hpp"

using namespace tklab;

namespace {

ModelParams uniform_params(int n, double kappa1, double kappa2, double eta,
                           double t_star) {
  return ModelParams::uniform(n, kappa1, kappa2, eta, t_star);
}

}  // namespace

TEST_CASE("exact equilibrium stays constant") {
  const auto p = uniform_params(4, 1.0, 1.0, 0.5, 1.0);
  EnsembleState init;
  init.phases = Vec::Constant(4, 0.9);
  init.temps = Vec::Constant(4, 1.4);
  IntegratorOptions opts;
  opts.t_end = 5.0;
  const auto traj = integrate_tk(p, init, opts);
  for (const auto& s : traj.samples) {
    CHECK((s.state.phases.array() - 0.9).abs().maxCoeff() <= 1e-12);
    CHECK((s.state.temps.array() - 1.4).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("two-oscillator constant-temperature closed form") {
  // With kappa2 = 0 the temperatures freeze and the phase difference
  // Delta solves Delta' = -(kappa1 / T0) sin Delta, i.e.
  // tan(Delta(t)/2) = tan(Delta(0)/2) exp(-(kappa1/T0) t).
  const double kappa1 = 1.0, t0 = 2.0, delta0 = 2.0;
  auto p = uniform_params(2, kappa1, 0.0, 0.0, 1.0);
  EnsembleState init;
  init.phases = Vec::Zero(2);
  init.phases << -delta0 / 2, delta0 / 2;
  init.temps = Vec::Constant(2, t0);
  IntegratorOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-14;
  opts.t_end = 10.0;
  const auto traj = integrate_tk(p, init, opts);
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    const double delta = s.state.phases[1] - s.state.phases[0];
    const double exact =
        2.0 * std::atan(std::tan(delta0 / 2) * std::exp(-(kappa1 / t0) * s.t));
    worst = std::max(worst, std::abs(delta - exact) / std::abs(exact));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("temperature extremes are monotone along TK trajectories") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tp(0.5, 2.5), ph(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3 + trial;
    const auto p = uniform_params(n, 1.0, 1.0, 0.7, 1.1);
    EnsembleState init;
    init.phases = Vec::Zero(n);
    init.temps = Vec::Zero(n);
    for (int i = 0; i < n; ++i) init.phases[i] = ph(rng);
    for (int i = 0; i < n; ++i) init.temps[i] = tp(rng);
    IntegratorOptions opts;
    opts.t_end = 8.0;
    const auto traj = integrate_tk(p, init, opts);
    double lo = init.temps.minCoeff(), hi = init.temps.maxCoeff();
    for (const auto& s : traj.samples) {
      CHECK(s.state.temps.minCoeff() >= lo - 1e-10);
      CHECK(s.state.temps.maxCoeff() <= hi + 1e-10);
      lo = std::max(lo, s.state.temps.minCoeff());
      hi = std::min(hi, s.state.temps.maxCoeff());
    }
  }
}

TEST_CASE("rk4 halving shows fourth-order convergence") {
  const auto p = uniform_params(3, 1.0, 1.0, 0.6, 1.0);
  EnsembleState init;
  init.phases = Vec::Zero(3);
  init.phases << 0.0, 1.0, -0.8;
  init.temps = Vec::Zero(3);
  init.temps << 0.8, 1.4, 1.1;

  IntegratorOptions ref_opts;
  ref_opts.rel_tol = 1e-13;
  ref_opts.abs_tol = 1e-14;
  ref_opts.t_end = 2.0;
  const Vec ref_phases =
      integrate_tk(p, init, ref_opts).back().state.phases;

  auto rk4_error = [&](double dt) {
    IntegratorOptions opts;
    opts.method = Method::rk4_fixed;
    opts.dt = dt;
    opts.t_end = 2.0;
    const auto traj = integrate_tk(p, init, opts);
    return (traj.back().state.phases - ref_phases).cwiseAbs().maxCoeff();
  };
  const double e1 = rk4_error(0.04);
  const double e2 = rk4_error(0.02);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("adaptive runs conserve the temperature functional") {
  const auto p = uniform_params(5, 1.2, 0.9, 0.8, 1.1);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> tp(0.5, 2.5), ph(-2.0, 2.0);
  EnsembleState init;
  init.phases = Vec::Zero(5);
  init.temps = Vec::Zero(5);
  for (int i = 0; i < 5; ++i) init.phases[i] = ph(rng);
  for (int i = 0; i < 5; ++i) init.temps[i] = tp(rng);
  IntegratorOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-12;
  opts.t_end = 20.0;
  const auto traj = integrate_tk(p, init, opts);
  const double g0 = traj.samples.front().obs.conserved_g;
  for (const auto& s : traj.samples) {
    CHECK(std::abs(s.obs.conserved_g - g0) <= 1e-6 * std::abs(g0));
  }
}

TEST_CASE("sample times are strictly increasing") {
  const auto p = uniform_params(3, 1.0, 1.0, 0.3, 1.0);
  EnsembleState init;
  init.phases = Vec::Zero(3);
  init.phases << 0.5, -0.5, 0.1;
  init.temps = Vec::Constant(3, 1.0);
  IntegratorOptions opts;
  opts.t_end = 3.0;
  const auto traj = integrate_tk(p, init, opts);
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    CHECK(traj.samples[i].t > traj.samples[i - 1].t);
  CHECK(traj.back().t == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("fixed-step positivity violation aborts with diagnostics") {
  // Constant downward drift crosses zero at t = 1 regardless of step.
  FlatRhs rhs = [](double, const Vec& y) {
    return Vec(Vec::Constant(y.size(), -1.0));
  };
  Vec y0 = Vec::Constant(1, 1.0);
  IntegratorOptions opts;
  opts.method = Method::rk4_fixed;
  opts.dt = 0.5;
  opts.t_end = 5.0;
  CHECK_THROWS_AS(integrate_flat(rhs, y0, 0.0, opts, 0, 1), IntegrationError);
}

TEST_CASE("adaptive integration rejects steps that cross the floor") {
  FlatRhs rhs = [](double, const Vec& y) { return Vec(-3.0 * y); };
  Vec y0 = Vec::Constant(1, 1.0);
  IntegratorOptions opts;
  opts.t_end = 4.0;
  const auto traj = integrate_flat(rhs, y0, 0.0, opts, 0, 1);
  for (const auto& s : traj.states) CHECK(s[0] >= opts.positivity_floor);
}

TEST_CASE("kuramoto trajectory stores the reference temperature") {
  const auto p = uniform_params(3, 1.0, 1.0, 0.0, 1.0);
  Vec phases(3);
  phases << 0.2, -0.4, 0.9;
  IntegratorOptions opts;
  opts.t_end = 2.0;
  const auto traj = integrate_kuramoto(p, phases, 1.7, opts);
  for (const auto& s : traj.samples)
    CHECK((s.state.temps.array() - 1.7).abs().maxCoeff() == 0.0);
}

TEST_CASE("default_dt scales with the fastest local rate") {
  const auto p = uniform_params(4, 2.0, 1.0, 0.0, 1.0);
  Vec temps = Vec::Constant(4, 0.5);
  const double dt = default_dt(p, temps);
  CHECK(dt == doctest::Approx(0.01 * std::min(0.5 / 2.0, 0.25)).epsilon(1e-12));
}
