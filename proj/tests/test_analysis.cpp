#include <cmath>
#include <random>

#include "doctest.h"
#include "tklab/analysis.hpp"

using namespace tklab;

namespace {

std::vector<std::pair<double, double>> sampled(
    int count, double dt, const std::function<double(double)>& f) {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < count; ++i) out.emplace_back(i * dt, f(i * dt));
  return out;
}

}  // namespace

TEST_CASE("fit_decay recovers an exact exponential rate") {
  const auto series =
      sampled(200, 0.05, [](double t) { return std::exp(-2.0 * t); });
  const auto fit = fit_decay(series, 0.5);
  CHECK(fit.rate == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(fit.floor_reached);
}

TEST_CASE("fit_decay of a constant series is zero") {
  const auto series = sampled(100, 0.1, [](double) { return 0.7; });
  const auto fit = fit_decay(series, 0.5);
  CHECK(fit.rate == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fit_decay tolerates small multiplicative noise") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
  const double lambda = 1.4;
  auto series = sampled(400, 0.02, [&](double t) {
    return 3.0 * std::exp(-lambda * t) * (1.0 + noise(rng));
  });
  const auto fit = fit_decay(series, 0.5);
  CHECK(std::abs(fit.rate - lambda) / lambda <= 0.01);
}

TEST_CASE("fit_decay reports a floored-out series") {
  const auto series =
      sampled(100, 1.0, [](double t) { return std::exp(-2.0 * t); });
  CHECK_THROWS_AS(fit_decay(series, 0.5, 1e-12), FitError);
  try {
    fit_decay(series, 0.5, 1e-12);
  } catch (const FitError& e) {
    CHECK(e.floor_reached);
  }
}

TEST_CASE("temp_decay_bound frozen values") {
  SUBCASE("hand-evaluated example") {
    const auto p = ModelParams::uniform(2, 1.0, 1.0, 1.0, 1.0);
    CHECK(temp_decay_bound(p, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("eta = 0 degenerates to kappa2 zeta_min / T_inf^2") {
    const auto p = ModelParams::uniform(2, 1.0, 2.0, 0.0, 1.3);
    CHECK(temp_decay_bound(p, 1.5) ==
          doctest::Approx(2.0 / 2.25).epsilon(1e-14));
  }
  SUBCASE("decreasing in T_inf") {
    const auto p = ModelParams::uniform(2, 1.0, 1.0, 0.7, 1.0);
    CHECK(temp_decay_bound(p, 1.0) > temp_decay_bound(p, 1.5));
  }
}

TEST_CASE("sync_rate_bound frozen values") {
  const auto p = ModelParams::uniform(2, 1.0);
  CHECK(sync_rate_bound(p, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  const auto p2 = ModelParams::uniform(2, 3.0);
  CHECK(sync_rate_bound(p2, 2.0) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("practical_sync_bound frozen values") {
  const auto p = ModelParams::uniform(2, 1.0);
  SUBCASE("homogeneous gives zero") {
    CHECK(practical_sync_bound(0.0, 1.0, p).value() == 0.0);
  }
  SUBCASE("argument at or above one is infeasible") {
    CHECK_FALSE(practical_sync_bound(1.0, 1.0, p).has_value());
    CHECK_FALSE(practical_sync_bound(2.0, 1.0, p).has_value());
  }
  SUBCASE("arcsin example") {
    CHECK(practical_sync_bound(0.5, 1.0, p).value() ==
          doctest::Approx(M_PI / 6).epsilon(1e-14));
  }
}

TEST_CASE("l1_distance and its rate bound") {
  Vec a(3), b(3);
  a << 0.0, 1.0, -1.0;
  b << 0.5, 1.0, -2.0;
  CHECK(l1_distance(a, b) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(l1_distance(a, a) == 0.0);
  Vec c(2);
  CHECK_THROWS_AS(l1_distance(a, c), std::invalid_argument);

  const auto p = ModelParams::uniform(2, 1.0);
  CHECK(l1_stability_rate_bound(p, 1.0, M_PI / 4) ==
        doctest::Approx(2.0 / M_PI).epsilon(1e-14));
  // The bound vanishes at the quarter-circle edge.
  CHECK(l1_stability_rate_bound(p, 1.0, M_PI / 2 - 1e-9) <= 1e-8);
}

namespace {

// Synthetic trajectory with prescribed observable channels; state data
// stay at an equilibrium so claim checks exercise only the observables.
TkTrajectory synthetic_trajectory(
    int count, const std::function<double(double)>& entropy_fn) {
  TkTrajectory traj;
  traj.params = ModelParams::uniform(3);
  for (int i = 0; i < count; ++i) {
    TkSample s;
    s.t = 0.1 * i;
    s.state.time = s.t;
    s.state.phases = Vec::Zero(3);
    s.state.temps = Vec::Ones(3);
    s.obs = observables(s.state, traj.params);
    s.obs.entropy = entropy_fn(s.t);
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

}  // namespace

TEST_CASE("verify_trajectory accepts equilibrium data") {
  const auto traj = synthetic_trajectory(150, [](double) { return 0.0; });
  const auto verdicts = verify_trajectory(
      traj, traj.params,
      {"entropy_monotone", "temp_bounds", "conserved_g",
       "diameter_contraction", "order_functional"});
  for (const auto& v : verdicts) CHECK(v.pass);
}

TEST_CASE("corrupted entropy fails the monotonicity claim") {
  // A dip of 1e-3 at mid-run, far beyond slack.
  const auto traj = synthetic_trajectory(150, [](double t) {
    return (t > 7.0 && t < 8.0) ? -1e-3 : 0.0;
  });
  const auto verdicts =
      verify_trajectory(traj, traj.params, {"entropy_monotone"});
  CHECK_FALSE(verdicts.front().pass);
}

TEST_CASE("unknown claim ids are rejected") {
  const auto traj = synthetic_trajectory(120, [](double) { return 0.0; });
  CHECK_THROWS_AS(verify_trajectory(traj, traj.params, {"no_such_claim"}),
                  std::invalid_argument);
}

TEST_CASE("tail helpers use the trailing tenth of the samples") {
  std::vector<std::pair<double, double>> series;
  for (int i = 0; i < 100; ++i)
    series.emplace_back(i, i < 85 ? 5.0 : 1.0 + 0.01 * i);
  CHECK(tail_max(series) == doctest::Approx(1.99));
}

TEST_CASE("order_functional is the psi-weighted cosine sum") {
  auto p = ModelParams::uniform(2);
  Vec phases(2);
  phases << 0.0, M_PI / 3;
  // psi_11 cos 0 + psi_22 cos 0 + 2 psi_12 cos(pi/3) = 1 + 1 + 1 = 3.
  CHECK(order_functional(phases, p) == doctest::Approx(3.0).epsilon(1e-14));
}
