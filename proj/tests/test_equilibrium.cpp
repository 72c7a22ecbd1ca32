#include <cmath>
#include <random>

#include "doctest.h"
#include "tklab/equilibrium.hpp"

using namespace tklab;

TEST_CASE("homogeneous all-to-all network locks at the coherent state") {
  const auto p = ModelParams::uniform(5);
  Vec guess(5);
  guess << 0.1, -0.2, 0.3, 0.0, 0.15;
  const auto locked = solve_phase_locked(p, 1.3, 2.5, guess);
  CHECK(locked.residual <= 1e-12);
  for (int i = 0; i < 5; ++i)
    CHECK(locked.phases[i] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("two-oscillator balance has the arcsin closed form") {
  const double omega = 0.3, t_inf = 1.2, kappa1 = 1.0, psi = 1.0;
  auto p = ModelParams::uniform(2, kappa1);
  p.nat_freq << -omega, omega;
  Vec guess = Vec::Zero(2);
  const auto locked = solve_phase_locked(p, t_inf, 0.0, guess);
  const double gap = locked.phases[1] - locked.phases[0];
  CHECK(gap ==
        doctest::Approx(std::asin(2.0 * omega * t_inf / (kappa1 * psi)))
            .epsilon(1e-10));
  CHECK(locked.phases[0] == doctest::Approx(-gap / 2).epsilon(1e-10));
}

TEST_CASE("nonzero frequency sum is infeasible") {
  auto p = ModelParams::uniform(3);
  p.nat_freq << 0.1, 0.2, 0.3;
  CHECK_THROWS_AS(solve_phase_locked(p, 1.0, 0.0, Vec::Zero(3)),
                  InfeasibleError);
}

TEST_CASE("solver output re-evaluates to a tiny residual") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> freq(-0.3, 0.3), mat(0.8, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 5;
    auto p = ModelParams::uniform(n, 1.5);
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) p.psi(a, b) = p.psi(b, a) = mat(rng);
    for (int i = 0; i < n; ++i) p.nat_freq[i] = freq(rng);
    p.nat_freq.array() -= p.nat_freq.mean();
    const auto locked = solve_phase_locked(p, 1.0, 0.4, Vec::Zero(n));
    CHECK(phase_locked_residual(p, 1.0, locked.phases)
              .lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(locked.phases.sum() == doctest::Approx(0.4).epsilon(1e-10));
  }
}

TEST_CASE("translation equivariance of the locked state") {
  auto p = ModelParams::uniform(4, 1.0);
  p.nat_freq << 0.2, -0.1, -0.3, 0.2;
  const auto base = solve_phase_locked(p, 1.1, 0.0, Vec::Zero(4));
  const double c = 0.77;
  const auto shifted =
      solve_phase_locked(p, 1.1, 4.0 * c, Vec::Constant(4, c));
  CHECK((shifted.phases.array() - base.phases.array() - c).abs().maxCoeff() <=
        1e-9);
}

TEST_CASE("relabeling oscillators relabels the solution") {
  auto p = ModelParams::uniform(3, 1.2);
  p.nat_freq << 0.25, -0.15, -0.1;
  p.psi << 1.0, 0.8, 1.2, 0.8, 1.0, 0.9, 1.2, 0.9, 1.0;
  Vec guess(3);
  guess << 0.1, 0.0, -0.1;
  const auto base = solve_phase_locked(p, 1.0, 0.0, guess);

  // Swap oscillators 0 and 2 consistently.
  auto q = p;
  std::swap(q.nat_freq[0], q.nat_freq[2]);
  Eigen::PermutationMatrix<3> perm;
  perm.indices() << 2, 1, 0;
  q.psi = perm.transpose() * p.psi * perm;
  Vec guess2(3);
  guess2 << guess[2], guess[1], guess[0];
  const auto swapped = solve_phase_locked(q, 1.0, 0.0, guess2);
  CHECK(swapped.phases[0] == doctest::Approx(base.phases[2]).epsilon(1e-9));
  CHECK(swapped.phases[2] == doctest::Approx(base.phases[0]).epsilon(1e-9));
}

TEST_CASE("classify_bipolar on frozen configurations") {
  SUBCASE("all equal is coherent") {
    Vec phases = Vec::Constant(4, 1.1);
    const auto cls = classify_bipolar(phases);
    CHECK(cls.kind == PhaseClass::coherent);
    CHECK(cls.group_antipode.empty());
  }
  SUBCASE("0,0,pi splits into the documented partition") {
    Vec phases(3);
    phases << 0.0, 0.0, M_PI;
    const auto cls = classify_bipolar(phases);
    CHECK(cls.kind == PhaseClass::bipolar);
    REQUIRE(cls.group_main.size() == 2);
    REQUIRE(cls.group_antipode.size() == 1);
    CHECK(cls.group_main[0] == 0);
    CHECK(cls.group_main[1] == 1);
    CHECK(cls.group_antipode[0] == 2);
  }
  SUBCASE("perturbation beyond tolerance is other") {
    Vec phases(3);
    phases << 0.0, 1e-3, M_PI;
    CHECK(classify_bipolar(phases, 1e-6).kind == PhaseClass::other);
  }
  SUBCASE("wrapping by 2 pi does not change the class") {
    Vec phases(3);
    phases << 0.0, 2.0 * M_PI, M_PI;
    CHECK(classify_bipolar(phases).kind == PhaseClass::bipolar);
  }
}

TEST_CASE("shift_bound frozen values") {
  SUBCASE("uniform temps give zero") {
    const auto p = ModelParams::uniform(3, 1.0, 1.0, 0.5, 1.0);
    CHECK(shift_bound(p, Vec::Constant(3, 1.7)) == 0.0);
  }
  SUBCASE("hand-evaluated example") {
    // eta=0, T*=1, T_in = (1,2): T_inf = 1.5, bound = 4 / 1.5 = 8/3.
    const auto p = ModelParams::uniform(2, 1.0, 1.0, 0.0, 1.0);
    Vec temps(2);
    temps << 1.0, 2.0;
    CHECK(shift_bound(p, temps) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("scales linearly in kappa1 over kappa2") {
    Vec temps(2);
    temps << 1.0, 2.0;
    const auto p1 = ModelParams::uniform(2, 1.0, 1.0, 0.0, 1.0);
    const auto p2 = ModelParams::uniform(2, 3.0, 2.0, 0.0, 1.0);
    CHECK(shift_bound(p2, temps) ==
          doctest::Approx(1.5 * shift_bound(p1, temps)).epsilon(1e-13));
  }
}
