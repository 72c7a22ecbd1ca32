#include <cmath>
#include <random>

#include "doctest.h"
#include "tklab/model.hpp"

using namespace tklab;

namespace {

ModelParams two_osc(double kappa1 = 1.0, double kappa2 = 1.0, double eta = 1.0,
                    double t_star = 1.0) {
  return ModelParams::uniform(2, kappa1, kappa2, eta, t_star);
}

EnsembleState state2(double th1, double th2, double t1, double t2) {
  EnsembleState s;
  s.phases = Vec::Zero(2);
  s.phases << th1, th2;
  s.temps = Vec::Zero(2);
  s.temps << t1, t2;
  return s;
}

ModelParams random_params(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> pos(0.5, 2.0), mat(0.3, 1.7),
      freq(-1.0, 1.0);
  ModelParams p = ModelParams::uniform(n, pos(rng), pos(rng), pos(rng) - 0.5,
                                       pos(rng));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      p.psi(a, b) = p.psi(b, a) = mat(rng);
      p.zeta(a, b) = p.zeta(b, a) = mat(rng);
    }
  for (int i = 0; i < n; ++i) p.nat_freq[i] = freq(rng);
  return p;
}

EnsembleState random_state(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> ph(-4.0, 4.0), tp(0.3, 3.0);
  EnsembleState s;
  s.phases = Vec::Zero(n);
  s.temps = Vec::Zero(n);
  for (int i = 0; i < n; ++i) s.phases[i] = ph(rng);
  for (int i = 0; i < n; ++i) s.temps[i] = tp(rng);
  return s;
}

// Sum-of-squares form of the entropy production; independent route used
// as an oracle against the direct implementation.
double entropy_production_symmetrized(const EnsembleState& s,
                                      const ModelParams& p) {
  const int n = p.n;
  const double ts2 = p.t_star * p.t_star;
  const double e2 = p.eta * p.eta;
  double total = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double ta = s.temps[a], tb = s.temps[b];
      const double num = p.zeta(a, b) * ts2 * (ts2 + e2 * (ta + tb)) *
                         (tb - ta) * (tb - ta);
      const double den =
          ta * ta * tb * tb * (ts2 + e2 * ta) * (ts2 + e2 * tb);
      total += num / den;
    }
  }
  return p.kappa2 / (2.0 * n) * total;
}

}  // namespace

TEST_CASE("tk_rhs matches the hand-evaluated two-oscillator example") {
  const auto p = two_osc();
  const auto s = state2(0.0, M_PI / 2, 1.0, 1.0);
  const auto d = tk_rhs(s, p);
  CHECK(d.dphases[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.dphases[1] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(d.dtemps[0] == doctest::Approx(0.0));
  CHECK(d.dtemps[1] == doctest::Approx(0.0));
}

TEST_CASE("identical phases drift with the natural frequencies") {
  auto p = two_osc();
  p.nat_freq << 0.3, -0.7;
  const auto s = state2(1.2, 1.2, 0.5, 2.5);
  const auto d = tk_rhs(s, p);
  CHECK(d.dphases[0] == 0.3);
  CHECK(d.dphases[1] == -0.7);
}

TEST_CASE("identical temperatures give exactly zero temperature derivative") {
  const auto p = two_osc();
  const auto s = state2(0.4, 2.9, 1.7, 1.7);
  const auto d = tk_rhs(s, p);
  CHECK(d.dtemps[0] == 0.0);
  CHECK(d.dtemps[1] == 0.0);
}

TEST_CASE("nonpositive temperature names the offending index") {
  const auto p = two_osc();
  auto s = state2(0.0, 1.0, 1.0, -0.5);
  CHECK_THROWS_WITH_AS(tk_rhs(s, p), doctest::Contains("index 1"),
                       std::domain_error);
}

TEST_CASE("kuramoto_rhs matches the hand-evaluated example") {
  const auto p = two_osc();
  Vec phases(2);
  phases << 0.0, M_PI / 2;
  const Vec d = kuramoto_rhs(phases, p, 2.0);
  CHECK(d[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d[1] == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("isothermal tk_rhs reduces to kuramoto_rhs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 6;
    auto p = random_params(rng, n);
    auto s = random_state(rng, n);
    const double t0 = s.temps[0];
    s.temps.setConstant(t0);
    const auto d = tk_rhs(s, p);
    const Vec dk = kuramoto_rhs(s.phases, p, t0);
    CHECK((d.dphases - dk).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("entropy of unit temperatures is zero") {
  EnsembleState s;
  s.phases = Vec::Zero(3);
  s.temps = Vec::Ones(3);
  CHECK(entropy(s) == 0.0);
}

TEST_CASE("entropy_production matches the hand-evaluated example") {
  auto p = two_osc(1.0, 1.0, 0.0, 1.0);
  const auto s = state2(0.0, 0.0, 1.0, 2.0);
  CHECK(entropy_production(s, p) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("entropy_production equals the symmetrized sum of squares") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    const auto p = random_params(rng, n);
    const auto s = random_state(rng, n);
    const double direct = entropy_production(s, p);
    const double oracle = entropy_production_symmetrized(s, p);
    CHECK(direct == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(direct >= -1e-14);
  }
}

TEST_CASE("conserved differential identity holds at the RHS level") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    const auto p = random_params(rng, n);
    const auto s = random_state(rng, n);
    const auto d = tk_rhs(s, p);
    double sum = 0.0;
    for (int a = 0; a < n; ++a) {
      sum += d.dtemps[a] *
             (1.0 + p.eta * p.eta * s.temps[a] / (p.t_star * p.t_star));
    }
    CHECK(std::abs(sum) <= 1e-13);
  }
}

TEST_CASE("observables on frozen inputs") {
  auto p = two_osc();
  SUBCASE("coherent state") {
    EnsembleState s;
    s.phases = Vec::Zero(3);
    s.temps = Vec::Ones(3);
    auto p3 = ModelParams::uniform(3);
    const auto o = observables(s, p3);
    CHECK(o.order_parameter == doctest::Approx(1.0));
    CHECK(o.phase_diameter == 0.0);
  }
  SUBCASE("antipodal pair") {
    const auto s = state2(0.0, M_PI, 1.0, 1.0);
    const auto o = observables(s, p);
    CHECK(o.order_parameter == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("conserved functional") {
    const auto s = state2(0.0, 0.0, 1.0, 3.0);
    const auto o = observables(s, p);
    CHECK(o.conserved_g == doctest::Approx(9.0).epsilon(1e-15));
  }
}

TEST_CASE("asymptotic_temperature closed form") {
  SUBCASE("uniform temps are a fixed point") {
    Vec t = Vec::Constant(4, 1.7);
    CHECK(asymptotic_temperature(t, 0.8, 1.1) ==
          doctest::Approx(1.7).epsilon(1e-14));
  }
  SUBCASE("eta = 0 reduces to the mean") {
    Vec t(3);
    t << 1.0, 2.0, 6.0;
    CHECK(asymptotic_temperature(t, 0.0, 1.0) == doctest::Approx(3.0));
  }
  SUBCASE("mean functional value 2 gives sqrt(5) - 1") {
    // T + T^2/2 = 2 for each entry: T_in solves it already.
    const double root = std::sqrt(5.0) - 1.0;
    Vec t = Vec::Constant(2, root);
    CHECK(asymptotic_temperature(t, 1.0, 1.0) ==
          doctest::Approx(root).epsilon(1e-14));
    // Mixed temps with the same mean functional value reach the same root.
    Vec mixed(2);
    mixed << 1.0, 1.4494897427831781;  // (1 + 0.5) + (t + t^2/2) = 4
    CHECK(asymptotic_temperature(mixed, 1.0, 1.0) ==
          doctest::Approx(root).epsilon(1e-10));
  }
}

TEST_CASE("asymptotic_temperature is permutation invariant and monotone") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> tp(0.3, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 5;
    Vec t(n);
    for (int i = 0; i < n; ++i) t[i] = tp(rng);
    Vec shuffled = t;
    std::shuffle(shuffled.data(), shuffled.data() + n, rng);
    const double base = asymptotic_temperature(t, 0.9, 1.2);
    CHECK(asymptotic_temperature(shuffled, 0.9, 1.2) ==
          doctest::Approx(base).epsilon(1e-14));
    Vec bumped = t;
    bumped[trial % n] += 0.25;
    CHECK(asymptotic_temperature(bumped, 0.9, 1.2) > base);
  }
}

TEST_CASE("phase component is invariant under constant rotation") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 6;
    const auto p = random_params(rng, n);
    auto s = random_state(rng, n);
    const auto d0 = tk_rhs(s, p);
    s.phases.array() += 1.234;
    const auto d1 = tk_rhs(s, p);
    CHECK((d0.dphases - d1.dphases).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("parameter validation rejects asymmetric networks") {
  auto p = ModelParams::uniform(3);
  p.psi(0, 1) = 2.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("min/max accessors range over all entries including the diagonal") {
  auto p = ModelParams::uniform(3);
  p.psi(1, 1) = 0.25;  // diagonal entry below every off-diagonal one
  CHECK(p.psi_min() == 0.25);
  CHECK(p.psi_max() == 1.0);
}
