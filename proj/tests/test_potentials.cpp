#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dgames/potentials.hpp"

using namespace dgames;

namespace {

std::vector<double> make_grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (double s = lo; s <= hi + 0.5 * step; s += step) g.push_back(s);
  return g;
}

// Independent enumeration of 2 * P(Binomial(T+1, 1/2) <= (T-R)/2): walk all
// sign masks of length T+1 and count those with few enough plus steps.
ExactFraction minimax_loss_by_enumeration(int T, int R) {
  const int n = T + 1;
  const int jmax = (T - R) / 2;
  long long count = 0;
  for (long long mask = 0; mask < (1LL << n); ++mask) {
    if (__builtin_popcountll(static_cast<unsigned long long>(mask)) <= jmax) ++count;
  }
  ExactFraction out;
  out.numerator = count;
  out.denominator = BigInt(1) << T;
  return out;
}

// Walk enumeration oracle for the boost-by-majority potential, beta = 0.
double bbm_by_enumeration(int k, double s, double R) {
  long long hits = 0;
  for (long long mask = 0; mask < (1LL << k); ++mask) {
    int pos = 0;
    for (int j = 0; j < k; ++j) pos += (mask >> j) & 1 ? 1 : -1;
    if (s + pos <= -R) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(1LL << k);
}

}  // namespace

TEST_CASE("neg_part truncation") {
  CHECK(neg_part(-2.5) == -2.5);
  CHECK(neg_part(0.0) == 0.0);
  CHECK(neg_part(3.0) == 0.0);
}

TEST_CASE("eval_potential spot values") {
  CHECK(eval_potential(TwoNormPotential{1.0}, {3, 3}, -2.0) == Catch::Approx(4.0).margin(1e-15));
  CHECK(eval_potential(ExpPotential{1.0, 0.0}, {7, 7}, 0.0) == Catch::Approx(1.0).margin(1e-15));
  // b_T = 1 by the empty sum, then exp(9/3) - 1.
  CHECK(eval_potential(NormalHedgeDTPotential{1.0, 3.0}, {1, 1}, -3.0) ==
        Catch::Approx(19.085536923187668).epsilon(1e-12));
}

TEST_CASE("eval_potential argument validation") {
  CHECK_THROWS_AS(eval_potential(TwoNormPotential{1.0}, {3, 4}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(eval_potential(TwoNormPotential{1.0}, {3, -1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(eval_potential(ExpPotential{-1.0, 0.0}, {3, 3}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(eval_potential(TwoNormPotential{0.0}, {3, 3}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(eval_potential(BoostByMajorityPotential{1.5}, {3, 3}, 0.0), std::invalid_argument);
}

TEST_CASE("potentials are nonnegative and nonincreasing in s") {
  const auto grid = make_grid(-30.0, 30.0, 0.25);
  const std::vector<PotentialFamily> families = {
      ExpPotential{0.7, 2.0}, TwoNormPotential{0.5}, NormalHedgeDTPotential{2.0, 3.0},
      BoostByMajorityPotential{0.3}};
  for (const auto& family : families) {
    for (int T : {1, 5, 12}) {
      for (int t = 0; t <= T; ++t) {
        double prev = std::numeric_limits<double>::infinity();
        for (double s : grid) {
          const double v = eval_potential(family, {T, t}, s);
          REQUIRE(v >= 0.0);
          REQUIRE(v <= prev + 1e-12 * std::max(1.0, std::fabs(prev)));
          prev = v;
        }
      }
    }
  }
}

TEST_CASE("b_coefficient values and monotonicity") {
  CHECK(b_coefficient(5, 5, 3.0) == 1.0);
  CHECK(b_coefficient(17, 17, 3.0) == 1.0);
  // 1 - (e^{2/3} - 1)/2 and 1 - (e^{4/3} - 1)/2, frozen from scalar evaluation.
  CHECK(b_coefficient(1, 2, 3.0) == Catch::Approx(0.5261329794726621).epsilon(1e-14));
  CHECK(b_coefficient(0, 1, 3.0) == Catch::Approx(-0.3968339473415887).epsilon(1e-14));
  CHECK_THROWS_AS(b_coefficient(-1, 4, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(b_coefficient(5, 4, 3.0), std::invalid_argument);

  for (int T : {1, 7, 60}) {
    double prev = -std::numeric_limits<double>::infinity();
    for (int t = 0; t <= T; ++t) {
      const double bt = b_coefficient(t, T, 3.0);
      REQUIRE(bt >= prev);  // b_{t-1} <= b_t
      prev = bt;
    }
    REQUIRE(b_coefficient(T, T, 3.0) == 1.0);
  }

  const auto series = build_b_series(60, 3.0);
  for (int t = 0; t <= 60; ++t)
    CHECK(static_cast<double>(series.b[t]) == Catch::Approx(b_coefficient(t, 60, 3.0)).margin(1e-12));
}

TEST_CASE("two-step inequality holds for 2-norm") {
  const auto grid = make_grid(-5.0, 5.0, 0.01);
  const auto report = check_two_step_inequality(TwoNormPotential{1.0}, {10, 5}, grid, 1e-9);
  CHECK(report.ok());
}

TEST_CASE("two-step inequality holds for NormalHedge.DT with d = 3") {
  const auto grid = make_grid(-20.0, 20.0, 0.05);
  for (int t = 2; t <= 50; ++t) {
    const auto report = check_two_step_inequality(NormalHedgeDTPotential{1.0, 3.0}, {50, t}, grid, 1e-9);
    INFO("t = " << t);
    CHECK(report.ok());
  }
  // t = 1 runs the anchor check only.
  const auto anchor = check_two_step_inequality(NormalHedgeDTPotential{1.0, 3.0}, {50, 1}, grid, 1e-9);
  CHECK(anchor.ok());
}

TEST_CASE("two-step inequality fails for NormalHedge.DT with d = 1") {
  // Pinned counterexample located by grid search: t = 50, s near -4.6
  // (violations grow further left; the inequality needs d >= 3).
  const auto grid = make_grid(-6.0, -3.0, 0.01);
  const auto report = check_two_step_inequality(NormalHedgeDTPotential{1.0, 1.0}, {50, 50}, grid, 1e-9);
  REQUIRE_FALSE(report.ok());
  bool found_near = false;
  for (const auto& v : report.violations)
    if (std::fabs(v.s - (-4.6)) < 0.5) found_near = true;
  CHECK(found_near);
}

TEST_CASE("EXP recurrence holds with equality") {
  const auto grid = make_grid(-20.0, 20.0, 0.1);
  for (int t : {1, 3, 10}) {
    const PotentialContext ctx{10, t};
    const ExpPotential exp_family{0.8, 1.5};
    for (double s : grid) {
      const double lhs = eval_potential(exp_family, ctx, s - 1.0) + eval_potential(exp_family, ctx, s + 1.0);
      const double rhs = 2.0 * eval_potential(exp_family, {10, t - 1}, s);
      REQUIRE(std::fabs(lhs - rhs) <= 1e-12 * std::max(std::fabs(lhs), std::fabs(rhs)));
    }
  }
}

TEST_CASE("regret_bound closed forms") {
  CHECK(regret_bound(TwoNormPotential{1.0}, 100, 0.04) == Catch::Approx(50.0).epsilon(1e-12));
  CHECK(regret_bound(ExpPotential{1.0, 0.0}, 5000, 0.01) ==
        Catch::Approx(214.59660262893473).epsilon(1e-12));
  CHECK(regret_bound(NormalHedgeDTPotential{1.0, 3.0}, 1000, 0.1) ==
        Catch::Approx(118.91572298463258).epsilon(1e-12));
  CHECK_THROWS_AS(regret_bound(BoostByMajorityPotential{0.5}, 10, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(regret_bound(TwoNormPotential{1.0}, 0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(regret_bound(TwoNormPotential{1.0}, 10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(regret_bound(TwoNormPotential{1.0}, 10, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(regret_bound(NormalHedgeDTPotential{1.0, 1.0}, 10, 0.1), std::invalid_argument);
}

TEST_CASE("relaxed_minimax_loss exact values") {
  auto half = relaxed_minimax_loss(1, 1);
  CHECK(half.numerator == 1);
  CHECK(half.denominator == 2);
  auto five_eighths = relaxed_minimax_loss(3, 1);
  CHECK(five_eighths.numerator == 5);
  CHECK(five_eighths.denominator == 8);
  auto one_eighth = relaxed_minimax_loss(3, 3);
  CHECK(one_eighth.numerator == 1);
  CHECK(one_eighth.denominator == 8);
  CHECK_THROWS_AS(relaxed_minimax_loss(4, 1), std::invalid_argument);  // parity mismatch
  CHECK_THROWS_AS(relaxed_minimax_loss(3, 5), std::invalid_argument);
}

TEST_CASE("relaxed_minimax_loss agrees with mask enumeration") {
  for (int T : {1, 2, 3, 6, 9, 14}) {
    for (int R = T % 2; R <= T; R += 2) {
      const auto exact = relaxed_minimax_loss(T, R);
      const auto brute = minimax_loss_by_enumeration(T, R);
      INFO("T=" << T << " R=" << R);
      CHECK(exact.numerator * brute.denominator == brute.numerator * exact.denominator);
    }
  }
}

TEST_CASE("relaxed_minimax_loss within Hoeffding envelope up to T = 200") {
  for (int T = 1; T <= 200; ++T) {
    for (int R = T % 2; R <= T; R += 2) {
      const double v = relaxed_minimax_loss(T, R).as_double();
      const double hoeffding = 2.0 * std::exp(-std::pow(R + 1.0, 2) / (2.0 * (T + 1.0)));
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0 + 1e-15);
      REQUIRE(v <= hoeffding * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("relaxed_minimax_loss log-space path matches exact path") {
  for (int T : {50, 120, 200, 400}) {
    for (int R : {T % 2, T / 2 + (T / 2 + T) % 2, T}) {
      if ((T - R) % 2 != 0 || R < 0 || R > T) continue;
      const double exact = relaxed_minimax_loss(T, R).as_double();
      const double logspace = relaxed_minimax_loss_log(T, R);
      CHECK(logspace == Catch::Approx(exact).epsilon(1e-10).margin(1e-300));
    }
  }
}

TEST_CASE("bbm_potential spot values") {
  CHECK(bbm_potential(0.0, {2, 0}, 0.0, 0.0) == Catch::Approx(0.75).margin(1e-15));
  for (int k : {1, 3, 6}) CHECK(bbm_potential(1.0, {k, 0}, 0.0, 0.0) == 0.0);
  for (double beta : {0.0, 0.4, 1.0}) CHECK(bbm_potential(beta, {9, 9}, -1.0, 0.0) == 1.0);
}

TEST_CASE("bbm_potential agrees with walk enumeration") {
  for (int k : {1, 2, 5, 9, 12}) {
    for (double s : {-3.0, -0.5, 0.0, 1.0}) {
      for (double R : {0.0, 1.0, 2.5}) {
        const double expect = bbm_by_enumeration(k, s, R);
        const double got = bbm_potential(0.0, {k, 0}, s, R);
        INFO("k=" << k << " s=" << s << " R=" << R);
        CHECK(got == Catch::Approx(expect).margin(1e-12));
      }
    }
  }
}

TEST_CASE("bbm_potential satisfies its own recursion") {
  const double beta = 0.35;
  for (int T : {6, 11}) {
    for (int t = 0; t < T; ++t) {
      for (double s : {-2.0, -0.25, 0.0, 1.5}) {
        const double lhs = bbm_potential(beta, {T, t}, s, 1.0);
        const double rhs = 0.5 * (1.0 + beta) * bbm_potential(beta, {T, t + 1}, s + 1.0, 1.0) +
                           0.5 * (1.0 - beta) * bbm_potential(beta, {T, t + 1}, s - 1.0, 1.0);
        REQUIRE(lhs == Catch::Approx(rhs).margin(1e-12));
      }
    }
  }
}
