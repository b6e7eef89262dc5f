#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dgames/bandit.hpp"
#include "dgames/drift_sim.hpp"
#include "dgames/hedge.hpp"
#include "dgames/potentials.hpp"

namespace dgames {

struct VerifyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::vector<double> verification_grid(double lo = -50.0, double hi = 50.0, double step = 0.01) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>((hi - lo) / step) + 2);
  const long long steps = static_cast<long long>(std::llround((hi - lo) / step));
  for (long long k = 0; k <= steps; ++k) grid.push_back(lo + k * step);
  return grid;
}

// Two-step inequality for the 2-norm potential over every 1 <= t <= T <= T_max
// on the dense grid, then a coarser pass over the full reachable span
// [-max(3T,50), max(3T,50)] (positions never leave [-t, t], so that range
// makes grid coverage sound).
inline VerifyResult verify_two_step_two_norm(int T_max = 200, double tol = 1e-9) {
  const auto grid = verification_grid();
  const PotentialFamily family{TwoNormPotential{1.0}};
  long long points = 0;
  for (int T = 1; T <= T_max; ++T) {
    for (int t = 1; t <= T; ++t) {
      const auto report = check_two_step_inequality(family, {T, t}, grid, tol);
      points += static_cast<long long>(grid.size());
      if (!report.ok()) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "violated at T=%d t=%d s=%.4f lhs=%.12g rhs=%.12g", T, t,
                      report.violations[0].s, report.violations[0].lhs, report.violations[0].rhs);
        return {"two-step inequality, 2-norm", false, buf};
      }
    }
  }
  const double span = std::max(3.0 * T_max, 50.0);
  const auto wide = verification_grid(-span, span, 0.05);
  for (int t : {1, T_max / 4, T_max / 2, T_max}) {
    const auto report = check_two_step_inequality(family, {T_max, std::max(t, 1)}, wide, tol);
    points += static_cast<long long>(wide.size());
    if (!report.ok()) return {"two-step inequality, 2-norm", false, "violated on the wide grid"};
  }
  return {"two-step inequality, 2-norm", true,
          "t in [1,T], T in [1," + std::to_string(T_max) + "], " + std::to_string(points) + " grid points"};
}

// Two-step inequality for NormalHedge.DT (d = 3) for t in [2, T] plus the
// t = 1 anchor point, on the dense grid and the wide reachable span.
inline VerifyResult verify_two_step_normalhedge_dt(int T = 200, double tol = 1e-9) {
  const auto grid = verification_grid();
  const double span = std::max(3.0 * T, 50.0);
  const auto wide = verification_grid(-span, span, 0.05);
  const PotentialFamily family{NormalHedgeDTPotential{1.0, 3.0}};
  for (int t = 1; t <= T; ++t) {
    for (const auto* pass : {&grid, &wide}) {
      const auto report = check_two_step_inequality(family, {T, t}, *pass, tol);
      if (!report.ok()) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "violated at t=%d s=%.4f lhs=%.12g rhs=%.12g", t,
                      report.violations[0].s, report.violations[0].lhs, report.violations[0].rhs);
        return {"two-step inequality, NormalHedge.DT d=3", false, buf};
      }
    }
  }
  return {"two-step inequality, NormalHedge.DT d=3", true,
          "t in [2," + std::to_string(T) + "] on the dense and wide grids, plus the t=1 anchor"};
}

// The EXP family satisfies the recurrence with equality.
inline VerifyResult verify_exp_equality(double tol = 1e-12) {
  const auto grid = verification_grid();
  for (double eta : {0.5, 1.0}) {
    const ExpPotential family{eta, 0.0};
    for (int T : {1, 5, 25, 100, 200}) {
      for (int t = 1; t <= T; ++t) {
        const PotentialContext ctx{T, t};
        const PotentialContext prev{T, t - 1};
        for (double s : grid) {
          const long double lhs = detail::eval_potential_ld(PotentialFamily{family}, ctx, s - 1.0) +
                                  detail::eval_potential_ld(PotentialFamily{family}, ctx, s + 1.0);
          const long double rhs = 2.0L * detail::eval_potential_ld(PotentialFamily{family}, prev, s);
          if (std::fabs(static_cast<double>(lhs - rhs)) >
              tol * std::max(std::fabs(static_cast<double>(lhs)), std::fabs(static_cast<double>(rhs)))) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "eta=%.2f T=%d t=%d s=%.4f lhs=%.15g rhs=%.15g", eta, T, t, s,
                          static_cast<double>(lhs), static_cast<double>(rhs));
            return {"EXP recurrence equality", false, buf};
          }
        }
      }
    }
  }
  return {"EXP recurrence equality", true, "relative 1e-12 over the grid"};
}

// The bandit-side recurrence for the EXP3 potential holds with equality.
inline VerifyResult verify_exp3_recurrence(double tol = 1e-10) {
  for (double eta : {0.1, 0.5, 1.0}) {
    for (int N : {2, 10, 64}) {
      const double alpha = exp3_alpha(eta);
      for (int T : {1, 20, 100}) {
        for (int t = 1; t <= T; ++t) {
          for (double s = -50.0; s <= 50.0; s += 0.01) {
            const double lhs = (0.5 + N * alpha) * exp3_potential(eta, N, {T, t}, s - 1.0) +
                               (0.5 - N * alpha) * exp3_potential(eta, N, {T, t}, s + 1.0);
            const double rhs = exp3_potential(eta, N, {T, t - 1}, s);
            if (std::fabs(lhs - rhs) > tol * std::max(std::fabs(lhs), std::fabs(rhs))) {
              char buf[160];
              std::snprintf(buf, sizeof(buf), "eta=%.2f N=%d T=%d t=%d s=%.4f", eta, N, T, t, s);
              return {"EXP3 potential recurrence equality", false, buf};
            }
          }
        }
      }
    }
  }
  return {"EXP3 potential recurrence equality", true, "relative 1e-10"};
}

// Closed-form alpha_t against direct numerical maximization of
// (1/2) Phi''(s-1) / (Phi(s-1) - Phi(s+1)) over a dense grid.
inline VerifyResult verify_alpha_closed_form(double tol = 1e-6) {
  for (double eta : {0.1, 0.3, 0.7, 1.0}) {
    const int N = 10, T = 30, t = 11;
    const double h = 1e-3;
    double best = 0.0;
    for (double s = -25.0; s <= 25.0; s += 0.02) {
      const auto phi = [&](double x) { return exp3_potential(eta, N, {T, t}, x); };
      const double second = (phi(s - 1.0 - h) - 2.0 * phi(s - 1.0) + phi(s - 1.0 + h)) / (h * h);
      best = std::max(best, 0.5 * second / (phi(s - 1.0) - phi(s + 1.0)));
    }
    const double closed = exp3_alpha(eta);
    if (std::fabs(best - closed) > tol * closed) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "eta=%.2f numeric=%.10g closed=%.10g", eta, best, closed);
      return {"alpha_t closed form vs numerical maximization", false, buf};
    }
  }
  return {"alpha_t closed form vs numerical maximization", true, "relative 1e-6"};
}

inline std::vector<VerifyResult> verify_potentials_suite() {
  return {verify_two_step_two_norm(), verify_two_step_normalhedge_dt(), verify_exp_equality(),
          verify_exp3_recurrence(), verify_alpha_closed_form()};
}

// Quick conversion sanity suite for the CLI.
inline std::vector<VerifyResult> verify_conversions_suite() {
  std::vector<VerifyResult> results;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const HedgeRule rule{PotentialFamily{NormalHedgeDTPotential{}}};
    const HedgeStrategy direct = potential_hedge_strategy(rule, 4);
    const HedgeStrategy round_trip = player_to_hedge(hedge_to_player(direct));
    SplitMix64 g(seed);
    std::vector<LossVector> history;
    for (int t = 0; t < 16; ++t) {
      const auto a = direct(history);
      const auto b = round_trip(history);
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
      LossVector loss(4);
      for (double& l : loss) l = g.next_double();
      history.push_back(std::move(loss));
    }
  }
  char buf[80];
  std::snprintf(buf, sizeof(buf), "max weight deviation %.3g", worst);
  results.push_back({"hedge -> game -> hedge round trip", worst <= 1e-12, buf});
  return results;
}

}  // namespace dgames
