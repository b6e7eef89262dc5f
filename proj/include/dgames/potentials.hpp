#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace dgames {

// Truncation [s]_- = min(0, s). Every potential below is built from it; keep
// this as the single definition.
inline double neg_part(double s) { return s < 0.0 ? s : 0.0; }
inline long double neg_part_ld(long double s) { return s < 0.0L ? s : 0.0L; }

// ---------------------------------------------------------------------------
// Potential families
// ---------------------------------------------------------------------------

// Terminal surrogate exp(-eta (s + R)); shift_R cancels under normalization
// and only matters when potential values themselves are inspected.
struct ExpPotential {
  double eta = 1.0;
  double shift_R = 0.0;
};

// Terminal surrogate a [s]_-^2.
struct TwoNormPotential {
  double a = 1.0;
};

// Terminal surrogate a (exp([s]_-^2 / dT) - 1). The two-step inequality is
// only guaranteed for d >= 3; smaller d is accepted for evaluation so the
// failure mode can be demonstrated, but algorithm entry points reject it.
struct NormalHedgeDTPotential {
  double a = 1.0;
  double d = 3.0;
};

// Exact 0-1 loss 1{s <= -R} run through the biased backward recursion.
struct BoostByMajorityPotential {
  double beta = 0.0;
};

using PotentialFamily =
    std::variant<ExpPotential, TwoNormPotential, NormalHedgeDTPotential, BoostByMajorityPotential>;

struct PotentialContext {
  int horizon_T = 0;
  int round_t = 0;
};

inline void validate_context(const PotentialContext& ctx) {
  if (ctx.horizon_T < 0 || ctx.round_t < 0 || ctx.round_t > ctx.horizon_T)
    throw std::invalid_argument("potential context: need 0 <= t <= T");
}

// Parameter checks shared by evaluation paths. `for_algorithm` additionally
// enforces d >= 3, the regime in which the NormalHedge.DT guarantees hold.
inline void validate_family(const PotentialFamily& family, bool for_algorithm = false) {
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ExpPotential>) {
          if (!(f.eta > 0.0)) throw std::invalid_argument("ExpPotential: eta must be positive");
        } else if constexpr (std::is_same_v<F, TwoNormPotential>) {
          if (!(f.a > 0.0)) throw std::invalid_argument("TwoNormPotential: a must be positive");
        } else if constexpr (std::is_same_v<F, NormalHedgeDTPotential>) {
          if (!(f.a > 0.0)) throw std::invalid_argument("NormalHedgeDT: a must be positive");
          if (!(f.d > 0.0)) throw std::invalid_argument("NormalHedgeDT: d must be positive");
          if (for_algorithm && !(f.d >= 3.0))
            throw std::invalid_argument("NormalHedgeDT: guarantees require d >= 3");
        } else {
          if (!(f.beta >= 0.0 && f.beta <= 1.0))
            throw std::invalid_argument("BoostByMajority: beta must lie in [0,1]");
        }
      },
      family);
}

// ---------------------------------------------------------------------------
// b_t coefficients for NormalHedge.DT: b_t = 1 - (1/2) sum_{tau=t+1}^T (e^{4/(d tau)} - 1)
// ---------------------------------------------------------------------------

inline double b_coefficient(int t, int T, double d) {
  if (t < 0 || t > T) throw std::invalid_argument("b_coefficient: need 0 <= t <= T");
  if (!(d > 0.0)) throw std::invalid_argument("b_coefficient: d must be positive");
  double acc = 0.0;
  for (int tau = t + 1; tau <= T; ++tau) acc += std::expm1(4.0 / (d * tau));
  return 1.0 - 0.5 * acc;
}

// Full series b_0..b_T in one pass; used by traces and grid checks where
// per-call O(T) evaluation would dominate.
struct BSeries {
  int horizon_T = 0;
  double d = 3.0;
  std::vector<long double> b;  // index t
};

inline BSeries build_b_series(int T, double d) {
  if (T < 0) throw std::invalid_argument("build_b_series: T must be nonnegative");
  if (!(d > 0.0)) throw std::invalid_argument("build_b_series: d must be positive");
  BSeries out;
  out.horizon_T = T;
  out.d = d;
  out.b.assign(static_cast<std::size_t>(T) + 1, 1.0L);
  for (int t = T - 1; t >= 0; --t)
    out.b[t] = out.b[t + 1] - 0.5L * std::expm1(4.0L / (static_cast<long double>(d) * (t + 1)));
  return out;
}

// ---------------------------------------------------------------------------
// Boost-by-majority potential: probability that a beta-biased +-1 walk of
// length T - t started at s ends at or below -R. Computed by the backward
// recursion Phi_t(s) = (1+beta)/2 Phi_{t+1}(s+1) + (1-beta)/2 Phi_{t+1}(s-1).
// ---------------------------------------------------------------------------

inline double bbm_potential(double beta, const PotentialContext& ctx, double s, double loss_threshold_R) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("bbm_potential: beta must lie in [0,1]");
  validate_context(ctx);
  const int k = ctx.horizon_T - ctx.round_t;
  const double q_up = 0.5 * (1.0 + beta);
  // Offsets from s after j of k steps live in {-j..j}; fold the terminal
  // indicator backward one level at a time.
  std::vector<double> level(static_cast<std::size_t>(2 * k) + 1);
  for (int m = -k; m <= k; ++m)
    level[static_cast<std::size_t>(m + k)] = (s + m <= -loss_threshold_R) ? 1.0 : 0.0;
  std::vector<double> next(level.size());
  for (int j = k - 1; j >= 0; --j) {
    for (int m = -j; m <= j; ++m) {
      const std::size_t idx = static_cast<std::size_t>(m + k);
      next[idx] = q_up * level[idx + 1] + (1.0 - q_up) * level[idx - 1];
    }
    level.swap(next);
  }
  return level[static_cast<std::size_t>(k)];
}

// ---------------------------------------------------------------------------
// Potential evaluation
// ---------------------------------------------------------------------------

namespace detail {

// Long-double evaluation used by the grid checkers: NormalHedge.DT values at
// small t and deep s exceed double range (e.g. e^{2500/3}) but fit x87
// extended precision. `series`, when given, must match (T, d).
inline long double eval_potential_ld(const PotentialFamily& family, const PotentialContext& ctx,
                                     long double s, const BSeries* series = nullptr) {
  validate_family(family);
  validate_context(ctx);
  const int T = ctx.horizon_T;
  const int t = ctx.round_t;
  if (const auto* f = std::get_if<ExpPotential>(&family)) {
    const long double c = 0.5L * (std::exp(static_cast<long double>(f->eta)) +
                                  std::exp(-static_cast<long double>(f->eta)));
    return std::pow(c, static_cast<long double>(T - t)) * std::exp(-f->eta * (s + f->shift_R));
  }
  if (const auto* f = std::get_if<TwoNormPotential>(&family)) {
    const long double n = neg_part_ld(s);
    return f->a * (n * n + (T - t));
  }
  if (const auto* f = std::get_if<NormalHedgeDTPotential>(&family)) {
    long double bt;
    if (series != nullptr) {
      if (series->horizon_T != T || series->d != f->d)
        throw std::invalid_argument("eval_potential: b-series mismatch");
      bt = series->b[static_cast<std::size_t>(t)];
    } else {
      bt = static_cast<long double>(b_coefficient(t, T, f->d));
    }
    if (t == 0) return f->a * (1.0L - bt);  // Phi_0(s) is the constant a(1 - b_0)
    const long double n = neg_part_ld(s);
    return f->a * (std::exp(n * n / (f->d * t)) - bt);
  }
  const auto& f = std::get<BoostByMajorityPotential>(family);
  return bbm_potential(f.beta, ctx, static_cast<double>(s), 0.0);
}

}  // namespace detail

// Time-indexed potential value Phi_t(s) at horizon T. For BoostByMajority the
// threshold is fixed at R = 0 (the plain 1{s <= 0} game); use bbm_potential
// directly for other thresholds.
inline double eval_potential(const PotentialFamily& family, const PotentialContext& ctx, double s) {
  return static_cast<double>(detail::eval_potential_ld(family, ctx, s));
}

// ---------------------------------------------------------------------------
// Two-step inequality check: Phi_t(s-1) + Phi_t(s+1) <= 2 Phi_{t-1}(s)
// ---------------------------------------------------------------------------

struct GridViolation {
  double s = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct TwoStepReport {
  std::vector<GridViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks the inequality at ctx.round_t over the grid, with slack
// tol * max(1, |lhs|, |rhs|). For NormalHedge.DT at t = 1 only the anchor
// point Phi_1(-1) + Phi_1(1) <= 2 Phi_0(0) is certified, so that single check
// is performed and the grid is ignored.
inline TwoStepReport check_two_step_inequality(const PotentialFamily& family, const PotentialContext& ctx,
                                               std::span<const double> s_grid, double tolerance) {
  validate_family(family);
  validate_context(ctx);
  if (ctx.round_t < 1) throw std::invalid_argument("check_two_step_inequality: need t >= 1");
  TwoStepReport report;
  const PotentialContext prev{ctx.horizon_T, ctx.round_t - 1};

  const bool nhdt = std::holds_alternative<NormalHedgeDTPotential>(family);
  BSeries series;
  const BSeries* series_ptr = nullptr;
  if (nhdt) {
    series = build_b_series(ctx.horizon_T, std::get<NormalHedgeDTPotential>(family).d);
    series_ptr = &series;
  }

  auto check_point = [&](long double s) {
    const long double lhs = detail::eval_potential_ld(family, ctx, s - 1.0L, series_ptr) +
                            detail::eval_potential_ld(family, ctx, s + 1.0L, series_ptr);
    const long double rhs = 2.0L * detail::eval_potential_ld(family, prev, s, series_ptr);
    const long double slack =
        tolerance * std::max(1.0L, std::max(std::fabs(lhs), std::fabs(rhs)));
    if (lhs > rhs + slack)
      report.violations.push_back({static_cast<double>(s), static_cast<double>(lhs), static_cast<double>(rhs)});
  };

  if (nhdt && ctx.round_t == 1) {
    check_point(0.0L);
    return report;
  }
  for (double s : s_grid) check_point(s);
  return report;
}

// ---------------------------------------------------------------------------
// Closed-form epsilon-regret bounds
// ---------------------------------------------------------------------------

inline double regret_bound(const PotentialFamily& family, int T, double epsilon) {
  validate_family(family, /*for_algorithm=*/true);
  if (T < 1) throw std::invalid_argument("regret_bound: T must be >= 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("regret_bound: epsilon must lie in (0,1]");
  if (std::holds_alternative<ExpPotential>(family)) return std::sqrt(2.0 * T * std::log(1.0 / epsilon));
  if (std::holds_alternative<TwoNormPotential>(family)) return std::sqrt(T / epsilon);
  if (const auto* f = std::get_if<NormalHedgeDTPotential>(&family)) {
    const double grow = std::expm1(4.0 / f->d) * (std::log(static_cast<double>(T)) + 1.0);
    return std::sqrt(f->d * T * std::log(grow / (2.0 * epsilon) + 1.0));
  }
  throw std::invalid_argument("regret_bound: no Hedge bound for boost-by-majority");
}

// ---------------------------------------------------------------------------
// Relaxed minimax loss of the R-threshold game:
//   (1/2^T) * sum_{j=0}^{(T-R)/2} C(T+1, j), kept exact.
// ---------------------------------------------------------------------------

using BigInt = boost::multiprecision::cpp_int;

struct ExactFraction {
  BigInt numerator;
  BigInt denominator;

  double as_double() const {
    using Big = boost::multiprecision::cpp_bin_float_100;
    return static_cast<double>(Big(numerator) / Big(denominator));
  }
};

inline ExactFraction relaxed_minimax_loss(int T, int R) {
  if (T < 0 || R < 0 || R > T) throw std::invalid_argument("relaxed_minimax_loss: need 0 <= R <= T");
  if ((T - R) % 2 != 0)
    throw std::invalid_argument("relaxed_minimax_loss: T and R must have the same parity");
  const int jmax = (T - R) / 2;
  BigInt sum = 0;
  BigInt binom = 1;  // C(T+1, 0)
  for (int j = 0; j <= jmax; ++j) {
    sum += binom;
    binom = binom * (T + 1 - j) / (j + 1);
  }
  ExactFraction out;
  out.numerator = sum;
  out.denominator = BigInt(1) << T;
  return out;
}

// Log-space evaluation for horizons where converting the exact fraction is
// not wanted; agrees with relaxed_minimax_loss(...).as_double() to ~1e-12.
inline double relaxed_minimax_loss_log(int T, int R) {
  if (T < 0 || R < 0 || R > T) throw std::invalid_argument("relaxed_minimax_loss: need 0 <= R <= T");
  if ((T - R) % 2 != 0)
    throw std::invalid_argument("relaxed_minimax_loss: T and R must have the same parity");
  const int jmax = (T - R) / 2;
  // log C(T+1, j) via lgamma, combined with log-sum-exp.
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(static_cast<std::size_t>(jmax) + 1);
  for (int j = 0; j <= jmax; ++j) {
    logs[j] = std::lgamma(T + 2.0) - std::lgamma(j + 1.0) - std::lgamma(T + 2.0 - j);
    max_term = std::max(max_term, logs[j]);
  }
  double acc = 0.0;
  for (double lg : logs) acc += std::exp(lg - max_term);
  return std::exp(max_term + std::log(acc) - T * std::log(2.0));
}

}  // namespace dgames
