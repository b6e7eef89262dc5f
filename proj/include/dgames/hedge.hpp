#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dgames/potentials.hpp"

namespace dgames {

using WeightVector = std::vector<double>;
using LossVector = std::vector<double>;

inline bool is_distribution(std::span<const double> p, double tol = 1e-9) {
  double sum = 0.0;
  for (double w : p) {
    if (!(w >= 0.0)) return false;
    sum += w;
  }
  return std::fabs(sum - 1.0) <= tol;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline void validate_loss_vector(std::span<const double> loss) {
  for (double l : loss)
    if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("loss entries must lie in [0,1]");
}

// Cumulative drift state s_t. Starts at the origin; round_t counts completed
// rounds.
struct CumulativeState {
  std::vector<double> s;
  int round_t = 0;

  static CumulativeState initial(int num_actions) {
    if (num_actions < 1) throw std::invalid_argument("CumulativeState: need at least one action");
    CumulativeState st;
    st.s.assign(static_cast<std::size_t>(num_actions), 0.0);
    return st;
  }
};

// The original NormalHedge weight rule (numeric search for c each round),
// kept as a baseline next to the potential-derived rules.
struct NormalHedgeRule {};

using HedgeRule = std::variant<PotentialFamily, NormalHedgeRule>;

// ---------------------------------------------------------------------------
// The c search for NormalHedge: sum_i exp([s_i]_-^2 / c) = N e.
// Returns nullopt when every s_i >= 0 (the left side is N < Ne for all c);
// callers fall back to uniform weights.
// ---------------------------------------------------------------------------

inline std::optional<double> solve_c(std::span<const double> s) {
  const std::size_t n = s.size();
  if (n == 0) throw std::invalid_argument("solve_c: empty state");
  double max_sq = 0.0;
  for (double si : s) {
    const double np = neg_part(si);
    max_sq = std::max(max_sq, np * np);
  }
  if (max_sq == 0.0) return std::nullopt;

  const double target = static_cast<double>(n) * std::exp(1.0);
  auto lhs = [&](double c) {
    double acc = 0.0;
    for (double si : s) {
      const double np = neg_part(si);
      acc += std::exp(np * np / c);
    }
    return acc;
  };

  // At c = max_sq / ln(Ne) the largest term alone equals Ne, so lhs >= target
  // there; double until the strictly decreasing lhs crosses below.
  double lo = max_sq / std::log(target);
  double hi = 2.0 * lo;
  while (lhs(hi) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-13 * lo; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (lhs(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Weight rules. `state.round_t + 1` is the round about to be played; the
// NormalHedge.DT exponents use that t.
// ---------------------------------------------------------------------------

namespace detail {

inline WeightVector normalize_or_uniform(std::vector<double> unnormalized) {
  double sum = 0.0;
  for (double u : unnormalized) sum += u;
  if (sum <= 0.0) {
    std::fill(unnormalized.begin(), unnormalized.end(), 1.0 / static_cast<double>(unnormalized.size()));
    return unnormalized;
  }
  for (double& u : unnormalized) u /= sum;
  return unnormalized;
}

}  // namespace detail

inline WeightVector hedge_weights(const HedgeRule& rule, const CumulativeState& state) {
  const std::size_t n = state.s.size();
  if (n == 0) throw std::invalid_argument("hedge_weights: empty state");
  std::vector<double> u(n, 0.0);

  if (const auto* family = std::get_if<PotentialFamily>(&rule)) {
    validate_family(*family, /*for_algorithm=*/true);
    if (const auto* f = std::get_if<ExpPotential>(family)) {
      // p_i proportional to exp(-eta s_i); shift by the minimum so the largest
      // exponent is zero (exact under normalization).
      const double smin = *std::min_element(state.s.begin(), state.s.end());
      for (std::size_t i = 0; i < n; ++i) u[i] = std::exp(-f->eta * (state.s[i] - smin));
    } else if (std::holds_alternative<TwoNormPotential>(*family)) {
      for (std::size_t i = 0; i < n; ++i) {
        const double lo = neg_part(state.s[i] - 1.0);
        const double hi = neg_part(state.s[i] + 1.0);
        u[i] = lo * lo - hi * hi;
      }
    } else if (const auto* f = std::get_if<NormalHedgeDTPotential>(family)) {
      const double c = f->d * (state.round_t + 1);
      double max_a = 0.0;
      std::vector<double> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double lo = neg_part(state.s[i] - 1.0);
        const double hi = neg_part(state.s[i] + 1.0);
        a[i] = lo * lo / c;
        b[i] = hi * hi / c;
        max_a = std::max(max_a, a[i]);
      }
      // a_i >= b_i always; entries with s_i >= 1 have a_i = b_i = 0 and end up
      // with exactly zero weight.
      for (std::size_t i = 0; i < n; ++i) u[i] = std::exp(a[i] - max_a) - std::exp(b[i] - max_a);
    } else {
      throw std::invalid_argument(
          "hedge_weights: boost-by-majority weights need a horizon; use bbm_player");
    }
  } else {
    // NormalHedge baseline: uniform on the first round, uniform when no chip
    // is behind, otherwise the Table-1 rule with the solved c.
    if (state.round_t == 0) {
      std::fill(u.begin(), u.end(), 1.0);
    } else if (auto c = solve_c(state.s)) {
      for (std::size_t i = 0; i < n; ++i) {
        const double np = neg_part(state.s[i]);
        u[i] = -np * std::exp(np * np / *c);
      }
    } else {
      std::fill(u.begin(), u.end(), 1.0);
    }
  }
  return detail::normalize_or_uniform(std::move(u));
}

// ---------------------------------------------------------------------------
// State updates
// ---------------------------------------------------------------------------

// Full-information step: s_i += l_i - p.l.
inline CumulativeState hedge_step(const CumulativeState& state, const LossVector& loss,
                                  const WeightVector& p) {
  if (loss.size() != state.s.size() || p.size() != state.s.size())
    throw std::invalid_argument("hedge_step: dimension mismatch");
  validate_loss_vector(loss);
  const double player_loss = dot(p, loss);
  CumulativeState out = state;
  for (std::size_t i = 0; i < out.s.size(); ++i) out.s[i] += loss[i] - player_loss;
  out.round_t += 1;
  return out;
}

// Randomized step: s_i += l_i - l_{i_t}; the p.z >= 0 constraint holds in
// expectation over the sampled action.
inline CumulativeState randomized_hedge_step(const CumulativeState& state, const LossVector& loss,
                                             int sampled_action) {
  if (loss.size() != state.s.size()) throw std::invalid_argument("randomized_hedge_step: dimension mismatch");
  if (sampled_action < 0 || sampled_action >= static_cast<int>(state.s.size()))
    throw std::invalid_argument("randomized_hedge_step: action index out of range");
  validate_loss_vector(loss);
  const double pivot = loss[static_cast<std::size_t>(sampled_action)];
  CumulativeState out = state;
  for (std::size_t i = 0; i < out.s.size(); ++i) out.s[i] += loss[i] - pivot;
  out.round_t += 1;
  return out;
}

// ---------------------------------------------------------------------------
// epsilon-regret
// ---------------------------------------------------------------------------

// Exact decimal fraction, for ceil(N * eps) at boundaries like eps = k/N where
// binary doubles round the wrong way.
struct Decimal {
  long long num = 0;
  long long den = 1;
};

inline Decimal parse_decimal(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("parse_decimal: empty string");
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  long long num = 0, den = 1;
  bool any_digit = false, seen_dot = false;
  for (; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (ch == '.') {
      if (seen_dot) throw std::invalid_argument("parse_decimal: two dots in '" + text + "'");
      seen_dot = true;
      continue;
    }
    if (ch < '0' || ch > '9') throw std::invalid_argument("parse_decimal: bad char in '" + text + "'");
    if (num > (std::numeric_limits<long long>::max() - 9) / 10)
      throw std::invalid_argument("parse_decimal: too many digits in '" + text + "'");
    num = num * 10 + (ch - '0');
    if (seen_dot) den *= 10;
    any_digit = true;
  }
  if (!any_digit) throw std::invalid_argument("parse_decimal: no digits in '" + text + "'");
  return {negative ? -num : num, den};
}

inline int ceil_rank(int num_actions, const Decimal& eps) {
  // ceil(N * num / den) with integer arithmetic; caller guarantees eps > 0.
  const long long n = static_cast<long long>(num_actions) * eps.num;
  return static_cast<int>((n + eps.den - 1) / eps.den);
}

inline int ceil_rank(int num_actions, double eps) {
  // Doubles carry decimal eps values inexactly; snap products that sit within
  // 1e-9 of an integer before taking the ceiling.
  const double y = static_cast<double>(num_actions) * eps;
  return static_cast<int>(std::ceil(y - 1e-9));
}

namespace detail {

template <typename Eps>
double epsilon_regret_totals_impl(std::span<const double> totals, double player_total, Eps eps,
                                  double eps_as_double) {
  if (eps_as_double <= 0.0) return std::numeric_limits<double>::infinity();
  if (eps_as_double > 1.0) return -std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(totals.size());
  if (n == 0) throw std::invalid_argument("epsilon_regret: no actions");
  const int rank = std::clamp(ceil_rank(n, eps), 1, n);
  std::vector<int> order(totals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return totals[a] < totals[b]; });
  return player_total - totals[static_cast<std::size_t>(order[rank - 1])];
}

}  // namespace detail

// eps-regret from per-action totals: player total minus the total of the
// ceil(N eps)-th best action (ascending total, ties by original index).
inline double epsilon_regret_totals(std::span<const double> totals, double player_total, double eps) {
  return detail::epsilon_regret_totals_impl(totals, player_total, eps, eps);
}

inline double epsilon_regret_totals(std::span<const double> totals, double player_total,
                                    const Decimal& eps) {
  const double as_double = static_cast<double>(eps.num) / static_cast<double>(eps.den);
  return detail::epsilon_regret_totals_impl(totals, player_total, eps, as_double);
}

template <typename Eps>
double epsilon_regret(const std::vector<LossVector>& loss_matrix,
                      std::span<const double> player_losses, Eps eps) {
  if (loss_matrix.size() != player_losses.size())
    throw std::invalid_argument("epsilon_regret: round-count mismatch");
  std::vector<double> totals;
  for (const auto& row : loss_matrix) {
    if (totals.empty()) totals.assign(row.size(), 0.0);
    if (row.size() != totals.size()) throw std::invalid_argument("epsilon_regret: ragged loss matrix");
    for (std::size_t i = 0; i < row.size(); ++i) totals[i] += row[i];
  }
  if (totals.empty()) throw std::invalid_argument("epsilon_regret: empty loss matrix");
  double player_total = 0.0;
  for (double l : player_losses) player_total += l;
  return epsilon_regret_totals(totals, player_total, eps);
}

// ---------------------------------------------------------------------------
// Full runs
// ---------------------------------------------------------------------------

// Adaptive adversary: sees the player's weights for the round, then emits the
// losses.
using LossStream = std::function<LossVector(int round, const WeightVector& p)>;

struct RunRecord {
  int num_actions = 0;
  std::vector<LossVector> losses;                // per round
  std::vector<WeightVector> weights;             // per round (may be empty if not kept)
  std::vector<double> player_losses;             // per round p_t . l_t
  std::vector<int> zero_weight_counts;           // per round
  std::vector<double> potential_sums;            // index t = 0..T; NaN when no potential applies
  std::vector<std::vector<double>> s_trace;      // index t = 0..T

  int rounds() const { return static_cast<int>(player_losses.size()); }

  std::vector<double> action_totals() const {
    std::vector<double> totals(static_cast<std::size_t>(num_actions), 0.0);
    for (const auto& row : losses)
      for (std::size_t i = 0; i < row.size(); ++i) totals[i] += row[i];
    return totals;
  }

  double player_total() const {
    return std::accumulate(player_losses.begin(), player_losses.end(), 0.0);
  }
};

struct RunOptions {
  bool keep_weights = true;
  bool keep_losses = true;
  bool keep_s_trace = true;
};

inline RunRecord run_hedge(const HedgeRule& rule, const LossStream& adversary, int T, int N,
                           const RunOptions& options = {}) {
  if (T < 0) throw std::invalid_argument("run_hedge: T must be nonnegative");
  RunRecord record;
  record.num_actions = N;
  CumulativeState state = CumulativeState::initial(N);

  const PotentialFamily* family = nullptr;
  if (const auto* fam = std::get_if<PotentialFamily>(&rule)) family = fam;
  BSeries series;
  const BSeries* series_ptr = nullptr;
  if (family != nullptr) {
    if (const auto* nh = std::get_if<NormalHedgeDTPotential>(family)) {
      series = build_b_series(T, nh->d);
      series_ptr = &series;
    }
  }
  auto potential_sum = [&](const CumulativeState& st) {
    if (family == nullptr) return std::numeric_limits<double>::quiet_NaN();
    const PotentialContext ctx{T, st.round_t};
    long double acc = 0.0L;
    for (double si : st.s) acc += detail::eval_potential_ld(*family, ctx, si, series_ptr);
    return static_cast<double>(acc);
  };

  record.potential_sums.push_back(potential_sum(state));
  if (options.keep_s_trace) record.s_trace.push_back(state.s);

  for (int t = 1; t <= T; ++t) {
    WeightVector p = hedge_weights(rule, state);
    LossVector loss = adversary(t, p);
    if (static_cast<int>(loss.size()) != N) throw std::invalid_argument("run_hedge: adversary emitted wrong width");
    validate_loss_vector(loss);

    record.player_losses.push_back(dot(p, loss));
    record.zero_weight_counts.push_back(
        static_cast<int>(std::count(p.begin(), p.end(), 0.0)));
    state = hedge_step(state, loss, p);
    record.potential_sums.push_back(potential_sum(state));
    if (options.keep_s_trace) record.s_trace.push_back(state.s);
    if (options.keep_weights) record.weights.push_back(std::move(p));
    if (options.keep_losses) record.losses.push_back(std::move(loss));
  }
  return record;
}

// Fraction of actions holding exactly zero weight, per round.
inline std::vector<double> zero_weight_fraction(const RunRecord& record) {
  std::vector<double> out;
  out.reserve(record.zero_weight_counts.size());
  for (int count : record.zero_weight_counts)
    out.push_back(static_cast<double>(count) / record.num_actions);
  return out;
}

// eps-regret after each prefix of a finished run.
template <typename Eps>
std::vector<double> epsilon_regret_curve(const RunRecord& record, Eps eps) {
  std::vector<double> curve;
  curve.reserve(record.losses.size());
  std::vector<double> totals(static_cast<std::size_t>(record.num_actions), 0.0);
  double player_total = 0.0;
  for (std::size_t t = 0; t < record.losses.size(); ++t) {
    for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += record.losses[t][i];
    player_total += record.player_losses[t];
    curve.push_back(epsilon_regret_totals(totals, player_total, eps));
  }
  return curve;
}

}  // namespace dgames
