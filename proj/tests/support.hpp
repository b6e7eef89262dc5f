#pragma once

// Brute-force oracles and enumeration harnesses shared by the unit tests and
// the acceptance suite. Everything here recomputes from definitions and stays
// independent of the library's own code paths wherever it is used as an
// oracle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "dgames/boosting.hpp"
#include "dgames/drift_sim.hpp"
#include "dgames/hedge.hpp"
#include "dgames/rng.hpp"

namespace dgames_test {

using namespace dgames;

// Sort-based eps-regret oracle (independent of epsilon_regret_totals).
inline double eps_regret_oracle(std::vector<double> totals, double player_total, int rank) {
  std::vector<std::size_t> order(totals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return totals[a] < totals[b]; });
  return player_total - totals[order[static_cast<std::size_t>(rank - 1)]];
}

struct BracketingStats {
  long long sequences = 0;
  long long checks = 0;
  long long violations = 0;
  long long skipped_ties = 0;
};

// Regrets sorted descending with ties by original index; entry j-1 equals the
// (j/N)-regret.
inline std::vector<double> sorted_regrets(const std::vector<double>& totals, double player_total) {
  std::vector<int> order(totals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return totals[a] < totals[b]; });
  std::vector<double> out;
  out.reserve(totals.size());
  for (int idx : order) out.push_back(player_total - totals[static_cast<std::size_t>(idx)]);
  return out;
}

// Exhaustive check over every ternary loss sequence: the Hedge
// strategy produced by converting a drifting-game player must satisfy
// "game loss < eps implies eps-regret < R", with the game played on the
// movements the conversion itself induces.
inline BracketingStats exhaustive_regret_bracketing(const HedgeRule& rule, int N, int T,
                                                 const std::vector<double>& r_grid) {
  BracketingStats stats;
  const std::vector<double> levels = {0.0, 0.5, 1.0};
  std::vector<double> totals(static_cast<std::size_t>(N), 0.0);

  std::function<void(int, const CumulativeState&, double)> dfs = [&](int t, const CumulativeState& state,
                                                                     double player_total) {
    if (t == T) {
      ++stats.sequences;
      const auto regrets = sorted_regrets(totals, player_total);
      // Library's ranked regret must agree with the independent sort.
      for (int j = 1; j <= N; ++j) {
        const double lib = epsilon_regret_totals(totals, player_total, Decimal{j, N});
        if (std::fabs(lib - regrets[static_cast<std::size_t>(j - 1)]) > 1e-12) ++stats.violations;
      }
      for (double r_threshold : r_grid) {
        bool tie = false;
        for (double r : regrets)
          if (std::fabs(r - r_threshold) <= 1e-9) tie = true;
        if (tie) {
          ++stats.skipped_ties;
          continue;
        }
        int game_hits = 0;
        for (std::size_t i = 0; i < state.s.size(); ++i)
          if (state.s[i] <= -r_threshold) ++game_hits;
        for (int j = 1; j <= N; ++j) {
          ++stats.checks;
          const bool loss_below = game_hits < j;  // game loss < j/N
          if (loss_below && !(regrets[static_cast<std::size_t>(j - 1)] < r_threshold)) ++stats.violations;
        }
      }
      return;
    }
    const WeightVector p = hedge_weights(rule, state);
    LossVector loss(static_cast<std::size_t>(N));
    std::vector<int> digits(static_cast<std::size_t>(N), 0);
    while (true) {
      for (int i = 0; i < N; ++i) loss[static_cast<std::size_t>(i)] = levels[static_cast<std::size_t>(digits[static_cast<std::size_t>(i)])];
      const double pl = dot(p, loss);
      const CumulativeState next = hedge_step(state, loss, p);
      for (int i = 0; i < N; ++i) totals[static_cast<std::size_t>(i)] += loss[static_cast<std::size_t>(i)];
      dfs(t + 1, next, player_total + pl);
      for (int i = 0; i < N; ++i) totals[static_cast<std::size_t>(i)] -= loss[static_cast<std::size_t>(i)];
      int pos = 0;
      while (pos < N && digits[static_cast<std::size_t>(pos)] == 2) digits[static_cast<std::size_t>(pos++)] = 0;
      if (pos == N) break;
      ++digits[static_cast<std::size_t>(pos)];
    }
  };

  dfs(0, CumulativeState::initial(N), 0.0);
  return stats;
}

// Exhaustive converse check: a Hedge algorithm converted into a game
// player keeps the average game loss at or below i/N, where i brackets the
// measured regrets of the synthesized loss sequence. Adversary moves are
// enumerated from ternary base vectors in both valid normalizations
// (shift-by-min and projection to p.z = 0).
inline BracketingStats exhaustive_game_loss_bracketing(const HedgeRule& rule, int N, int T,
                                                 const std::vector<double>& r_grid) {
  BracketingStats stats;
  const std::vector<double> levels = {0.0, 0.5, 1.0};

  struct Node {
    CumulativeState hedge_state;       // the wrapped Hedge algorithm's state (fed synthesized losses)
    std::vector<double> positions;     // true game positions
    std::vector<double> synth_totals;  // per-action synthesized loss totals
    double synth_player_total = 0.0;
  };

  std::function<void(int, const Node&)> dfs = [&](int t, const Node& node) {
    if (t == T) {
      ++stats.sequences;
      const auto regrets = sorted_regrets(node.synth_totals, node.synth_player_total);
      for (double r_threshold : r_grid) {
        bool tie = false;
        for (double r : regrets)
          if (std::fabs(r - r_threshold) <= 1e-9) tie = true;
        if (tie) {
          ++stats.skipped_ties;
          continue;
        }
        // Bracket: regrets[i] is the (i+1)/N regret; find i with
        // regret_(i+1) < R <= regret_(i), regret_(0) = +inf.
        int bracket = 0;
        while (bracket < N && regrets[static_cast<std::size_t>(bracket)] >= r_threshold) ++bracket;
        int game_hits = 0;
        for (double pos : node.positions)
          if (pos <= -r_threshold) ++game_hits;
        ++stats.checks;
        if (game_hits > bracket) ++stats.violations;
      }
      return;
    }
    const WeightVector p = hedge_weights(rule, node.hedge_state);
    std::vector<int> digits(static_cast<std::size_t>(N), 0);
    std::vector<double> base(static_cast<std::size_t>(N));
    while (true) {
      for (int i = 0; i < N; ++i) base[static_cast<std::size_t>(i)] = levels[static_cast<std::size_t>(digits[static_cast<std::size_t>(i)])];
      const double vmin = *std::min_element(base.begin(), base.end());
      const double pv = dot(p, base);
      for (int variant = 0; variant < 2; ++variant) {
        const double shift = variant == 0 ? vmin : pv;
        if (variant == 1 && std::fabs(pv - vmin) < 1e-15) continue;  // duplicate move
        Node next = node;
        LossVector synth(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) {
          const double z = base[static_cast<std::size_t>(i)] - shift;
          next.positions[static_cast<std::size_t>(i)] += z;
          synth[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] - vmin;  // z - min z
          next.synth_totals[static_cast<std::size_t>(i)] += synth[static_cast<std::size_t>(i)];
        }
        next.synth_player_total += dot(p, synth);
        next.hedge_state = hedge_step(node.hedge_state, synth, p);
        dfs(t + 1, next);
      }
      int pos = 0;
      while (pos < N && digits[static_cast<std::size_t>(pos)] == 2) digits[static_cast<std::size_t>(pos++)] = 0;
      if (pos == N) break;
      ++digits[static_cast<std::size_t>(pos)];
    }
  };

  Node root;
  root.hedge_state = CumulativeState::initial(N);
  root.positions.assign(static_cast<std::size_t>(N), 0.0);
  root.synth_totals.assign(static_cast<std::size_t>(N), 0.0);
  dfs(0, root);
  return stats;
}

// Max componentwise weight difference between a Hedge rule and its
// hedge -> player -> hedge round trip, over every prefix of a random loss
// sequence.
inline double roundtrip_hedge_diff(const HedgeRule& rule, int N, int T, std::uint64_t seed) {
  const HedgeStrategy direct = potential_hedge_strategy(rule, N);
  const HedgeStrategy round_trip = player_to_hedge(hedge_to_player(direct));
  SplitMix64 g(seed);
  std::vector<LossVector> history;
  double max_diff = 0.0;
  // A T-round game queries the strategy at history lengths 0..T-1.
  for (int t = 0; t < T; ++t) {
    const WeightVector a = direct(history);
    const WeightVector b = round_trip(history);
    for (int i = 0; i < N; ++i)
      max_diff = std::max(max_diff, std::fabs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]));
    LossVector loss(static_cast<std::size_t>(N));
    for (double& l : loss) l = g.next_double();
    history.push_back(std::move(loss));
  }
  return max_diff;
}

// Max componentwise weight difference between a game player and its
// player -> hedge -> player round trip, on a move sequence generated by the
// player itself against random projected losses (so p.z = 0 holds).
inline double roundtrip_player_diff(const DriftPlayer& player, int N, int T, std::uint64_t seed) {
  const DriftPlayer round_trip = hedge_to_player(player_to_hedge(player));
  SplitMix64 g(seed);
  std::vector<DriftMove> history;
  double max_diff = 0.0;
  for (int t = 0; t < T; ++t) {
    const WeightVector a = player(history);
    const WeightVector b = round_trip(history);
    for (int i = 0; i < N; ++i)
      max_diff = std::max(max_diff, std::fabs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]));
    LossVector loss(static_cast<std::size_t>(N));
    for (double& l : loss) l = g.next_double();
    const double pl = dot(a, loss);
    DriftMove move;
    move.z.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) move.z[static_cast<std::size_t>(i)] = loss[static_cast<std::size_t>(i)] - pl;
    history.push_back(std::move(move));
  }
  return max_diff;
}

// Training-error and margin envelopes implied by the minimum edge and the
// NormalHedge.DT regret bound, checked against a finished NH-Boost.DT run.
struct BoostingEnvelopeReport {
  bool applicable = false;  // false when min_t gamma_t <= 0
  double gamma_hat = 0.0;
  long long checks = 0;
  long long violations = 0;
};

inline BoostingEnvelopeReport check_boosting_envelopes(const BoostResult& result, const BinaryDataset& train) {
  BoostingEnvelopeReport report;
  report.gamma_hat =
      *std::min_element(result.model.edges.begin(), result.model.edges.end());
  if (!(report.gamma_hat > 0.0)) return report;
  report.applicable = true;

  const int N = train.num_examples();
  const int T = result.model.rounds_T;
  const PotentialFamily family{NormalHedgeDTPotential{}};
  std::vector<double> bound_at_rank(static_cast<std::size_t>(N) + 1, 0.0);
  for (int j = 1; j <= N; ++j)
    bound_at_rank[static_cast<std::size_t>(j)] =
        regret_bound(family, T, static_cast<double>(j) / N);

  const auto margin_values = margins(result.model, train);

  // Training error <= (j-1)/N for the smallest j with gamma_hat > R(j/N)/T.
  for (int j = 1; j <= N; ++j) {
    if (report.gamma_hat > bound_at_rank[static_cast<std::size_t>(j)] / T) {
      ++report.checks;
      if (result.metrics.final_train_error() > (static_cast<double>(j) - 1.0) / N + 1e-12)
        ++report.violations;
      break;
    }
  }

  // Margin distribution: fraction with margin <= theta is <= (j-1)/N for the
  // smallest j with theta < 2 (gamma_hat - R(j/N)/T).
  for (double theta = -1.0; theta <= 1.0 + 1e-9; theta += 0.05) {
    int j_star = -1;
    for (int j = 1; j <= N; ++j) {
      if (theta < 2.0 * (report.gamma_hat - bound_at_rank[static_cast<std::size_t>(j)] / T)) {
        j_star = j;
        break;
      }
    }
    if (j_star < 0) continue;
    int below = 0;
    for (double m : margin_values)
      if (m <= theta) ++below;
    ++report.checks;
    if (static_cast<double>(below) / N > (static_cast<double>(j_star) - 1.0) / N + 1e-12)
      ++report.violations;
  }
  return report;
}

}  // namespace dgames_test
