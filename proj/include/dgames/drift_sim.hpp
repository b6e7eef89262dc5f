#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgames/hedge.hpp"
#include "dgames/potentials.hpp"
#include "dgames/rng.hpp"

namespace dgames {

// One round of adversary movements in the bounded drifting game.
struct DriftMove {
  std::vector<double> z;
};

struct MoveViolation {
  enum class Kind { OutOfRange, SpreadTooWide, NegativeWeightedDrift } kind;
  double value = 0.0;
  int index = -1;
};

struct MoveCheck {
  std::vector<MoveViolation> violations;
  bool ok() const { return violations.empty(); }
};

// DGv1 referee: z_i in [-1,1], pairwise spread at most 1, p.z >= 0, all
// within 1e-12.
inline MoveCheck validate_dgv1_move(const WeightVector& p, const DriftMove& move) {
  constexpr double kTol = 1e-12;
  if (p.size() != move.z.size()) throw std::invalid_argument("validate_dgv1_move: dimension mismatch");
  MoveCheck check;
  double zmin = std::numeric_limits<double>::infinity();
  double zmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < move.z.size(); ++i) {
    const double zi = move.z[i];
    if (zi < -1.0 - kTol || zi > 1.0 + kTol)
      check.violations.push_back({MoveViolation::Kind::OutOfRange, zi, static_cast<int>(i)});
    zmin = std::min(zmin, zi);
    zmax = std::max(zmax, zi);
  }
  if (zmax - zmin > 1.0 + kTol)
    check.violations.push_back({MoveViolation::Kind::SpreadTooWide, zmax - zmin, -1});
  const double pz = dot(p, move.z);
  if (pz < -kTol) check.violations.push_back({MoveViolation::Kind::NegativeWeightedDrift, pz, -1});
  return check;
}

// Strategies as pure functions of the opponent's full history. Both sides are
// recomputed from scratch each round; at the game sizes the conversions are
// exercised on, clarity wins over the quadratic cost.
using HedgeStrategy = std::function<WeightVector(const std::vector<LossVector>&)>;
using DriftPlayer = std::function<WeightVector(const std::vector<DriftMove>&)>;

// Any weight rule from hedge.hpp as a HedgeStrategy. `num_actions` fixes the
// width for the empty-history round.
inline HedgeStrategy potential_hedge_strategy(HedgeRule rule, int num_actions) {
  return [rule = std::move(rule), num_actions](const std::vector<LossVector>& history) {
    CumulativeState state = CumulativeState::initial(num_actions);
    WeightVector p = hedge_weights(rule, state);
    for (const auto& loss : history) {
      state = hedge_step(state, loss, p);
      p = hedge_weights(rule, state);
    }
    return p;
  };
}

// Hedge -> DGv1: replay the synthesized losses l_i = z_i - min_j z_j through
// the Hedge algorithm. The spread constraint keeps them inside [0,1].
inline DriftPlayer hedge_to_player(HedgeStrategy hedge) {
  return [hedge = std::move(hedge)](const std::vector<DriftMove>& history) {
    std::vector<LossVector> synthesized;
    synthesized.reserve(history.size());
    for (const auto& move : history) {
      if (move.z.empty()) throw std::invalid_argument("hedge_to_player: empty move");
      const double zmin = *std::min_element(move.z.begin(), move.z.end());
      LossVector loss(move.z.size());
      for (std::size_t i = 0; i < move.z.size(); ++i) loss[i] = move.z[i] - zmin;
      validate_loss_vector(loss);
      synthesized.push_back(std::move(loss));
    }
    return hedge(synthesized);
  };
}

// DGv1 -> Hedge: replay the induced movements z_i = l_i - p.l through the
// game player; those movements satisfy every DGv1 constraint with p.z = 0.
inline HedgeStrategy player_to_hedge(DriftPlayer player) {
  return [player = std::move(player)](const std::vector<LossVector>& history) {
    std::vector<DriftMove> moves;
    moves.reserve(history.size());
    for (const auto& loss : history) {
      const WeightVector p = player(moves);
      const double pl = dot(p, loss);
      DriftMove move;
      move.z.resize(loss.size());
      for (std::size_t i = 0; i < loss.size(); ++i) move.z[i] = loss[i] - pl;
      moves.push_back(std::move(move));
    }
    return player(moves);
  };
}

// ---------------------------------------------------------------------------
// Playing DGv1
// ---------------------------------------------------------------------------

using DriftAdversary =
    std::function<DriftMove(int round, const WeightVector& p, const std::vector<DriftMove>& history)>;

struct GameOutcome {
  std::vector<double> final_positions;
  double average_loss = 0.0;  // fraction of chips ending at or below -R
  double threshold_R = 0.0;
  bool aborted = false;       // adversary emitted an invalid move
  int aborted_round = -1;
  MoveCheck violation;
};

struct PlayOptions {
  bool validate_moves = true;  // the random-sign adversary only satisfies p.z >= 0 in expectation
};

inline GameOutcome play_dgv1(const DriftPlayer& player, const DriftAdversary& adversary, int T, int N,
                             double R, const PlayOptions& options = {}) {
  if (T < 0 || N < 1) throw std::invalid_argument("play_dgv1: need T >= 0 and N >= 1");
  GameOutcome outcome;
  outcome.threshold_R = R;
  std::vector<DriftMove> history;
  std::vector<double> positions(static_cast<std::size_t>(N), 0.0);
  for (int t = 1; t <= T; ++t) {
    const WeightVector p = player(history);
    DriftMove move = adversary(t, p, history);
    if (static_cast<int>(move.z.size()) != N)
      throw std::invalid_argument("play_dgv1: adversary emitted wrong width");
    if (options.validate_moves) {
      MoveCheck check = validate_dgv1_move(p, move);
      if (!check.ok()) {
        outcome.aborted = true;
        outcome.aborted_round = t;
        outcome.violation = std::move(check);
        outcome.final_positions = positions;
        return outcome;
      }
    }
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] += move.z[i];
    history.push_back(std::move(move));
  }
  int hits = 0;
  for (double s : positions)
    if (s <= -R) ++hits;
  outcome.final_positions = std::move(positions);
  outcome.average_loss = static_cast<double>(hits) / static_cast<double>(N);
  return outcome;
}

// ---------------------------------------------------------------------------
// Built-in adversaries
// ---------------------------------------------------------------------------

inline DriftAdversary zero_adversary() {
  return [](int, const WeightVector& p, const std::vector<DriftMove>&) {
    return DriftMove{std::vector<double>(p.size(), 0.0)};
  };
}

inline DriftAdversary constant_adversary(double value) {
  if (value < 0.0 || value > 1.0)
    throw std::invalid_argument("constant_adversary: common move must be in [0,1] to keep p.z >= 0");
  return [value](int, const WeightVector& p, const std::vector<DriftMove>&) {
    return DriftMove{std::vector<double>(p.size(), value)};
  };
}

// Independent fair signs; p.z >= 0 only in expectation, so play with
// validation off.
inline DriftAdversary random_sign_adversary(std::uint64_t seed) {
  return [seed](int round, const WeightVector& p, const std::vector<DriftMove>&) {
    SplitMix64 g(mix_seed(seed, static_cast<std::uint64_t>(round)));
    DriftMove move;
    move.z.resize(p.size());
    for (double& zi : move.z) zi = (g.next() & 1) ? 1.0 : -1.0;
    return move;
  };
}

// Greedy two-level move: the heaviest chips (total weight w) step +(1 - w),
// everyone else steps -w. Spread is exactly 1 and p.z = 0, so the heavy half
// is pushed right while the rest drift left.
inline DriftAdversary greedy_push_adversary() {
  return [](int, const WeightVector& p, const std::vector<DriftMove>&) {
    const int n = static_cast<int>(p.size());
    std::vector<int> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p[a] > p[b]; });
    const int heavy = (n + 1) / 2;
    double heavy_weight = 0.0;
    for (int k = 0; k < heavy; ++k) heavy_weight += p[static_cast<std::size_t>(order[k])];
    DriftMove move;
    move.z.assign(p.size(), -heavy_weight);
    for (int k = 0; k < heavy; ++k) move.z[static_cast<std::size_t>(order[k])] = 1.0 - heavy_weight;
    return move;
  };
}

// The boost-by-majority player: weights proportional to
// Phi_t(s - 1) - Phi_t(s + 1) under the biased-walk potential.
inline DriftPlayer bbm_player(double beta, int T, double R, int num_actions) {
  return [beta, T, R, num_actions](const std::vector<DriftMove>& history) {
    const int t = static_cast<int>(history.size()) + 1;
    if (t > T) throw std::invalid_argument("bbm_player: game longer than its horizon");
    const std::size_t n = static_cast<std::size_t>(num_actions);
    std::vector<double> positions(n, 0.0);
    for (const auto& move : history) {
      if (move.z.size() != n) throw std::invalid_argument("bbm_player: move width mismatch");
      for (std::size_t i = 0; i < n; ++i) positions[i] += move.z[i];
    }
    const PotentialContext ctx{T, t};
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i)
      u[i] = bbm_potential(beta, ctx, positions[i] - 1.0, R) -
             bbm_potential(beta, ctx, positions[i] + 1.0, R);
    return detail::normalize_or_uniform(std::move(u));
  };
}

// ---------------------------------------------------------------------------
// Potential-sum trace: sum_i Phi_t(s_{t,i}) for t = 0..rounds, recomputed from
// the recorded drift trajectory. Whether the family matches the rule that
// produced the record is the caller's responsibility.
// ---------------------------------------------------------------------------

inline std::vector<double> potential_sum_trace(const RunRecord& record, const PotentialFamily& family,
                                               int T) {
  if (record.s_trace.empty())
    throw std::invalid_argument("potential_sum_trace: record was produced without an s trace");
  if (record.rounds() > T) throw std::invalid_argument("potential_sum_trace: record longer than horizon");
  BSeries series;
  const BSeries* series_ptr = nullptr;
  if (const auto* nh = std::get_if<NormalHedgeDTPotential>(&family)) {
    series = build_b_series(T, nh->d);
    series_ptr = &series;
  }
  std::vector<double> trace;
  trace.reserve(record.s_trace.size());
  for (std::size_t t = 0; t < record.s_trace.size(); ++t) {
    const PotentialContext ctx{T, static_cast<int>(t)};
    long double acc = 0.0L;
    for (double s : record.s_trace[t]) acc += detail::eval_potential_ld(family, ctx, s, series_ptr);
    trace.push_back(static_cast<double>(acc));
  }
  return trace;
}

}  // namespace dgames
