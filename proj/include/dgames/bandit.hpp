#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgames/hedge.hpp"
#include "dgames/potentials.hpp"
#include "dgames/rng.hpp"

namespace dgames {

// Learner-side bandit state: estimated cumulative drift plus the stream
// position of its own sampler.
struct BanditState {
  std::vector<double> s_hat;
  int round_t = 0;
  SplitMix64 rng;

  static BanditState initial(int num_actions, std::uint64_t seed) {
    if (num_actions < 1) throw std::invalid_argument("BanditState: need at least one action");
    BanditState st;
    st.s_hat.assign(static_cast<std::size_t>(num_actions), 0.0);
    st.rng = SplitMix64(seed);
    return st;
  }
};

struct BanditFeedback {
  int chosen_action = -1;
  double observed_loss = 0.0;
};

// Importance-weighted movement estimate:
//   z_i = 1{i = i_t} l_{i_t} / p_{i_t} - l_{i_t}.
inline std::vector<double> estimate_movements(const BanditFeedback& feedback, const WeightVector& p) {
  const int n = static_cast<int>(p.size());
  if (feedback.chosen_action < 0 || feedback.chosen_action >= n)
    throw std::invalid_argument("estimate_movements: chosen action out of range");
  if (!(feedback.observed_loss >= 0.0 && feedback.observed_loss <= 1.0))
    throw std::invalid_argument("estimate_movements: loss must lie in [0,1]");
  const double pc = p[static_cast<std::size_t>(feedback.chosen_action)];
  if (!(pc > 0.0))
    throw std::invalid_argument("estimate_movements: sampled a zero-probability action");
  std::vector<double> z(p.size(), -feedback.observed_loss);
  z[static_cast<std::size_t>(feedback.chosen_action)] =
      feedback.observed_loss / pc - feedback.observed_loss;
  return z;
}

// EXP potential weights on the estimated drift; identical to the
// exp(-eta sum of estimated losses) form because the two exponents differ by
// a round-constant that normalization removes.
inline WeightVector exp3_weights(const BanditState& state, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("exp3_weights: eta must be positive");
  CumulativeState view;
  view.s = state.s_hat;
  view.round_t = state.round_t;
  return hedge_weights(PotentialFamily{ExpPotential{eta, 0.0}}, view);
}

// DGv2 moment conditions, verified by exact enumeration over the drawn
// action: z_i >= -1 pointwise, E[z_i] <= 1, E[z_i^2] <= 1/p_i, E[p.z] = 0.
struct Dgv2Violation {
  enum class Kind { PointwiseBelowMinusOne, MeanAboveOne, SecondMomentTooLarge, WeightedDriftNonzero } kind;
  int index = -1;
  double value = 0.0;
};

struct Dgv2Report {
  std::vector<Dgv2Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline Dgv2Report dgv2_condition_check(const WeightVector& p, const LossVector& hidden_losses) {
  constexpr double kTol = 1e-12;
  const int n = static_cast<int>(p.size());
  if (hidden_losses.size() != p.size())
    throw std::invalid_argument("dgv2_condition_check: dimension mismatch");
  validate_loss_vector(hidden_losses);
  Dgv2Report report;
  double weighted_drift = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pi = p[static_cast<std::size_t>(i)];
    double mean = 0.0, second = 0.0;
    for (int j = 0; j < n; ++j) {
      const double pj = p[static_cast<std::size_t>(j)];
      if (pj <= 0.0) continue;
      const double lj = hidden_losses[static_cast<std::size_t>(j)];
      const double zij = (i == j) ? lj / pj - lj : -lj;
      if (zij < -1.0 - kTol)
        report.violations.push_back({Dgv2Violation::Kind::PointwiseBelowMinusOne, i, zij});
      mean += pj * zij;
      second += pj * zij * zij;
    }
    if (mean > 1.0 + kTol) report.violations.push_back({Dgv2Violation::Kind::MeanAboveOne, i, mean});
    if (pi > 0.0 && second > 1.0 / pi + kTol)
      report.violations.push_back({Dgv2Violation::Kind::SecondMomentTooLarge, i, second});
    weighted_drift += pi * mean;
  }
  if (std::fabs(weighted_drift) > kTol)
    report.violations.push_back({Dgv2Violation::Kind::WeightedDriftNonzero, -1, weighted_drift});
  return report;
}

// Closed-form alpha_t for the EXP potential in the DGv2 analysis.
inline double exp3_alpha(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("exp3_alpha: eta must be positive");
  return std::exp(eta) * eta * eta / (2.0 * (std::exp(eta) - std::exp(-eta)));
}

// The DGv2 potential for EXP3:
//   Phi_t(s) = exp(-eta s) ((e^eta + e^-eta + N e^eta eta^2) / 2)^{T-t}.
inline double exp3_potential(double eta, int N, const PotentialContext& ctx, double s) {
  if (!(eta > 0.0)) throw std::invalid_argument("exp3_potential: eta must be positive");
  validate_context(ctx);
  const double base = 0.5 * (std::exp(eta) + std::exp(-eta) + N * std::exp(eta) * eta * eta);
  return std::exp(-eta * s) * std::pow(base, ctx.horizon_T - ctx.round_t);
}

// Tuned learning rate from the DGv2 regret expression at eps = 1/N; the proof
// needs eta <= 1.
inline double bandit_auto_eta(int T, int N) {
  if (T < 1 || N < 2) throw std::invalid_argument("bandit_auto_eta: need T >= 1 and N >= 2");
  return std::min(1.0, std::sqrt(2.0 * std::log(static_cast<double>(N)) /
                                 (T * (1.0 + N * std::sqrt(std::exp(1.0))))));
}

// The harness owns the full hidden loss vector; the learner path only ever
// sees the chosen entry.
using HiddenLossFn = std::function<LossVector(int round, const WeightVector& p)>;

struct BanditRunRecord {
  int num_actions = 0;
  std::vector<int> chosen;               // per round
  std::vector<double> observed;          // per round l_{t, i_t}
  std::vector<LossVector> hidden;        // per round, harness side
  std::vector<double> potential_sums;    // t = 0..T under the DGv2 EXP3 potential
  std::vector<double> s_hat_final;

  int rounds() const { return static_cast<int>(chosen.size()); }

  std::vector<double> hidden_totals() const {
    std::vector<double> totals(static_cast<std::size_t>(num_actions), 0.0);
    for (const auto& row : hidden)
      for (std::size_t i = 0; i < row.size(); ++i) totals[i] += row[i];
    return totals;
  }

  double observed_total() const {
    double acc = 0.0;
    for (double l : observed) acc += l;
    return acc;
  }

  // Realized regret against the best fixed action in hindsight.
  double regret_to_best() const {
    const auto totals = hidden_totals();
    return observed_total() - *std::min_element(totals.begin(), totals.end());
  }
};

struct BanditStepResult {
  int chosen_action = -1;
  WeightVector p;
};

inline BanditStepResult bandit_step(BanditState& state, double eta, const LossVector& hidden_losses) {
  if (hidden_losses.size() != state.s_hat.size())
    throw std::invalid_argument("bandit_step: dimension mismatch");
  validate_loss_vector(hidden_losses);
  BanditStepResult result;
  result.p = exp3_weights(state, eta);
  result.chosen_action = sample_index(state.rng, result.p);
  const BanditFeedback feedback{result.chosen_action,
                                hidden_losses[static_cast<std::size_t>(result.chosen_action)]};
  const auto z = estimate_movements(feedback, result.p);
  for (std::size_t i = 0; i < state.s_hat.size(); ++i) state.s_hat[i] += z[i];
  state.round_t += 1;
  return result;
}

struct BanditRunOptions {
  bool keep_hidden = true;
  bool track_potential_sums = true;
};

inline BanditRunRecord run_bandit(double eta, const HiddenLossFn& adversary, int T, int N,
                                  std::uint64_t seed, const BanditRunOptions& options = {}) {
  if (T < 0) throw std::invalid_argument("run_bandit: T must be nonnegative");
  BanditState state = BanditState::initial(N, seed);
  BanditRunRecord record;
  record.num_actions = N;
  auto potential_sum = [&]() {
    long double acc = 0.0L;
    const PotentialContext ctx{T, state.round_t};
    for (double s : state.s_hat) acc += exp3_potential(eta, N, ctx, s);
    return static_cast<double>(acc);
  };
  if (options.track_potential_sums) record.potential_sums.push_back(potential_sum());
  for (int t = 1; t <= T; ++t) {
    LossVector hidden = adversary(t, exp3_weights(state, eta));
    if (static_cast<int>(hidden.size()) != N)
      throw std::invalid_argument("run_bandit: adversary emitted wrong width");
    const auto step = bandit_step(state, eta, hidden);
    record.chosen.push_back(step.chosen_action);
    record.observed.push_back(hidden[static_cast<std::size_t>(step.chosen_action)]);
    if (options.track_potential_sums) record.potential_sums.push_back(potential_sum());
    if (options.keep_hidden) record.hidden.push_back(std::move(hidden));
  }
  record.s_hat_final = state.s_hat;
  return record;
}

// Algorithm-4 recipe with an arbitrary potential family. Experimental: no
// regret statement is attached to non-EXP potentials.
inline BanditRunRecord run_bandit_general(const PotentialFamily& family, const HiddenLossFn& adversary,
                                          int T, int N, std::uint64_t seed) {
  if (T < 0) throw std::invalid_argument("run_bandit_general: T must be nonnegative");
  validate_family(family, /*for_algorithm=*/true);
  BanditState state = BanditState::initial(N, seed);
  BanditRunRecord record;
  record.num_actions = N;
  for (int t = 1; t <= T; ++t) {
    CumulativeState view;
    view.s = state.s_hat;
    view.round_t = state.round_t;
    const WeightVector p = hedge_weights(PotentialFamily{family}, view);
    LossVector hidden = adversary(t, p);
    if (static_cast<int>(hidden.size()) != N)
      throw std::invalid_argument("run_bandit_general: adversary emitted wrong width");
    validate_loss_vector(hidden);
    const int chosen = sample_index(state.rng, p);
    const auto z = estimate_movements({chosen, hidden[static_cast<std::size_t>(chosen)]}, p);
    for (std::size_t i = 0; i < state.s_hat.size(); ++i) state.s_hat[i] += z[i];
    state.round_t += 1;
    record.chosen.push_back(chosen);
    record.observed.push_back(hidden[static_cast<std::size_t>(chosen)]);
    record.hidden.push_back(std::move(hidden));
  }
  record.s_hat_final = state.s_hat;
  return record;
}

}  // namespace dgames
