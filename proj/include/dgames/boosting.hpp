#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgames/hedge.hpp"

namespace dgames {

// Binary-feature dataset stored as sorted per-example index lists; the
// logical view is an N x F bit matrix.
struct BinaryDataset {
  int num_features = 0;
  std::vector<std::vector<int>> rows;  // sorted 0-based feature ids per example
  std::vector<int> labels;             // -1 / +1

  int num_examples() const { return static_cast<int>(labels.size()); }

  bool has_feature(int example, int feature) const {
    const auto& row = rows[static_cast<std::size_t>(example)];
    return std::binary_search(row.begin(), row.end(), feature);
  }
};

inline void validate_dataset(const BinaryDataset& data) {
  if (data.rows.size() != data.labels.size())
    throw std::invalid_argument("BinaryDataset: rows/labels length mismatch");
  for (int y : data.labels)
    if (y != -1 && y != 1) throw std::invalid_argument("BinaryDataset: labels must be -1/+1");
  for (const auto& row : data.rows)
    for (int f : row)
      if (f < 0 || f >= data.num_features) throw std::invalid_argument("BinaryDataset: feature id out of range");
}

// Single-feature classifier: polarity if the bit is set, -polarity otherwise.
struct Stump {
  int feature = 0;
  int polarity = 1;  // +1 or -1

  int predict(const BinaryDataset& data, int example) const {
    return data.has_feature(example, feature) ? polarity : -polarity;
  }
};

// Exhaustive stump search. With W = sum_i p_i y_i and S_f = sum over examples
// carrying f of p_i y_i, the edge of (f, +1) is S_f - W/2 and of (f, -1) its
// negation, so one sparse sweep over the nonzero-weight rows scores all 2F
// stumps. Ties go to the smaller feature id with polarity +1 first.
inline std::pair<Stump, double> best_stump(const BinaryDataset& data, const WeightVector& p) {
  if (data.num_features < 1) throw std::invalid_argument("best_stump: dataset has no features");
  if (static_cast<int>(p.size()) != data.num_examples())
    throw std::invalid_argument("best_stump: weight width mismatch");
  std::vector<double> set_sum(static_cast<std::size_t>(data.num_features), 0.0);
  double total = 0.0;
  for (int i = 0; i < data.num_examples(); ++i) {
    const double pi = p[static_cast<std::size_t>(i)];
    if (pi == 0.0) continue;  // zero-weight rows cannot move any edge
    const double py = pi * data.labels[static_cast<std::size_t>(i)];
    total += py;
    for (int f : data.rows[static_cast<std::size_t>(i)]) set_sum[static_cast<std::size_t>(f)] += py;
  }
  Stump best{0, 1};
  double best_edge = -std::numeric_limits<double>::infinity();
  for (int f = 0; f < data.num_features; ++f) {
    const double plus_edge = set_sum[static_cast<std::size_t>(f)] - 0.5 * total;
    if (plus_edge > best_edge) {
      best = {f, 1};
      best_edge = plus_edge;
    }
    if (-plus_edge > best_edge) {
      best = {f, -1};
      best_edge = -plus_edge;
    }
  }
  return {best, best_edge};
}

enum class BoostAlgo { NHBoostDT, NHBoost, AdaBoost };

inline const char* boost_algo_name(BoostAlgo algo) {
  switch (algo) {
    case BoostAlgo::NHBoostDT: return "nhboost-dt";
    case BoostAlgo::NHBoost: return "nhboost";
    case BoostAlgo::AdaBoost: return "adaboost";
  }
  return "?";
}

struct BoostModel {
  std::vector<Stump> stumps;
  std::vector<double> edges;         // gamma_t
  std::vector<double> vote_weights;  // 1 for the majority-vote algorithms, alpha_t for AdaBoost
  int rounds_T = 0;
};

// Per-round boosting state. The drifting algorithms track s; AdaBoost tracks
// multiplicative log-weights.
struct BoostState {
  BoostAlgo algo = BoostAlgo::NHBoostDT;
  CumulativeState drift;          // NHBoostDT / NHBoost
  std::vector<double> log_w;      // AdaBoost
  int round_t = 0;

  static BoostState initial(BoostAlgo algo, int num_examples) {
    BoostState st;
    st.algo = algo;
    st.drift = CumulativeState::initial(num_examples);
    if (algo == BoostAlgo::AdaBoost) st.log_w.assign(static_cast<std::size_t>(num_examples), 0.0);
    return st;
  }
};

inline WeightVector boost_weights(const BoostState& state) {
  switch (state.algo) {
    case BoostAlgo::NHBoostDT:
      return hedge_weights(PotentialFamily{NormalHedgeDTPotential{}}, state.drift);
    case BoostAlgo::NHBoost:
      return hedge_weights(NormalHedgeRule{}, state.drift);
    case BoostAlgo::AdaBoost: {
      const double max_log = *std::max_element(state.log_w.begin(), state.log_w.end());
      std::vector<double> u(state.log_w.size());
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(state.log_w[i] - max_log);
      return detail::normalize_or_uniform(std::move(u));
    }
  }
  throw std::logic_error("boost_weights: unknown algorithm");
}

struct BoostRoundResult {
  WeightVector p;
  Stump stump;
  double edge = 0.0;
  BoostState state;
};

// One boosting round: compute weights, query the exhaustive weak learner,
// advance the state. The drifting update is s_i += (1/2) y_i h(x_i) - gamma,
// which satisfies p.z = 0 identically.
inline BoostRoundResult boost_round(const BoostState& state, const BinaryDataset& data) {
  BoostRoundResult out;
  out.p = boost_weights(state);
  auto [stump, edge] = best_stump(data, out.p);
  out.stump = stump;
  out.edge = edge;
  out.state = state;
  if (state.algo == BoostAlgo::AdaBoost) {
    // alpha = (1/2) ln((1 - err)/err), capped when the stump is perfect.
    const double err = std::clamp(0.5 - edge, 1e-12, 1.0 - 1e-12);
    const double alpha = 0.5 * std::log((1.0 - err) / err);
    for (int i = 0; i < data.num_examples(); ++i) {
      const int agree = data.labels[static_cast<std::size_t>(i)] * stump.predict(data, i);
      out.state.log_w[static_cast<std::size_t>(i)] -= alpha * agree;
    }
    out.state.drift.round_t += 1;
  } else {
    for (int i = 0; i < data.num_examples(); ++i) {
      const int agree = data.labels[static_cast<std::size_t>(i)] * stump.predict(data, i);
      out.state.drift.s[static_cast<std::size_t>(i)] += 0.5 * agree - edge;
    }
    out.state.drift.round_t += 1;
  }
  out.state.round_t += 1;
  return out;
}

struct BoostMetrics {
  std::vector<double> edges;          // per round
  std::vector<double> train_errors;   // per round, cumulative vote
  std::vector<double> test_errors;    // per round (empty without a test set)
  std::vector<double> zero_fractions; // per round
  std::vector<double> round_seconds;  // per round wall time

  double final_train_error() const { return train_errors.empty() ? 0.0 : train_errors.back(); }
  double final_test_error() const { return test_errors.empty() ? 0.0 : test_errors.back(); }
  double mean_zero_fraction() const {
    if (zero_fractions.empty()) return 0.0;
    double acc = 0.0;
    for (double z : zero_fractions) acc += z;
    return acc / static_cast<double>(zero_fractions.size());
  }
  double total_seconds() const {
    double acc = 0.0;
    for (double s : round_seconds) acc += s;
    return acc;
  }
};

struct BoostResult {
  BoostModel model;
  BoostMetrics metrics;
};

// Vote sign with ties sent to +1.
inline int vote_sign(double vote_sum) { return vote_sum >= 0.0 ? 1 : -1; }

inline BoostResult run_boosting(BoostAlgo algo, const BinaryDataset& train, const BinaryDataset* test,
                                int T) {
  if (T < 1) throw std::invalid_argument("run_boosting: need T >= 1");
  validate_dataset(train);
  if (test != nullptr) {
    validate_dataset(*test);
    if (test->num_features != train.num_features)
      throw std::invalid_argument("run_boosting: train/test feature width mismatch");
  }
  BoostResult result;
  result.model.rounds_T = T;
  BoostState state = BoostState::initial(algo, train.num_examples());
  std::vector<double> train_votes(static_cast<std::size_t>(train.num_examples()), 0.0);
  std::vector<double> test_votes(test != nullptr ? static_cast<std::size_t>(test->num_examples()) : 0, 0.0);

  for (int t = 1; t <= T; ++t) {
    const auto start = std::chrono::steady_clock::now();
    auto round = boost_round(state, train);
    const auto stop = std::chrono::steady_clock::now();
    state = std::move(round.state);

    double vote = 1.0;
    if (algo == BoostAlgo::AdaBoost) {
      const double err = std::clamp(0.5 - round.edge, 1e-12, 1.0 - 1e-12);
      vote = 0.5 * std::log((1.0 - err) / err);
    }
    result.model.stumps.push_back(round.stump);
    result.model.edges.push_back(round.edge);
    result.model.vote_weights.push_back(vote);

    int train_wrong = 0;
    for (int i = 0; i < train.num_examples(); ++i) {
      train_votes[static_cast<std::size_t>(i)] += vote * round.stump.predict(train, i);
      if (vote_sign(train_votes[static_cast<std::size_t>(i)]) != train.labels[static_cast<std::size_t>(i)])
        ++train_wrong;
    }
    result.metrics.edges.push_back(round.edge);
    result.metrics.train_errors.push_back(static_cast<double>(train_wrong) / train.num_examples());
    if (test != nullptr) {
      int test_wrong = 0;
      for (int i = 0; i < test->num_examples(); ++i) {
        test_votes[static_cast<std::size_t>(i)] += vote * round.stump.predict(*test, i);
        if (vote_sign(test_votes[static_cast<std::size_t>(i)]) != test->labels[static_cast<std::size_t>(i)])
          ++test_wrong;
      }
      result.metrics.test_errors.push_back(static_cast<double>(test_wrong) / test->num_examples());
    }
    result.metrics.zero_fractions.push_back(
        static_cast<double>(std::count(round.p.begin(), round.p.end(), 0.0)) / train.num_examples());
    result.metrics.round_seconds.push_back(std::chrono::duration<double>(stop - start).count());
  }
  return result;
}

// Normalized-vote margins: (sum_t v_t y_i h_t(x_i)) / sum_t v_t, in [-1, 1].
// For the majority-vote algorithms this is the plain (1/T) sum y_i h_t(x_i).
inline std::vector<double> margins(const BoostModel& model, const BinaryDataset& data) {
  if (model.stumps.empty()) throw std::invalid_argument("margins: empty model");
  double vote_total = 0.0;
  for (double v : model.vote_weights) vote_total += v;
  if (!(vote_total > 0.0)) throw std::invalid_argument("margins: vote weights sum to zero");
  std::vector<double> out(static_cast<std::size_t>(data.num_examples()), 0.0);
  for (std::size_t t = 0; t < model.stumps.size(); ++t) {
    const Stump& stump = model.stumps[t];
    const double v = model.vote_weights[t];
    for (int i = 0; i < data.num_examples(); ++i)
      out[static_cast<std::size_t>(i)] += v * data.labels[static_cast<std::size_t>(i)] * stump.predict(data, i);
  }
  for (double& m : out) m /= vote_total;
  return out;
}

// ---------------------------------------------------------------------------
// Model serialization: one line per round, "round feature polarity edge",
// shortest round-trippable decimals.
// ---------------------------------------------------------------------------

inline void save_model(const BoostModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out.precision(17);
  for (std::size_t t = 0; t < model.stumps.size(); ++t) {
    out << (t + 1) << ' ' << (model.stumps[t].feature + 1) << ' '
        << (model.stumps[t].polarity > 0 ? "+1" : "-1") << ' ' << model.edges[t] << '\n';
  }
  if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

inline BoostModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  BoostModel model;
  std::string line;
  int expected_round = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    int round = 0, feature = 0, polarity = 0;
    double edge = 0.0;
    if (!(row >> round >> feature >> polarity >> edge))
      throw std::runtime_error("load_model: malformed line '" + line + "'");
    if (round != expected_round)
      throw std::runtime_error("load_model: rounds out of order at '" + line + "'");
    if (polarity != 1 && polarity != -1) throw std::runtime_error("load_model: bad polarity");
    model.stumps.push_back({feature - 1, polarity});
    model.edges.push_back(edge);
    model.vote_weights.push_back(1.0);
    ++expected_round;
  }
  model.rounds_T = static_cast<int>(model.stumps.size());
  return model;
}

}  // namespace dgames
