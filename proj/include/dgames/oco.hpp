#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgames/hedge.hpp"
#include "dgames/potentials.hpp"
#include "dgames/rng.hpp"

namespace dgames {

// Finite stand-in for the continuous chip space: M grid points, each carrying
// uniform measure 1/M. grid_spacing is the largest per-axis gap, published so
// discretization error stays visible next to any reported regret.
struct DiscretizedDomain {
  int dim = 0;
  std::vector<std::vector<double>> points;
  double grid_spacing = 0.0;

  int size() const { return static_cast<int>(points.size()); }
};

// Regular product grid over an axis-aligned box, `resolution` points per axis.
inline DiscretizedDomain discretize_box(const std::vector<std::pair<double, double>>& bounds,
                                        int resolution) {
  if (bounds.empty() || bounds.size() > 3)
    throw std::invalid_argument("discretize_box: supported dimensions are 1..3");
  if (resolution < 2) throw std::invalid_argument("discretize_box: resolution must be >= 2");
  for (const auto& [lo, hi] : bounds)
    if (!(lo < hi)) throw std::invalid_argument("discretize_box: empty axis");
  DiscretizedDomain domain;
  domain.dim = static_cast<int>(bounds.size());
  for (const auto& [lo, hi] : bounds)
    domain.grid_spacing = std::max(domain.grid_spacing, (hi - lo) / (resolution - 1));
  std::vector<int> idx(bounds.size(), 0);
  while (true) {
    std::vector<double> point(bounds.size());
    for (std::size_t a = 0; a < bounds.size(); ++a)
      point[a] = bounds[a].first + (bounds[a].second - bounds[a].first) * idx[a] / (resolution - 1);
    domain.points.push_back(std::move(point));
    std::size_t axis = 0;
    while (axis < bounds.size() && idx[axis] == resolution - 1) idx[axis++] = 0;
    if (axis == bounds.size()) break;
    ++idx[axis];
  }
  return domain;
}

// Lattice over the standard simplex {x >= 0, sum x_i <= 1}: coordinates
// k / (resolution - 1) with sum k <= resolution - 1. Point count is
// C(resolution - 1 + dim, dim).
inline DiscretizedDomain discretize_simplex(int dim, int resolution) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("discretize_simplex: supported dimensions are 1..3");
  if (resolution < 2) throw std::invalid_argument("discretize_simplex: resolution must be >= 2");
  DiscretizedDomain domain;
  domain.dim = dim;
  const int m = resolution - 1;
  domain.grid_spacing = 1.0 / m;
  std::vector<int> k(static_cast<std::size_t>(dim), 0);
  std::function<void(int, int)> emit = [&](int axis, int budget) {
    if (axis == dim) {
      std::vector<double> point(static_cast<std::size_t>(dim));
      for (int a = 0; a < dim; ++a) point[static_cast<std::size_t>(a)] = static_cast<double>(k[static_cast<std::size_t>(a)]) / m;
      domain.points.push_back(std::move(point));
      return;
    }
    for (int v = 0; v <= budget; ++v) {
      k[static_cast<std::size_t>(axis)] = v;
      emit(axis + 1, budget - v);
    }
  };
  emit(0, m);
  return domain;
}

using LossOracle = std::function<double(std::span<const double>)>;

struct OcoStepResult {
  std::vector<double> prediction;
  CumulativeState state;
  double prediction_loss = 0.0;
  double jensen_slack = 0.0;  // E_p[f] - f(x_t), >= 0 for convex f
};

// One round of the general OCO recipe: weights over grid points from the
// potential rule, prediction at the weighted mean, drift update
// s(x) += f(x) - f(x_t). The Jensen constraint E_p[z] >= 0 is asserted here;
// a violation means the oracle was not convex (or not in range).
inline OcoStepResult oco_step(const CumulativeState& state, const HedgeRule& rule, const LossOracle& f,
                              const DiscretizedDomain& domain, double jensen_tolerance = 1e-10) {
  const std::size_t m = domain.points.size();
  if (state.s.size() != m) throw std::invalid_argument("oco_step: state width does not match domain");
  OcoStepResult out;
  const WeightVector p = hedge_weights(rule, state);

  out.prediction.assign(static_cast<std::size_t>(domain.dim), 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (int a = 0; a < domain.dim; ++a)
      out.prediction[static_cast<std::size_t>(a)] += p[i] * domain.points[i][static_cast<std::size_t>(a)];

  std::vector<double> values(m);
  double mean_value = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    values[i] = f(domain.points[i]);
    if (!(values[i] >= 0.0 && values[i] <= 1.0))
      throw std::invalid_argument("oco_step: oracle value outside [0,1]");
    mean_value += p[i] * values[i];
  }
  out.prediction_loss = f(out.prediction);
  if (!(out.prediction_loss >= 0.0 && out.prediction_loss <= 1.0))
    throw std::invalid_argument("oco_step: oracle value outside [0,1] at the prediction");

  out.jensen_slack = mean_value - out.prediction_loss;
  if (out.jensen_slack < -jensen_tolerance)
    throw std::runtime_error("oco_step: E_p[f] < f(mean); loss oracle is not convex");

  out.state = state;
  for (std::size_t i = 0; i < m; ++i) out.state.s[i] += values[i] - out.prediction_loss;
  out.state.round_t += 1;
  return out;
}

using OracleStream = std::function<LossOracle(int round)>;

struct OcoRunRecord {
  int num_points = 0;
  double grid_spacing = 0.0;
  std::vector<std::vector<double>> predictions;   // per round
  std::vector<double> prediction_losses;          // per round f_t(x_t)
  std::vector<double> jensen_slacks;              // per round
  std::vector<std::vector<double>> point_losses;  // per round, per grid point
  std::vector<double> potential_sums;             // t = 0..T (NaN for the NormalHedge rule)
  std::vector<int> zero_weight_counts;

  int rounds() const { return static_cast<int>(prediction_losses.size()); }

  std::vector<double> point_totals() const {
    std::vector<double> totals(static_cast<std::size_t>(num_points), 0.0);
    for (const auto& row : point_losses)
      for (std::size_t i = 0; i < row.size(); ++i) totals[i] += row[i];
    return totals;
  }

  double player_total() const {
    double acc = 0.0;
    for (double l : prediction_losses) acc += l;
    return acc;
  }
};

inline OcoRunRecord run_oco(const HedgeRule& rule, const DiscretizedDomain& domain,
                            const OracleStream& stream, int T) {
  if (T < 0) throw std::invalid_argument("run_oco: T must be nonnegative");
  OcoRunRecord record;
  record.num_points = domain.size();
  record.grid_spacing = domain.grid_spacing;
  CumulativeState state = CumulativeState::initial(domain.size());

  const PotentialFamily* family = std::get_if<PotentialFamily>(&rule);
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

  for (int t = 1; t <= T; ++t) {
    const LossOracle f = stream(t);
    const WeightVector p = hedge_weights(rule, state);
    record.zero_weight_counts.push_back(static_cast<int>(std::count(p.begin(), p.end(), 0.0)));
    auto step = oco_step(state, rule, f, domain);
    std::vector<double> values(domain.points.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = step.state.s[i] - state.s[i] + step.prediction_loss;  // recover f_t at each point
    record.predictions.push_back(std::move(step.prediction));
    record.prediction_losses.push_back(step.prediction_loss);
    record.jensen_slacks.push_back(step.jensen_slack);
    record.point_losses.push_back(std::move(values));
    state = std::move(step.state);
    record.potential_sums.push_back(potential_sum(state));
  }
  return record;
}

// Discrete eps-regret: competitor is the ceil(M eps)-th best grid point by
// total loss, exactly the Hedge ranking applied to the grid (at eps = 1/M it
// is the usual regret against the best point).
template <typename Eps>
double oco_epsilon_regret(const OcoRunRecord& record, Eps eps) {
  return epsilon_regret_totals(record.point_totals(), record.player_total(), eps);
}

// Usual-regret bound assembled from the eps-regret bound at eps = T^{-d}:
// R + T eps^{1/d} with the epsilon term collapsing to exactly 1.
inline double oco_usual_regret_bound(int T, int d, const PotentialFamily& family) {
  if (d < 1) throw std::invalid_argument("oco_usual_regret_bound: need d >= 1");
  if (T < 1) throw std::invalid_argument("oco_usual_regret_bound: need T >= 1");
  const double eps = std::pow(static_cast<double>(T), -static_cast<double>(d));
  return regret_bound(family, T, eps) + 1.0;
}

// Chord-sampling convexity probe for loss oracles: evaluates f at random
// pairs and midpoints and reports the worst midpoint excess. Zero (up to
// tolerance) is consistent with convexity; a positive report flags misuse.
inline double convexity_probe(const LossOracle& f, const DiscretizedDomain& domain, int samples,
                              std::uint64_t seed) {
  SplitMix64 g(seed);
  const std::size_t m = domain.points.size();
  if (m < 2) throw std::invalid_argument("convexity_probe: need at least two points");
  double worst = 0.0;
  std::vector<double> mid(static_cast<std::size_t>(domain.dim));
  for (int k = 0; k < samples; ++k) {
    const auto& a = domain.points[static_cast<std::size_t>(g.next() % m)];
    const auto& b = domain.points[static_cast<std::size_t>(g.next() % m)];
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
    worst = std::max(worst, f(mid) - 0.5 * (f(a) + f(b)));
  }
  return worst;
}

}  // namespace dgames
