#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgames/boosting.hpp"
#include "dgames/hedge.hpp"
#include "dgames/rng.hpp"

namespace dgames {

// ---------------------------------------------------------------------------
// Sparse LIBSVM text format: `label idx:val ...`, 1-based ascending indices.
// Binary mode insists on val = 1 everywhere; 0/1 labels are remapped to -1/+1
// with a warning.
// ---------------------------------------------------------------------------

struct ParseResult {
  BinaryDataset data;
  std::vector<std::string> warnings;
};

inline ParseResult parse_libsvm(const std::string& path, std::optional<int> expected_features = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_libsvm: cannot open " + path);
  ParseResult result;
  bool warned_remap = false;
  int max_feature = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string label_token;
    if (!(row >> label_token))
      throw std::runtime_error("parse_libsvm: " + path + ":" + std::to_string(line_no) + ": empty record");

    int label = 0;
    if (label_token == "+1" || label_token == "1" || label_token == "1.0" || label_token == "+1.0") {
      label = 1;
    } else if (label_token == "-1" || label_token == "-1.0") {
      label = -1;
    } else if (label_token == "0" || label_token == "0.0") {
      label = -1;
      if (!warned_remap) {
        result.warnings.push_back("labels in {0,1} remapped to {-1,+1}");
        warned_remap = true;
      }
    } else {
      throw std::runtime_error("parse_libsvm: " + path + ":" + std::to_string(line_no) +
                               ": label '" + label_token + "' is not -1/+1 (or 0/1)");
    }

    std::vector<int> features;
    std::string pair;
    int prev_index = 0;
    while (row >> pair) {
      const std::size_t colon = pair.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("parse_libsvm: " + path + ":" + std::to_string(line_no) +
                                 ": expected idx:val, got '" + pair + "'");
      int index = 0;
      double value = 0.0;
      try {
        std::size_t used = 0;
        index = std::stoi(pair.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(pair);
        value = std::stod(pair.substr(colon + 1));
      } catch (const std::exception&) {
        throw std::runtime_error("parse_libsvm: " + path + ":" + std::to_string(line_no) +
                                 ": malformed pair '" + pair + "'");
      }
      if (index <= prev_index)
        throw std::runtime_error("parse_libsvm: " + path + ":" + std::to_string(line_no) +
                                 ": indices must be 1-based ascending");
      if (value != 1.0)
        throw std::runtime_error("parse_libsvm: " + path + ":" + std::to_string(line_no) +
                                 ": binary datasets require val = 1, got " + pair);
      prev_index = index;
      features.push_back(index - 1);
      max_feature = std::max(max_feature, index);
    }
    result.data.labels.push_back(label);
    result.data.rows.push_back(std::move(features));
  }
  result.data.num_features = std::max(max_feature, expected_features.value_or(0));
  validate_dataset(result.data);
  return result;
}

inline void write_libsvm(const BinaryDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_libsvm: cannot open " + path);
  for (int i = 0; i < data.num_examples(); ++i) {
    out << (data.labels[static_cast<std::size_t>(i)] > 0 ? "+1" : "-1");
    for (int f : data.rows[static_cast<std::size_t>(i)]) out << ' ' << (f + 1) << ":1";
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_libsvm: write failed for " + path);
}

// Dataset cache directory: $DGAMES_DATA_DIR, defaulting to ./data.
inline std::string data_dir() {
  if (const char* env = std::getenv("DGAMES_DATA_DIR")) return env;
  return "./data";
}

// Resolve a dataset argument: use the path as given if it exists, otherwise
// look inside the cache directory.
inline std::string resolve_dataset_path(const std::string& name) {
  if (std::ifstream(name).good()) return name;
  const std::string cached = data_dir() + "/" + name;
  if (std::ifstream(cached).good()) return cached;
  throw std::runtime_error("dataset not found: tried '" + name + "' and '" + cached + "'");
}

// ---------------------------------------------------------------------------
// Synthetic loss streams for the Hedge/bandit harnesses. Pure functions of
// (kind, N, T, seed): the loss for round t never depends on call order.
// ---------------------------------------------------------------------------

enum class StreamKind { UniformRandom, AdversarialBestHiding, Constant };

inline StreamKind parse_stream_kind(const std::string& name) {
  if (name == "random" || name == "uniform_random") return StreamKind::UniformRandom;
  if (name == "adversarial" || name == "adversarial_best_hiding") return StreamKind::AdversarialBestHiding;
  if (name == "constant") return StreamKind::Constant;
  throw std::invalid_argument("unknown loss stream '" + name + "'");
}

inline LossStream synth_loss_stream(StreamKind kind, int N, int T, std::uint64_t seed) {
  if (N < 1 || T < 0) throw std::invalid_argument("synth_loss_stream: bad dimensions");
  switch (kind) {
    case StreamKind::Constant:
      return [N](int, const WeightVector&) { return LossVector(static_cast<std::size_t>(N), 0.5); };
    case StreamKind::UniformRandom:
      return [N, seed](int round, const WeightVector&) {
        SplitMix64 g(mix_seed(seed, static_cast<std::uint64_t>(round)));
        LossVector out(static_cast<std::size_t>(N));
        for (double& l : out) l = g.next_double();
        return out;
      };
    case StreamKind::AdversarialBestHiding:
      // Greedy pressure: charge full loss to the heavier half of the actions
      // (ties toward lower index), with an occasional random round so
      // different seeds explore different trajectories.
      return [N, seed](int round, const WeightVector& p) {
        SplitMix64 g(mix_seed(seed ^ 0x5bd1e995u, static_cast<std::uint64_t>(round)));
        LossVector out(static_cast<std::size_t>(N), 0.0);
        if (g.next_double() < 0.1) {
          for (double& l : out) l = g.next() & 1 ? 1.0 : 0.0;
          return out;
        }
        std::vector<int> order(static_cast<std::size_t>(N));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p[static_cast<std::size_t>(a)] > p[static_cast<std::size_t>(b)]; });
        for (int k = 0; k < (N + 1) / 2; ++k) out[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1.0;
        return out;
      };
  }
  throw std::logic_error("synth_loss_stream: unknown kind");
}

// ---------------------------------------------------------------------------
// Synthetic binary classification data. Features are independent coins whose
// bias depends on the (pre-noise) label; a final label flip sets the
// irreducible error. Deterministic given the parameters.
// ---------------------------------------------------------------------------

struct SyntheticSpec {
  int num_train = 0;
  int num_test = 0;
  int num_features = 0;
  int informative = 0;     // features with label-dependent bias
  double pull = 0.2;       // bias magnitude: P(bit | y) = 0.5 +- pull
  double flip_rate = 0.0;  // label noise applied after feature generation
  double background = 0.5; // density of uninformative features
  std::uint64_t seed = 0;
};

struct SyntheticPair {
  BinaryDataset train;
  BinaryDataset test;
};

inline SyntheticPair make_synthetic(const SyntheticSpec& spec) {
  if (spec.informative > spec.num_features)
    throw std::invalid_argument("make_synthetic: more informative features than features");
  SplitMix64 g(spec.seed);
  auto emit = [&](int count) {
    BinaryDataset data;
    data.num_features = spec.num_features;
    data.rows.resize(static_cast<std::size_t>(count));
    data.labels.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const int clean = (g.next() & 1) ? 1 : -1;
      auto& row = data.rows[static_cast<std::size_t>(i)];
      for (int f = 0; f < spec.informative; ++f) {
        // Alternate the pull direction across features so neither class is
        // denser overall.
        const double direction = (f % 2 == 0) ? 1.0 : -1.0;
        const double on = 0.5 + direction * clean * spec.pull;
        if (g.next_double() < on) row.push_back(f);
      }
      for (int f = spec.informative; f < spec.num_features; ++f)
        if (g.next_double() < spec.background) row.push_back(f);
      data.labels[static_cast<std::size_t>(i)] = (g.next_double() < spec.flip_rate) ? -clean : clean;
    }
    return data;
  };
  SyntheticPair pair;
  pair.train = emit(spec.num_train);
  pair.test = emit(spec.num_test);
  return pair;
}

// Deterministic stand-ins for two published datasets, at matching shapes:
// bundled so the boosting experiments run without any downloads. Noise and
// signal strength were fixed once so that stump boosting lands near the
// published error levels; they are ordinary synthetic data otherwise.

// splice shape: 500 train / 500 test, 240 binary features.
inline SyntheticSpec splice_clone_spec() {
  return {.num_train = 500,
          .num_test = 500,
          .num_features = 240,
          .informative = 40,
          .pull = 0.18,
          .flip_rate = 0.03,
          .background = 0.5,
          .seed = 2024};
}

// census shape: 1000 train / 1000 test, 131 binary features.
inline SyntheticSpec census_clone_spec() {
  return {.num_train = 1000,
          .num_test = 1000,
          .num_features = 131,
          .informative = 30,
          .pull = 0.25,
          .flip_rate = 0.13,
          .background = 0.5,
          .seed = 2024};
}

// Loads `<name>.train` / `<name>.test` from the data directory when the user
// has fetched the real files, otherwise falls back to the bundled clone.
struct NamedDataset {
  BinaryDataset train;
  BinaryDataset test;
  bool from_files = false;
};

inline NamedDataset load_or_clone(const std::string& name) {
  const std::string train_path = data_dir() + "/" + name + ".train";
  const std::string test_path = data_dir() + "/" + name + ".test";
  if (std::ifstream(train_path).good() && std::ifstream(test_path).good()) {
    NamedDataset out;
    auto train = parse_libsvm(train_path);
    auto test = parse_libsvm(test_path);
    const int width = std::max(train.data.num_features, test.data.num_features);
    train.data.num_features = width;
    test.data.num_features = width;
    out.train = std::move(train.data);
    out.test = std::move(test.data);
    out.from_files = true;
    return out;
  }
  SyntheticSpec spec;
  if (name == "splice")
    spec = splice_clone_spec();
  else if (name == "census")
    spec = census_clone_spec();
  else
    throw std::runtime_error("no files under " + data_dir() + " and no bundled clone for '" + name + "'");
  auto pair = make_synthetic(spec);
  return {std::move(pair.train), std::move(pair.test), false};
}

// ---------------------------------------------------------------------------
// CSV emission. Fixed schemas; values at 12 significant digits; `config`
// echoed as a leading comment so a run is reproducible from its output alone.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_value(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

}  // namespace detail

// Schema: round,player_loss,regret_best,eps_regret_0.01,eps_regret_0.1,zero_frac,potential_sum
inline void write_hedge_csv(const RunRecord& record, const std::string& path,
                            const std::string& config = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_hedge_csv: cannot open " + path);
  if (!config.empty()) out << "# " << config << '\n';
  out << "round,player_loss,regret_best,eps_regret_0.01,eps_regret_0.1,zero_frac,potential_sum\n";
  std::vector<double> totals(static_cast<std::size_t>(record.num_actions), 0.0);
  double player_total = 0.0;
  for (int t = 1; t <= record.rounds(); ++t) {
    const auto& loss = record.losses[static_cast<std::size_t>(t) - 1];
    for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += loss[i];
    player_total += record.player_losses[static_cast<std::size_t>(t) - 1];
    const double best = *std::min_element(totals.begin(), totals.end());
    out << t << ',' << detail::format_value(record.player_losses[static_cast<std::size_t>(t) - 1]) << ','
        << detail::format_value(player_total - best) << ','
        << detail::format_value(epsilon_regret_totals(totals, player_total, Decimal{1, 100})) << ','
        << detail::format_value(epsilon_regret_totals(totals, player_total, Decimal{1, 10})) << ','
        << detail::format_value(static_cast<double>(record.zero_weight_counts[static_cast<std::size_t>(t) - 1]) /
                                record.num_actions)
        << ',' << detail::format_value(record.potential_sums[static_cast<std::size_t>(t)]) << '\n';
  }
  if (!out) throw std::runtime_error("write_hedge_csv: write failed for " + path);
}

// Schema: round,edge,train_err,test_err,zero_frac
inline void write_boost_csv(const BoostMetrics& metrics, const std::string& path,
                            const std::string& config = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_boost_csv: cannot open " + path);
  if (!config.empty()) out << "# " << config << '\n';
  out << "round,edge,train_err,test_err,zero_frac\n";
  for (std::size_t t = 0; t < metrics.edges.size(); ++t) {
    const double test_err =
        t < metrics.test_errors.size() ? metrics.test_errors[t] : std::numeric_limits<double>::quiet_NaN();
    out << (t + 1) << ',' << detail::format_value(metrics.edges[t]) << ','
        << detail::format_value(metrics.train_errors[t]) << ',' << detail::format_value(test_err) << ','
        << detail::format_value(metrics.zero_fractions[t]) << '\n';
  }
  if (!out) throw std::runtime_error("write_boost_csv: write failed for " + path);
}

// Schema: example,margin
inline void write_margins_csv(const std::vector<double>& margin_values, const std::string& path,
                              const std::string& config = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_margins_csv: cannot open " + path);
  if (!config.empty()) out << "# " << config << '\n';
  out << "example,margin\n";
  for (std::size_t i = 0; i < margin_values.size(); ++i)
    out << (i + 1) << ',' << detail::format_value(margin_values[i]) << '\n';
  if (!out) throw std::runtime_error("write_margins_csv: write failed for " + path);
}

struct CsvContent {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvContent read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  CsvContent content;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      content.comments.push_back(line.substr(line.find_first_not_of("# ")));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      content.header = cells;
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(c.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                        : std::stod(c));
    content.rows.push_back(std::move(row));
  }
  return content;
}

}  // namespace dgames
