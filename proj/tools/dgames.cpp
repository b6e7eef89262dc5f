// dgames: drifting-game online learning experiments from the command line.
//
// Subcommands: hedge, bandit, oco, boost, verify, summarize. Every run is
// fully determined by its flags (echoed into the CSV header), so identical
// configs give byte-identical output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dgames/bandit.hpp"
#include "dgames/boosting.hpp"
#include "dgames/dataio.hpp"
#include "dgames/drift_sim.hpp"
#include "dgames/hedge.hpp"
#include "dgames/oco.hpp"
#include "dgames/potentials.hpp"
#include "dgames/verify.hpp"

namespace {

using namespace dgames;

constexpr int kExitOk = 0;
constexpr int kExitRuntimeViolation = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

HedgeRule rule_from_name(const std::string& algo, double eta, double d) {
  if (algo == "exp") return PotentialFamily{ExpPotential{eta, 0.0}};
  if (algo == "2norm") return PotentialFamily{TwoNormPotential{}};
  if (algo == "nhdt") return PotentialFamily{NormalHedgeDTPotential{1.0, d}};
  if (algo == "nh") return NormalHedgeRule{};
  throw CLI::ValidationError("--algo", "unknown algorithm '" + algo + "'");
}

// eps-regret bound where one exists; used only for the summary line.
std::optional<double> bound_for(const std::string& algo, double eta_used, int T, double eps, double d) {
  if (algo == "exp") return regret_bound(PotentialFamily{ExpPotential{eta_used, 0.0}}, T, eps);
  if (algo == "2norm") return regret_bound(PotentialFamily{TwoNormPotential{}}, T, eps);
  if (algo == "nhdt") return regret_bound(PotentialFamily{NormalHedgeDTPotential{1.0, d}}, T, eps);
  return std::nullopt;
}

// Nonincrease check used by the runtime assertion paths (exit code 1).
std::optional<int> first_trace_increase(const std::vector<double>& sums) {
  for (std::size_t t = 1; t < sums.size(); ++t) {
    if (std::isnan(sums[t]) || std::isnan(sums[t - 1])) continue;
    if (sums[t] > sums[t - 1] + 1e-8 * std::max(1.0, std::fabs(sums[t - 1])))
      return static_cast<int>(t);
  }
  return std::nullopt;
}

int run_hedge_command(const std::string& algo, int N, int T, const std::string& adversary,
                      std::uint64_t seed, const std::string& eps_list, const std::string& eta_text,
                      double d, const std::string& out_path) {
  double eta = 0.0;
  const auto eps_strings = split_list(eps_list);
  if (algo == "exp") {
    if (eta_text == "auto") {
      // Tune for the horizon and the first epsilon in the list.
      const Decimal eps0 = parse_decimal(eps_strings.empty() ? "0.01" : eps_strings.front());
      const double eps_value = static_cast<double>(eps0.num) / static_cast<double>(eps0.den);
      eta = std::sqrt(2.0 * std::log(1.0 / eps_value) / T);
    } else {
      eta = std::stod(eta_text);
    }
  }
  const HedgeRule rule = rule_from_name(algo, eta, d);
  const auto stream = synth_loss_stream(parse_stream_kind(adversary), N, T, seed);
  const auto record = run_hedge(rule, stream, T, N);

  std::ostringstream config;
  config << "dgames hedge --algo " << algo << " --N " << N << " --T " << T << " --adversary "
         << adversary << " --seed " << seed << " --eps " << eps_list;
  if (algo == "exp") config << " --eta " << eta;
  if (!out_path.empty()) write_hedge_csv(record, out_path, config.str());

  const auto totals = record.action_totals();
  const double player_total = record.player_total();
  std::cout << "hedge algo=" << algo << " N=" << N << " T=" << T
            << " player_loss=" << detail::format_value(player_total);
  for (const auto& eps_text : eps_strings) {
    const Decimal eps = parse_decimal(eps_text);
    std::cout << " eps_regret[" << eps_text
              << "]=" << detail::format_value(epsilon_regret_totals(totals, player_total, eps));
    if (const auto bound = bound_for(algo, eta, T, static_cast<double>(eps.num) / eps.den, d))
      std::cout << " (bound " << detail::format_value(*bound) << ")";
  }
  std::cout << '\n';

  if (const auto round = first_trace_increase(record.potential_sums)) {
    std::cerr << "potential-sum trace increased at round " << *round << "\n";
    return kExitRuntimeViolation;
  }
  return kExitOk;
}

int run_bandit_command(int N, int T, const std::string& eta_text, const std::string& adversary,
                       std::uint64_t seed, const std::string& out_path,
                       const std::string& experimental_rule) {
  const double eta = eta_text == "auto" ? bandit_auto_eta(T, N) : std::stod(eta_text);
  const auto hedge_stream = synth_loss_stream(parse_stream_kind(adversary), N, T, seed);
  const HiddenLossFn hidden = [&](int round, const WeightVector& p) { return hedge_stream(round, p); };

  BanditRunRecord record;
  if (experimental_rule.empty()) {
    record = run_bandit(eta, hidden, T, N, seed);
  } else {
    // No regret statement attaches to non-EXP potentials; exposed for study.
    const HedgeRule rule = rule_from_name(experimental_rule, eta, 3.0);
    record = run_bandit_general(std::get<PotentialFamily>(rule), hidden, T, N, seed);
  }

  std::ostringstream config;
  config << "dgames bandit --N " << N << " --T " << T << " --eta " << eta << " --adversary " << adversary
         << " --seed " << seed;
  if (!experimental_rule.empty()) config << " --experimental-rule " << experimental_rule;

  if (!out_path.empty()) {
    // Reuse the hedge schema: the sampled loss is the player loss and the
    // EXP3 potential sum is the trace.
    RunRecord view;
    view.num_actions = N;
    view.losses = record.hidden;
    view.player_losses.assign(record.observed.begin(), record.observed.end());
    view.zero_weight_counts.assign(record.observed.size(), 0);
    view.potential_sums = record.potential_sums;
    if (view.potential_sums.empty())
      view.potential_sums.assign(record.observed.size() + 1, std::numeric_limits<double>::quiet_NaN());
    write_hedge_csv(view, out_path, config.str());
  }

  std::cout << "bandit N=" << N << " T=" << T << " eta=" << detail::format_value(eta)
            << " realized_regret=" << detail::format_value(record.regret_to_best());
  if (experimental_rule.empty()) {
    const double bound =
        std::sqrt(2.0 * T * (1.0 + N * std::sqrt(std::exp(1.0))) * std::log(static_cast<double>(N)));
    std::cout << " (expected-regret bound " << detail::format_value(bound) << ")";
  }
  std::cout << '\n';
  return kExitOk;
}

int run_oco_command(const std::string& rule_name, int resolution, int dim, int T,
                    const std::string& stream_name, std::uint64_t seed, double d,
                    const std::string& out_path) {
  const HedgeRule rule = rule_from_name(rule_name, rule_name == "exp" ? std::sqrt(2.0 * std::log(1.0 / 0.01) / T) : 0.0, d);
  std::vector<std::pair<double, double>> bounds(static_cast<std::size_t>(dim), {0.0, 1.0});
  const auto domain = discretize_box(bounds, resolution);

  OracleStream stream;
  if (stream_name == "quadratic") {
    stream = [seed, dim](int round) -> LossOracle {
      SplitMix64 g(mix_seed(seed, static_cast<std::uint64_t>(round)));
      std::vector<double> center(static_cast<std::size_t>(dim));
      for (double& c : center) c = g.next_double();
      return [center, dim](std::span<const double> x) {
        double acc = 0.0;
        for (int a = 0; a < dim; ++a) acc += (x[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)]) * (x[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)]);
        return acc / dim;  // keep the range inside [0,1]
      };
    };
  } else if (stream_name == "constant") {
    stream = [](int) -> LossOracle { return [](std::span<const double>) { return 0.5; }; };
  } else {
    throw CLI::ValidationError("--stream", "unknown stream '" + stream_name + "'");
  }

  const auto record = run_oco(rule, domain, stream, T);

  std::ostringstream config;
  config << "dgames oco --rule " << rule_name << " --resolution " << resolution << " --dim " << dim
         << " --T " << T << " --stream " << stream_name << " --seed " << seed;
  if (!out_path.empty()) {
    RunRecord view;
    view.num_actions = record.num_points;
    view.losses = record.point_losses;
    view.player_losses = record.prediction_losses;
    view.zero_weight_counts = record.zero_weight_counts;
    view.potential_sums = record.potential_sums;
    write_hedge_csv(view, out_path, config.str());
  }

  std::cout << "oco rule=" << rule_name << " M=" << record.num_points << " T=" << T
            << " grid_spacing=" << detail::format_value(record.grid_spacing)
            << " player_loss=" << detail::format_value(record.player_total());
  for (double eps : {0.01, 0.1}) {
    std::cout << " eps_regret[" << eps << "]=" << detail::format_value(oco_epsilon_regret(record, eps));
  }
  std::cout << '\n';

  for (std::size_t t = 0; t < record.jensen_slacks.size(); ++t) {
    if (record.jensen_slacks[t] < -1e-10) {
      std::cerr << "Jensen slack negative at round " << (t + 1) << "\n";
      return kExitRuntimeViolation;
    }
  }
  if (const auto round = first_trace_increase(record.potential_sums)) {
    std::cerr << "potential-sum trace increased at round " << *round << "\n";
    return kExitRuntimeViolation;
  }
  return kExitOk;
}

BoostAlgo algo_from_name(const std::string& name) {
  if (name == "nhboost-dt" || name == "nhboostdt") return BoostAlgo::NHBoostDT;
  if (name == "nhboost" || name == "nh") return BoostAlgo::NHBoost;
  if (name == "adaboost" || name == "ada") return BoostAlgo::AdaBoost;
  throw CLI::ValidationError("--algo", "unknown boosting algorithm '" + name + "'");
}

int run_boost_command(const std::string& algo_name, const std::string& data_arg,
                      const std::string& test_arg, int rounds, const std::string& out_path,
                      const std::string& margins_path, const std::string& model_path) {
  const BoostAlgo algo = algo_from_name(algo_name);

  BinaryDataset train, test;
  bool have_test = false;
  std::string source;
  if (!test_arg.empty() || std::ifstream(data_arg).good() ||
      std::ifstream(data_dir() + "/" + data_arg).good()) {
    auto parsed_train = parse_libsvm(resolve_dataset_path(data_arg));
    for (const auto& w : parsed_train.warnings) std::cerr << "note: " << data_arg << ": " << w << "\n";
    train = std::move(parsed_train.data);
    source = "files";
    if (!test_arg.empty()) {
      auto parsed_test = parse_libsvm(resolve_dataset_path(test_arg));
      for (const auto& w : parsed_test.warnings) std::cerr << "note: " << test_arg << ": " << w << "\n";
      test = std::move(parsed_test.data);
      const int width = std::max(train.num_features, test.num_features);
      train.num_features = width;
      test.num_features = width;
      have_test = true;
    }
  } else {
    // A bare dataset name: real files when present, bundled clone otherwise.
    auto named = load_or_clone(data_arg);
    train = std::move(named.train);
    test = std::move(named.test);
    have_test = true;
    source = named.from_files ? "files" : "bundled clone";
  }

  const auto result = run_boosting(algo, train, have_test ? &test : nullptr, rounds);

  std::ostringstream config;
  config << "dgames boost --algo " << algo_name << " --data " << data_arg;
  if (!test_arg.empty()) config << " --test " << test_arg;
  config << " --rounds " << rounds << " (source: " << source << ")";
  if (!out_path.empty()) write_boost_csv(result.metrics, out_path, config.str());
  if (!margins_path.empty()) write_margins_csv(margins(result.model, train), margins_path, config.str());
  if (!model_path.empty()) save_model(result.model, model_path);

  std::printf("%-10s %-9s zeros%%=%-6.1f train%%=%-6.2f test%%=%-6.2f seconds=%.3f\n", data_arg.c_str(),
              boost_algo_name(algo), 100.0 * result.metrics.mean_zero_fraction(),
              100.0 * result.metrics.final_train_error(),
              have_test ? 100.0 * result.metrics.final_test_error() : std::nan(""),
              result.metrics.total_seconds());
  return kExitOk;
}

int run_verify_command(const std::string& suite) {
  std::vector<VerifyResult> results;
  if (suite == "potentials") {
    results = verify_potentials_suite();
  } else if (suite == "conversions") {
    results = verify_conversions_suite();
  } else if (suite == "all") {
    results = verify_potentials_suite();
    for (auto& r : verify_conversions_suite()) results.push_back(std::move(r));
  } else {
    throw CLI::ValidationError("--suite", "unknown suite '" + suite + "'");
  }
  bool all_ok = true;
  for (const auto& r : results) {
    std::printf("[%s] %s (%s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    all_ok = all_ok && r.passed;
  }
  return all_ok ? kExitOk : kExitRuntimeViolation;
}

int run_summarize_command(const std::vector<std::string>& paths) {
  std::printf("%-12s %-10s %-12s %-12s\n", "algo", "zeros(%)", "train_err(%)", "test_err(%)");
  for (const auto& path : paths) {
    const auto csv = read_csv(path);
    if (csv.rows.empty()) continue;
    std::string algo = "?";
    for (const auto& comment : csv.comments) {
      const auto pos = comment.find("--algo ");
      if (pos != std::string::npos) {
        std::istringstream rest(comment.substr(pos + 7));
        rest >> algo;
      }
    }
    double zeros = 0.0;
    for (const auto& row : csv.rows) zeros += row[4];
    zeros /= static_cast<double>(csv.rows.size());
    const auto& last = csv.rows.back();
    std::printf("%-12s %-10.1f %-12.2f %-12.2f\n", algo.c_str(), 100.0 * zeros, 100.0 * last[2],
                100.0 * last[3]);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drifting-game online learning experiments"};
  app.require_subcommand(1);

  // hedge
  auto* hedge = app.add_subcommand("hedge", "full-information Hedge run");
  std::string hedge_algo = "nhdt", hedge_adversary = "random", hedge_eps = "0.01,0.1";
  std::string hedge_eta = "auto", hedge_out;
  int hedge_N = 100, hedge_T = 1000;
  double hedge_d = 3.0;
  std::uint64_t hedge_seed = 1;
  hedge->add_option("--algo", hedge_algo, "exp | 2norm | nhdt | nh");
  hedge->add_option("--N", hedge_N, "number of actions")->check(CLI::PositiveNumber);
  hedge->add_option("--T", hedge_T, "rounds")->check(CLI::NonNegativeNumber);
  hedge->add_option("--adversary", hedge_adversary, "random | adversarial | constant");
  hedge->add_option("--seed", hedge_seed, "stream seed");
  hedge->add_option("--eps", hedge_eps, "comma-separated decimal epsilons");
  hedge->add_option("--eta", hedge_eta, "EXP learning rate, or 'auto'");
  hedge->add_option("--d", hedge_d, "NormalHedge.DT exponent constant (>= 3)");
  hedge->add_option("--out", hedge_out, "CSV output path");

  // bandit
  auto* bandit = app.add_subcommand("bandit", "EXP3 bandit run");
  std::string bandit_eta = "auto", bandit_adversary = "random", bandit_out, bandit_rule;
  int bandit_N = 10, bandit_T = 10000;
  std::uint64_t bandit_seed = 1;
  bandit->add_option("--N", bandit_N, "number of arms")->check(CLI::PositiveNumber);
  bandit->add_option("--T", bandit_T, "rounds")->check(CLI::NonNegativeNumber);
  bandit->add_option("--eta", bandit_eta, "learning rate, or 'auto'");
  bandit->add_option("--adversary", bandit_adversary, "random | adversarial | constant");
  bandit->add_option("--seed", bandit_seed, "run seed");
  bandit->add_option("--out", bandit_out, "CSV output path");
  bandit->add_option("--experimental-rule", bandit_rule,
                     "run the general recipe with another potential (no bound claims)");

  // oco
  auto* oco = app.add_subcommand("oco", "online convex optimization on a grid");
  std::string oco_rule = "nhdt", oco_stream = "quadratic", oco_out;
  int oco_resolution = 1001, oco_dim = 1, oco_T = 1000;
  double oco_d = 3.0;
  std::uint64_t oco_seed = 1;
  oco->add_option("--rule", oco_rule, "exp | 2norm | nhdt | nh");
  oco->add_option("--resolution", oco_resolution, "grid points per axis")->check(CLI::Range(2, 200001));
  oco->add_option("--dim", oco_dim, "domain dimension (1..3)")->check(CLI::Range(1, 3));
  oco->add_option("--T", oco_T, "rounds")->check(CLI::NonNegativeNumber);
  oco->add_option("--stream", oco_stream, "quadratic | constant");
  oco->add_option("--seed", oco_seed, "stream seed");
  oco->add_option("--d", oco_d, "NormalHedge.DT exponent constant");
  oco->add_option("--out", oco_out, "CSV output path");

  // boost
  auto* boost = app.add_subcommand("boost", "boosting with decision stumps");
  std::string boost_algo = "nhboost-dt", boost_data, boost_test, boost_out, boost_margins, boost_model;
  int boost_rounds = 200;
  boost->add_option("--algo", boost_algo, "nhboost-dt | nhboost | adaboost");
  boost->add_option("--data", boost_data, "train file, or dataset name (splice, census)")->required();
  boost->add_option("--test", boost_test, "test file");
  boost->add_option("--rounds", boost_rounds, "boosting rounds")->check(CLI::PositiveNumber);
  boost->add_option("--out", boost_out, "per-round CSV output path");
  boost->add_option("--margins-out", boost_margins, "margins CSV output path");
  boost->add_option("--model-out", boost_model, "model file output path");

  // verify
  auto* verify = app.add_subcommand("verify", "run the inequality verification suites");
  std::string verify_suite = "potentials";
  verify->add_option("--suite", verify_suite, "potentials | conversions | all");

  // summarize
  auto* summarize = app.add_subcommand("summarize", "tabulate boosting CSVs");
  std::vector<std::string> summarize_paths;
  summarize->add_option("files", summarize_paths, "boost CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (hedge->parsed())
      return run_hedge_command(hedge_algo, hedge_N, hedge_T, hedge_adversary, hedge_seed, hedge_eps,
                               hedge_eta, hedge_d, hedge_out);
    if (bandit->parsed())
      return run_bandit_command(bandit_N, bandit_T, bandit_eta, bandit_adversary, bandit_seed, bandit_out,
                                bandit_rule);
    if (oco->parsed())
      return run_oco_command(oco_rule, oco_resolution, oco_dim, oco_T, oco_stream, oco_seed, oco_d,
                             oco_out);
    if (boost->parsed())
      return run_boost_command(boost_algo, boost_data, boost_test, boost_rounds, boost_out, boost_margins,
                               boost_model);
    if (verify->parsed()) return run_verify_command(verify_suite);
    if (summarize->parsed()) return run_summarize_command(summarize_paths);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeViolation;
  }
  return kExitUsage;
}
