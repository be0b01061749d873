// Command-line front door: dataset generation, verification runs, bound
// calculators, Monte Carlo soundness studies, and report rendering.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration/usage error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "nodata/datagen.hpp"
#include "nodata/engine.hpp"
#include "nodata/errors.hpp"
#include "nodata/external.hpp"
#include "nodata/rubric_io.hpp"
#include "nodata/study.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct GenArgs {
  std::string rubric = "ip";
  std::size_t size = 498;
  std::size_t bits = 10;
  bool balanced = false;
  std::uint64_t seed = 0;
  std::string out;
};

struct RunArgs {
  std::string config_path;
  std::string dataset;
  std::string rubric = "ip";
  std::string evaluator = "oracle";
  int rounds = 3;
  double phi = 0.5;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string policy = "strict";
  double epsilon = 0.25;
  std::string witnesses = "all_windows";
  bool one_directional = false;
  std::string out;
  std::string transcripts;
};

struct BoundsArgs {
  int rounds = 3;
  std::optional<double> alpha;
  double phi = 0.5;
};

struct MonteCarloArgs {
  std::string profile = "pure_cheat";
  std::string rubric = "ip";
  int rmin = 1;
  int rmax = 4;
  int trials = 10000;
  std::uint64_t seed = 0;
  std::size_t bits = 10;
  std::size_t corpus = 498;
  std::string out;
};

nodata::DistancePolicy parse_policy(const std::string& name, double epsilon) {
  nodata::DistancePolicy policy;
  if (name == "strict") {
    policy.mode = nodata::DistancePolicy::Mode::strict_equality;
  } else if (name == "hamming") {
    policy.mode = nodata::DistancePolicy::Mode::metric;
    policy.epsilon = epsilon;
  } else if (name == "discrete") {
    policy.mode = nodata::DistancePolicy::Mode::metric;
    policy.epsilon = epsilon;
    policy.metric = nodata::discrete_distance;
  } else {
    throw nodata::ConfigError("unknown distance policy \"" + name + "\"");
  }
  return policy;
}

nodata::PatternWitnessMode parse_witnesses(const std::string& name) {
  if (name == "all_windows") return nodata::PatternWitnessMode::all_windows;
  if (name == "matching_only") return nodata::PatternWitnessMode::matching_only;
  if (name == "off") return nodata::PatternWitnessMode::off;
  throw nodata::ConfigError("unknown witness mode \"" + name + "\"");
}

/// Returns true when the file supplied a seed.
bool load_run_config(const std::string& path, RunArgs& args) {
  std::ifstream in(path);
  if (!in) throw nodata::ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw nodata::FormatError("config file " + path + ": " + e.what());
  }
  if (j.contains("dataset")) args.dataset = j.at("dataset").get<std::string>();
  if (j.contains("rubric")) args.rubric = j.at("rubric").get<std::string>();
  if (j.contains("evaluator")) args.evaluator = j.at("evaluator").get<std::string>();
  if (j.contains("rounds")) args.rounds = j.at("rounds").get<int>();
  if (j.contains("phi")) args.phi = j.at("phi").get<double>();
  if (j.contains("seed")) args.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("workers")) args.workers = j.at("workers").get<int>();
  if (j.contains("policy")) args.policy = j.at("policy").get<std::string>();
  if (j.contains("epsilon")) args.epsilon = j.at("epsilon").get<double>();
  if (j.contains("witnesses")) args.witnesses = j.at("witnesses").get<std::string>();
  if (j.contains("one_directional")) args.one_directional = j.at("one_directional").get<bool>();
  if (j.contains("out")) args.out = j.at("out").get<std::string>();
  if (j.contains("transcripts")) args.transcripts = j.at("transcripts").get<std::string>();
  return j.contains("seed");
}

int cmd_gen(const GenArgs& args) {
  nodata::Rubric rubric = nodata::resolve_rubric(args.rubric);
  nodata::DatasetSpec spec;
  spec.rubric_id = rubric.id();
  spec.size = args.size;
  spec.bit_length = args.bits;
  spec.balanced = args.balanced;
  spec.seed = args.seed;
  const nodata::LabelledDataset dataset = nodata::generate_dataset(rubric, spec);
  nodata::write_dataset(dataset, args.out);
  std::cout << "wrote " << dataset.size() << " rows to " << args.out << "\n";
  return kExitOk;
}

int cmd_run(const RunArgs& args) {
  if (args.dataset.empty()) throw nodata::ConfigError("run needs --dataset (or a config file)");
  nodata::Rubric rubric = nodata::resolve_rubric(args.rubric);
  const nodata::LabelledDataset dataset = nodata::read_dataset_csv(args.dataset);

  nodata::AlgoConfig cfg;
  cfg.rounds = args.rounds;
  cfg.phi = args.phi;
  cfg.seed = args.seed;
  cfg.workers = args.workers;
  cfg.policy = parse_policy(args.policy, args.epsilon);
  cfg.options.witnesses.pattern_mode = parse_witnesses(args.witnesses);
  cfg.options.symmetric_challenge1 = !args.one_directional;

  nodata::AggregatorSpec sigma;
  const nodata::EvaluatorProfile profile =
      nodata::make_profile(args.evaluator, rubric, sigma, dataset.xs, args.seed, cfg.options);

  if (args.evaluator.starts_with("external:")) {
    // Health check so a command that cannot speak the wire protocol fails
    // loudly instead of producing an all-failed report.
    nodata::Rng probe_rng(0);
    if (!profile.label(dataset.xs.front(), probe_rng).has_value()) {
      std::cerr << "external evaluator failed its health check: " << args.evaluator << "\n";
      return kExitRuntime;
    }
  }

  nodata::RunReport report = nodata::run_no_data(dataset.xs, profile, rubric, cfg, dataset.labels);

  nlohmann::ordered_json echo;
  echo["dataset"] = args.dataset;
  echo["rubric"] = rubric.id();
  echo["evaluator"] = args.evaluator;
  echo["rounds"] = args.rounds;
  echo["phi"] = args.phi;
  echo["policy"] = args.policy;
  echo["epsilon"] = args.epsilon;
  echo["witnesses"] = args.witnesses;
  echo["symmetric_challenge1"] = !args.one_directional;
  echo["workers"] = args.workers;
  report.config_echo = std::move(echo);

  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw nodata::ConfigError("cannot write report to " + args.out);
    out << nodata::report_to_json(report).dump(2) << '\n';
  }
  if (!args.transcripts.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.records.size(); ++i) {
      nlohmann::ordered_json e;
      e["x"] = report.records[i].x.str();
      e["rounds"] = nodata::transcript_to_json(report.transcripts[i]);
      arr.push_back(std::move(e));
    }
    std::ofstream out(args.transcripts, std::ios::binary);
    if (!out) throw nodata::ConfigError("cannot write transcripts to " + args.transcripts);
    out << arr.dump(2) << '\n';
  }

  std::cout << nodata::render_report_table(report);
  return kExitOk;
}

int cmd_bounds(const BoundsArgs& args) {
  std::cout << "lemma_bound(r=" << args.rounds << ") = "
            << std::setprecision(std::numeric_limits<double>::max_digits10)
            << nodata::lemma_bound(args.rounds) << "\n";
  if (args.alpha) {
    nodata::BoundInputs b{*args.alpha, args.phi, args.rounds};
    std::cout << std::setprecision(6) << "theorem_bound(alpha=" << *args.alpha
              << ", phi=" << args.phi << ", r=" << args.rounds << ") = "
              << std::setprecision(std::numeric_limits<double>::max_digits10)
              << nodata::theorem_bound(b) << "\n";
  }
  return kExitOk;
}

int cmd_montecarlo(const MonteCarloArgs& args) {
  if (args.rmin < 1 || args.rmax < args.rmin) {
    throw nodata::ConfigError("need 1 <= rmin <= rmax");
  }
  nodata::Rubric rubric = nodata::resolve_rubric(args.rubric);
  nodata::DecayStudyConfig cfg;
  cfg.profile = args.profile;
  cfg.rubric_id = rubric.id();
  cfg.rounds_sweep.clear();
  for (int r = args.rmin; r <= args.rmax; ++r) cfg.rounds_sweep.push_back(r);
  cfg.trials = args.trials;
  cfg.seed = args.seed;
  cfg.bits = args.bits;
  cfg.corpus_size = args.corpus;

  const nodata::DecayStudy study = nodata::run_decay_study(rubric, cfg);
  const nlohmann::ordered_json j = nodata::study_to_json(study);
  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw nodata::ConfigError("cannot write study to " + args.out);
    out << j.dump(2) << '\n';
  }
  std::cout << j.dump(2) << "\n";
  if (!study.monotone_decay) {
    std::cerr << "success rates did not decay monotonically\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_report(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) throw nodata::ConfigError("cannot open report " + in_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw nodata::FormatError("report file " + in_path + ": " + e.what());
  }
  std::cout << nodata::render_report_table(nodata::report_from_json(j));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluator trust verification without labelled references"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a labelled synthetic dataset");
  gen->add_option("--rubric", gen_args.rubric, "Built-in rubric name or rubric file");
  gen->add_option("--size", gen_args.size, "Number of datapoints");
  gen->add_option("--bits", gen_args.bits, "Bits per datapoint");
  gen->add_flag("--balanced", gen_args.balanced, "Exactly size/2 datapoints per label");
  gen->add_option("--seed", gen_args.seed, "Master seed")->required();
  gen->add_option("--out", gen_args.out, "Output CSV path")->required();

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run the verification loop over a dataset");
  run->add_option("--config", run_args.config_path, "JSON experiment config (flags override)");
  run->add_option("--dataset", run_args.dataset, "Dataset CSV");
  run->add_option("--rubric", run_args.rubric, "Built-in rubric name or rubric file");
  run->add_option("--evaluator", run_args.evaluator,
                  "oracle | lie1 | lie2 | lie3:p | noisy:p | coupled:p | pure_cheat | "
                  "external:command");
  run->add_option("--rounds", run_args.rounds, "EV rounds per datapoint");
  run->add_option("--phi", run_args.phi, "Flip probability on failure");
  auto* run_seed = run->add_option("--seed", run_args.seed, "Master seed");
  run->add_option("--workers", run_args.workers, "Parallel sessions");
  run->add_option("--policy", run_args.policy, "strict | hamming | discrete");
  run->add_option("--epsilon", run_args.epsilon, "Distance threshold for metric policies");
  run->add_option("--witnesses", run_args.witnesses, "all_windows | matching_only | off");
  run->add_flag("--one-directional", run_args.one_directional,
                "Use the one-directional witness check");
  run->add_option("--out", run_args.out, "Report JSON path");
  run->add_option("--transcripts", run_args.transcripts, "Transcript JSON path");

  BoundsArgs bounds_args;
  CLI::App* bounds = app.add_subcommand("bounds", "Print the closed-form bounds");
  bounds->add_option("--r", bounds_args.rounds, "Rounds");
  double alpha_in = -1.0;
  auto* alpha_opt = bounds->add_option("--alpha", alpha_in, "Evaluator accuracy");
  bounds->add_option("--phi", bounds_args.phi, "Flip probability");

  MonteCarloArgs mc_args;
  CLI::App* mc = app.add_subcommand("montecarlo", "Empirical soundness decay study");
  mc->add_option("--profile", mc_args.profile, "Evaluator descriptor");
  mc->add_option("--rubric", mc_args.rubric, "Built-in rubric name or rubric file");
  mc->add_option("--rmin", mc_args.rmin, "First round count");
  mc->add_option("--rmax", mc_args.rmax, "Last round count");
  mc->add_option("--trials", mc_args.trials, "Sessions per round count (>= 1000)");
  mc->add_option("--seed", mc_args.seed, "Master seed")->required();
  mc->add_option("--bits", mc_args.bits, "Bits per datapoint");
  mc->add_option("--corpus", mc_args.corpus, "Corpus size");
  mc->add_option("--out", mc_args.out, "Study JSON path");

  std::string report_in;
  CLI::App* report = app.add_subcommand("report", "Re-render a run report table");
  report->add_option("--in", report_in, "Report JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_args);
    if (run->parsed()) {
      bool seed_given = run_seed->count() > 0;
      if (!run_args.config_path.empty()) {
        RunArgs from_file;
        const bool file_seed = load_run_config(run_args.config_path, from_file);
        // Flags given on the command line win over the file.
        if (run_args.dataset.empty()) run_args.dataset = from_file.dataset;
        if (run->count("--rubric") == 0) run_args.rubric = from_file.rubric;
        if (run->count("--evaluator") == 0) run_args.evaluator = from_file.evaluator;
        if (run->count("--rounds") == 0) run_args.rounds = from_file.rounds;
        if (run->count("--phi") == 0) run_args.phi = from_file.phi;
        if (!seed_given && file_seed) {
          run_args.seed = from_file.seed;
          seed_given = true;
        }
        if (run->count("--workers") == 0) run_args.workers = from_file.workers;
        if (run->count("--policy") == 0) run_args.policy = from_file.policy;
        if (run->count("--epsilon") == 0) run_args.epsilon = from_file.epsilon;
        if (run->count("--witnesses") == 0) run_args.witnesses = from_file.witnesses;
        if (run->count("--out") == 0 && run_args.out.empty()) run_args.out = from_file.out;
        if (run_args.transcripts.empty()) run_args.transcripts = from_file.transcripts;
      }
      if (!seed_given) {
        std::cerr << "run requires --seed (implicit clock seeds are not allowed)\n";
        return kExitConfig;
      }
      return cmd_run(run_args);
    }
    if (bounds->parsed()) {
      if (alpha_opt->count() > 0) bounds_args.alpha = alpha_in;
      return cmd_bounds(bounds_args);
    }
    if (mc->parsed()) return cmd_montecarlo(mc_args);
    if (report->parsed()) return cmd_report(report_in);
  } catch (const nodata::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nodata::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
