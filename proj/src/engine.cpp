#include "nodata/engine.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "nodata/errors.hpp"

namespace nodata {

RunReport run_no_data(const std::vector<BitString>& dataset, const EvaluatorProfile& evaluator,
                      const Rubric& rubric, const AlgoConfig& cfg,
                      const std::optional<std::vector<int>>& truth) {
  if (dataset.empty()) throw ConfigError("dataset must be non-empty");
  if (cfg.rounds < 1) throw ConfigError("rounds must be >= 1");
  if (cfg.phi < 0.0 || cfg.phi > 1.0) throw ConfigError("phi must be in [0, 1]");
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  if (!evaluator.rubric_id().empty() && evaluator.rubric_id() != rubric.id()) {
    throw ConfigError("evaluator \"" + evaluator.descriptor() + "\" was built for rubric \"" +
                      evaluator.rubric_id() + "\" but the run uses \"" + rubric.id() + "\"");
  }
  if (truth && truth->size() != dataset.size()) {
    throw ConfigError("truth labels must match the dataset size");
  }

  const EvProtocol protocol(rubric, cfg.policy, cfg.options);

  RunReport report;
  report.seed = cfg.seed;
  report.records.resize(dataset.size());
  report.transcripts.resize(dataset.size());

  auto run_one = [&](std::size_t i) {
    const std::uint64_t session_seed = Rng::mix(cfg.seed, i);
    EvOutcome out = protocol.run(dataset[i], evaluator, cfg.rounds, session_seed);

    DatapointRecord rec;
    rec.x = dataset[i];
    rec.predicted = out.revealed_label;
    rec.success = out.success;
    if (!out.success) {
      Rng flip_rng(Rng::mix(session_seed, StreamTag::flip));
      if (flip_rng.bernoulli(cfg.phi)) {
        rec.predicted = 1 - rec.predicted;
        rec.flipped = true;
      }
    }
    report.records[i] = std::move(rec);
    report.transcripts[i] = std::move(out);
  };

  if (cfg.workers == 1) {
    for (std::size_t i = 0; i < dataset.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min<std::size_t>(cfg.workers, dataset.size());
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= dataset.size()) return;
          run_one(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::size_t successes = 0, flips = 0;
  for (const auto& r : report.records) {
    successes += r.success ? 1 : 0;
    flips += r.flipped ? 1 : 0;
  }
  report.success_rate = static_cast<double>(successes) / dataset.size();
  report.flip_rate = static_cast<double>(flips) / dataset.size();
  report.total_sessions = static_cast<long>(dataset.size());

  if (truth) {
    std::vector<int> preds;
    preds.reserve(report.records.size());
    for (const auto& r : report.records) preds.push_back(r.predicted);
    const Metrics m = compute_metrics(preds, *truth);
    report.accuracy = m.accuracy;
    report.f1 = m.f1;
  }
  return report;
}

double lemma_bound(int rounds) {
  if (rounds < 0) throw ConfigError("rounds must be >= 0");
  return std::ldexp(1.0, -2 * rounds);  // 4^-r, exact in binary floating point
}

double theorem_bound(const BoundInputs& b) {
  if (b.alpha < 0.0 || b.alpha > 1.0) throw ConfigError("alpha must be in [0, 1]");
  if (b.phi < 0.0 || b.phi > 1.0) throw ConfigError("phi must be in [0, 1]");
  // phi = 0 collapses to the raw accuracy; returning it directly keeps the
  // degenerate case exact instead of round-tripping through 1 - (1 - alpha).
  if (b.phi == 0.0) {
    (void)lemma_bound(b.rounds);  // still validate rounds
    return b.alpha;
  }
  return 1.0 - (1.0 - b.alpha) * (1.0 - b.phi + b.phi * lemma_bound(b.rounds));
}

namespace {

double f1_for_class(const std::vector<int>& predictions, const std::vector<int>& truth,
                    int positive) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_pos = predictions[i] == positive;
    const bool true_pos = truth[i] == positive;
    if (pred_pos && true_pos) ++tp;
    if (pred_pos && !true_pos) ++fp;
    if (!pred_pos && true_pos) ++fn;
  }
  const double precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  const double recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

Metrics compute_metrics(const std::vector<int>& predictions, const std::vector<int>& truth,
                        bool macro_f1) {
  if (predictions.empty() || predictions.size() != truth.size()) {
    throw ConfigError("predictions and truth must be non-empty and of equal length");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truth[i]) ++correct;
  }
  Metrics m;
  m.accuracy = static_cast<double>(correct) / predictions.size();
  m.f1 = macro_f1 ? 0.5 * (f1_for_class(predictions, truth, 1) + f1_for_class(predictions, truth, 0))
                  : f1_for_class(predictions, truth, 1);
  return m;
}

KaryReport run_kary(const std::vector<BitString>& dataset, const KaryFamily& family, int k,
                    const AlgoConfig& cfg) {
  if (k < 2) throw ConfigError("k-ary labelling requires k >= 2");
  if (family.pass_rubrics.size() != static_cast<std::size_t>(k - 1) ||
      family.pass_evaluators.size() != static_cast<std::size_t>(k - 1)) {
    throw ConfigError("k-ary family must supply exactly k-1 rubrics and evaluators");
  }

  KaryReport out;
  out.labels.assign(dataset.size(), k);
  for (int pass = 0; pass < k - 1; ++pass) {
    AlgoConfig pass_cfg = cfg;
    pass_cfg.seed = Rng::mix(cfg.seed, 0x6B617279ULL + static_cast<std::uint64_t>(pass));
    RunReport r = run_no_data(dataset, family.pass_evaluators[pass], family.pass_rubrics[pass],
                              pass_cfg);
    out.total_sessions += r.total_sessions;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      // Label l_{pass+1} is peeled when the binary pass predicts 0; the first
      // peeled label wins.
      if (out.labels[i] == k && r.records[i].predicted == 0) {
        out.labels[i] = pass + 1;
      }
    }
    out.passes.push_back(std::move(r));
  }
  return out;
}

nlohmann::ordered_json report_to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["config"] = report.config_echo;
  j["seed"] = report.seed;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json e;
    e["x"] = r.x.str();
    e["pred"] = r.predicted;
    e["success"] = r.success;
    e["flipped"] = r.flipped;
    j["records"].push_back(std::move(e));
  }
  j["success_rate"] = report.success_rate;
  j["flip_rate"] = report.flip_rate;
  j["accuracy"] = report.accuracy ? nlohmann::ordered_json(*report.accuracy)
                                  : nlohmann::ordered_json(nullptr);
  j["f1"] = report.f1 ? nlohmann::ordered_json(*report.f1) : nlohmann::ordered_json(nullptr);
  return j;
}

RunReport report_from_json(const nlohmann::json& j) {
  RunReport report;
  try {
    report.config_echo = j.at("config");
    report.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("records")) {
      DatapointRecord r;
      r.x = BitString::parse(e.at("x").get<std::string>());
      r.predicted = e.at("pred").get<int>();
      r.success = e.at("success").get<bool>();
      r.flipped = e.at("flipped").get<bool>();
      report.records.push_back(std::move(r));
    }
    report.success_rate = j.at("success_rate").get<double>();
    report.flip_rate = j.at("flip_rate").get<double>();
    if (!j.at("accuracy").is_null()) report.accuracy = j.at("accuracy").get<double>();
    if (!j.at("f1").is_null()) report.f1 = j.at("f1").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed run report: ") + e.what());
  }
  report.total_sessions = static_cast<long>(report.records.size());
  return report;
}

namespace {

std::string pct(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", rate * 100.0);
  return buf;
}

}  // namespace

std::string render_report_table(const RunReport& report) {
  std::string out;
  out += "Successes/Flips    " + pct(report.success_rate) + " / " + pct(report.flip_rate) + "\n";
  if (report.accuracy && report.f1) {
    out += "Accuracy/F1        " + pct(*report.accuracy) + " / " + pct(*report.f1) + "\n";
  } else {
    out += "Accuracy/F1        --- / ---\n";
  }
  return out;
}

}  // namespace nodata
