#include "entailloop/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "entailloop/csv.hpp"
#include "entailloop/error.hpp"

namespace entailloop {

using nlohmann::json;
using nlohmann::ordered_json;

void ExperimentConfig::validate() const {
  synth.validate();
  if (split.train < 0 || split.dev < 0 || split.test < 0 ||
      std::abs(split.train + split.dev + split.test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be non-negative and sum to 1");
  }
  features.validate();
  train.validate();
  if (tau_grid.empty()) throw ConfigError("tau grid is empty");
  for (double t : tau_grid) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("tau " + format_double(t) + " outside (0,1)");
  }
  active.validate();
  if (strategies.empty()) throw ConfigError("no active-learning strategy selected");
  if (std::set<Strategy>(strategies.begin(), strategies.end()).size() != strategies.size()) {
    throw ConfigError("duplicate active-learning strategy");
  }
  smote.validate();
  retrieval.validate();
  if (retrieval_n.empty()) throw ConfigError("retrieval_n is empty");
  for (auto n : retrieval_n) {
    if (n < 1) throw ConfigError("retrieval n_top must be >= 1");
  }
  if (significance_shuffles < 1) throw ConfigError("significance shuffles must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

namespace {

// Reads keys off one JSON object and rejects any it did not consume.
class Block {
 public:
  Block(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  ~Block() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (const json* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception&) {
        throw ConfigError(where_ + "." + key + ": wrong type");
      }
    }
  }

  void range(const std::string& key, std::size_t& lo, std::size_t& hi) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2) throw ConfigError(where_ + "." + key + ": expected [min, max]");
      lo = v->at(0).get<std::size_t>();
      hi = v->at(1).get<std::size_t>();
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig cfg;
  try {
    Block top(doc, "config");
    top.get("seed", cfg.seed);
    if (const json* v = top.find("output_dir")) cfg.output_dir = v->get<std::string>();

    if (const json* v = top.find("synth")) {
      Block b(*v, "synth");
      auto& s = cfg.synth;
      b.get("n_hypotheses", s.n_hypotheses);
      b.get("candidates_per_hypothesis", s.candidates_per_hypothesis);
      b.get("positive_fraction", s.positive_fraction);
      b.get("vocab_size", s.vocab_size);
      b.range("hypothesis_len", s.hypothesis_len_min, s.hypothesis_len_max);
      b.get("overlap_pos", s.overlap_pos);
      b.get("overlap_neg", s.overlap_neg);
      b.range("noise_tokens", s.noise_tokens_min, s.noise_tokens_max);
      b.get("hard_positive_fraction", s.hard_positive_fraction);
      b.get("hard_negative_fraction", s.hard_negative_fraction);
      b.get("word_frequency_exponent", s.word_frequency_exponent);
    }
    if (const json* v = top.find("split")) {
      Block b(*v, "split");
      b.get("train", cfg.split.train);
      b.get("dev", cfg.split.dev);
      b.get("test", cfg.split.test);
    }
    if (const json* v = top.find("features")) {
      Block b(*v, "features");
      if (const json* e = b.find("enabled")) {
        cfg.features.enabled.fill(false);
        for (const auto& name : e->get<std::vector<std::string>>()) {
          const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
          if (it == kFeatureNames.end()) throw ConfigError("features.enabled: unknown feature '" + name + "'");
          cfg.features.enabled[static_cast<std::size_t>(it - kFeatureNames.begin())] = true;
        }
      }
      b.get("head_confidence", cfg.features.matchers.head_confidence);
      b.get("morphology_confidence", cfg.features.matchers.morphology_confidence);
      if (const json* r = b.find("stemmer_rules"); r && !r->is_null()) {
        cfg.stemmer_rules = r->get<std::string>();
        cfg.features.stemmer = std::make_shared<const Stemmer>(Stemmer::from_file(*cfg.stemmer_rules));
      }
    }
    if (const json* v = top.find("train")) {
      Block b(*v, "train");
      b.get("ridge_lambda", cfg.train.ridge_lambda);
      b.get("max_iterations", cfg.train.max_iterations);
      b.get("gradient_tolerance", cfg.train.gradient_tolerance);
      b.get("decision_threshold", cfg.train.decision_threshold);
    }
    if (const json* v = top.find("selftrain")) {
      Block b(*v, "selftrain");
      if (const json* g = b.find("tau_grid")) {
        cfg.tau_grid = g->is_string() ? parse_grid(g->get<std::string>()) : g->get<std::vector<double>>();
      }
      if (const json* m = b.find("max_iterations"); m && !m->is_null()) {
        cfg.selftrain_max_iterations = m->get<std::size_t>();
      }
    }
    if (const json* v = top.find("active")) {
      Block b(*v, "active");
      b.get("n_runs", cfg.active.n_runs);
      b.get("step", cfg.active.step);
      b.get("retrain_every", cfg.active.retrain_every);
      if (const json* m = b.find("budget"); m && !m->is_null()) cfg.active.budget = m->get<std::size_t>();
      if (const json* s = b.find("strategies")) {
        cfg.strategies.clear();
        for (const auto& name : s->get<std::vector<std::string>>()) cfg.strategies.push_back(parse_strategy(name));
      }
    }
    if (const json* v = top.find("smote")) {
      Block b(*v, "smote");
      b.get("k", cfg.smote.k);
    }
    if (const json* v = top.find("retrieval")) {
      Block b(*v, "retrieval");
      b.get("n_top", cfg.retrieval.n_top);
      b.get("n_grid", cfg.retrieval_n);
      b.get("k1", cfg.retrieval.k1);
      b.get("b", cfg.retrieval.b);
    }
    if (const json* v = top.find("significance")) {
      Block b(*v, "significance");
      b.get("shuffles", cfg.significance_shuffles);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir.string();
  const auto& s = cfg.synth;
  j["synth"] = {{"n_hypotheses", s.n_hypotheses},
                {"candidates_per_hypothesis", s.candidates_per_hypothesis},
                {"positive_fraction", s.positive_fraction},
                {"vocab_size", s.vocab_size},
                {"hypothesis_len", {s.hypothesis_len_min, s.hypothesis_len_max}},
                {"overlap_pos", s.overlap_pos},
                {"overlap_neg", s.overlap_neg},
                {"noise_tokens", {s.noise_tokens_min, s.noise_tokens_max}},
                {"hard_positive_fraction", s.hard_positive_fraction},
                {"hard_negative_fraction", s.hard_negative_fraction},
                {"word_frequency_exponent", s.word_frequency_exponent}};
  j["split"] = {{"train", cfg.split.train}, {"dev", cfg.split.dev}, {"test", cfg.split.test}};
  j["features"] = {{"enabled", cfg.features.schema()},
                   {"head_confidence", cfg.features.matchers.head_confidence},
                   {"morphology_confidence", cfg.features.matchers.morphology_confidence},
                   {"stemmer_rules", cfg.stemmer_rules ? ordered_json(cfg.stemmer_rules->string()) : ordered_json()}};
  j["train"] = {{"ridge_lambda", cfg.train.ridge_lambda},
                {"max_iterations", cfg.train.max_iterations},
                {"gradient_tolerance", cfg.train.gradient_tolerance},
                {"decision_threshold", cfg.train.decision_threshold}};
  j["selftrain"] = {{"tau_grid", cfg.tau_grid},
                    {"max_iterations", cfg.selftrain_max_iterations ? ordered_json(*cfg.selftrain_max_iterations)
                                                                    : ordered_json()}};
  std::vector<std::string> strategies;
  for (auto s : cfg.strategies) strategies.emplace_back(to_string(s));
  j["active"] = {{"n_runs", cfg.active.n_runs},
                 {"step", cfg.active.step},
                 {"retrain_every", cfg.active.retrain_every},
                 {"budget", cfg.active.budget ? ordered_json(*cfg.active.budget) : ordered_json()},
                 {"strategies", strategies}};
  j["smote"] = {{"k", cfg.smote.k}};
  j["retrieval"] = {{"n_top", cfg.retrieval.n_top},
                    {"n_grid", cfg.retrieval_n},
                    {"k1", cfg.retrieval.k1},
                    {"b", cfg.retrieval.b}};
  j["significance"] = {{"shuffles", cfg.significance_shuffles}};
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

ExperimentData build_data(const ExperimentConfig& config) {
  ExperimentData data;
  SynthConfig sc = config.synth;
  sc.seed = config.stage_seed("synth");
  data.corpus = synth_generate(sc);
  data.split = split_dataset(data.corpus, config.split, config.stage_seed("split"));
  SynthConfig pc = config.synth;
  pc.seed = config.stage_seed("pool");
  data.pool = strip_labels(synth_generate(pc), "synth-pool", "u-");
  return data;
}

namespace {

ordered_json eval_json(const EvalResult& e) {
  return {{"tp", e.tp},
          {"fp", e.fp},
          {"fn", e.fn},
          {"tn", e.tn},
          {"precision", e.precision},
          {"recall", e.recall},
          {"f1", e.f1}};
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

}  // namespace

ordered_json RunReport::to_json() const {
  ordered_json j;
  j["format"] = "entailloop.report";
  j["version"] = 1;
  j["config"] = config;
  ordered_json dist = ordered_json::object();
  for (const auto& [name, d] : distributions) {
    dist[name] = {{"positives", d.positives}, {"negatives", d.negatives}, {"positive_fraction", d.positive_fraction}};
  }
  j["class_distribution"] = dist;
  ordered_json res = ordered_json::array();
  for (const auto& r : results) res.push_back({{"system", r.system}, {"split", r.split}, {"eval", eval_json(r.eval)}});
  j["results"] = res;
  ordered_json sig = ordered_json::object();
  for (const auto& [name, p] : significance) sig[name] = p;
  j["significance"] = sig;
  j["best_tau"] = best_tau;
  j["manifest"] = manifest;
  ordered_json timing = ordered_json::object();
  for (const auto& [stage, secs] : stage_seconds) timing[stage] = secs;
  j["timing"] = {{"stage_seconds", timing}};
  return j;
}

RunReport report_from_json(const ordered_json& doc) {
  RunReport r;
  try {
    if (doc.value("format", "") != "entailloop.report") throw DataError("not an entailloop report");
    r.config = doc.at("config");
    for (const auto& [name, d] : doc.at("class_distribution").items()) {
      ClassDistribution cd;
      cd.positives = d.at("positives").get<std::size_t>();
      cd.negatives = d.at("negatives").get<std::size_t>();
      cd.positive_fraction = d.at("positive_fraction").get<double>();
      r.distributions.emplace_back(name, cd);
    }
    for (const auto& row : doc.at("results")) {
      const auto& e = row.at("eval");
      r.results.push_back({row.at("system").get<std::string>(), row.at("split").get<std::string>(),
                           eval_from_counts(e.at("tp").get<std::size_t>(), e.at("fp").get<std::size_t>(),
                                            e.at("fn").get<std::size_t>(), e.at("tn").get<std::size_t>())});
    }
    for (const auto& [name, p] : doc.at("significance").items()) r.significance.emplace_back(name, p.get<double>());
    r.best_tau = doc.at("best_tau").get<double>();
    r.manifest = doc.at("manifest").get<std::vector<std::string>>();
    if (doc.contains("timing")) {
      for (const auto& [stage, secs] : doc.at("timing").at("stage_seconds").items()) {
        r.stage_seconds.emplace_back(stage, secs.get<double>());
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
  return r;
}

std::string RunReport::to_text() const {
  std::ostringstream out;
  out << "entailloop report";
  if (config.contains("seed")) out << " (seed " << config["seed"].get<std::uint64_t>() << ")";
  out << "\n\nClass distribution (positives)\n";
  for (const auto& [name, d] : distributions) {
    out << "  " << std::left << std::setw(10) << name << std::right << std::setw(16) << d.display() << "  of "
        << d.total() << "\n";
  }
  out << "\nSystem results\n";
  out << "  " << std::left << std::setw(26) << "system" << std::setw(6) << "split" << std::right << std::setw(7) << "P"
      << std::setw(7) << "R" << std::setw(7) << "F" << "\n";
  for (const auto& r : results) {
    out << "  " << std::left << std::setw(26) << r.system << std::setw(6) << r.split << std::right << std::setw(7)
        << fixed(r.eval.precision) << std::setw(7) << fixed(r.eval.recall) << std::setw(7) << fixed(r.eval.f1)
        << "\n";
  }
  if (!significance.empty()) {
    out << "\nApproximate randomization p-values\n";
    for (const auto& [name, p] : significance) out << "  " << name << ": " << fixed(p, 4) << "\n";
  }
  out << "\nBest self-training tau: " << format_double(best_tau) << "\n";
  out << "\nFiles\n";
  for (const auto& f : manifest) out << "  " << f << "\n";
  return out.str();
}

namespace {

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  std::filesystem::path operator()(const std::string& name) {
    if (!names_.insert(name).second) throw Error("output written twice: " + name);
    return dir_ / name;
  }

  std::vector<std::string> manifest() const { return {names_.begin(), names_.end()}; }

 private:
  std::filesystem::path dir_;
  std::set<std::string> names_;
};

template <typename Fn>
void stage(RunReport& report, const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + name + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage " + name + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error("stage " + name + ": " + e.what());
  }
  report.stage_seconds.emplace_back(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

void write_systems_csv(const std::vector<SystemResult>& results, const std::filesystem::path& path) {
  CsvWriter csv(path, "systems", {"system", "split", "tp", "fp", "fn", "tn", "precision", "recall", "f1"});
  for (const auto& r : results) {
    csv.row({r.system, r.split, std::to_string(r.eval.tp), std::to_string(r.eval.fp), std::to_string(r.eval.fn),
             std::to_string(r.eval.tn), format_double(r.eval.precision), format_double(r.eval.recall),
             format_double(r.eval.f1)});
  }
}

std::vector<bool> predictions(const LinearModel& model, const FeatureTable& table, double threshold) {
  const Eigen::VectorXd p = predict_proba(model, table);
  std::vector<bool> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p(i) >= threshold;
  return out;
}

}  // namespace

RunReport run_paper_pipeline(const ExperimentConfig& config) {
  config.validate();
  RunReport report;
  report.config = config_to_json(config);
  Outputs out(config.output_dir);
  const double threshold = config.train.decision_threshold;

  ExperimentData data;
  stage(report, "synth", [&] {
    data = build_data(config);
    save_jsonl(data.corpus, out("corpus.jsonl"));
    save_jsonl(data.split.train, out("train.jsonl"));
    save_jsonl(data.split.dev, out("dev.jsonl"));
    save_jsonl(data.split.test, out("test.jsonl"));
    save_jsonl(data.pool, out("pool.jsonl"));
    report.distributions = {{"corpus", class_distribution(data.corpus)},
                            {"train", class_distribution(data.split.train)},
                            {"dev", class_distribution(data.split.dev)},
                            {"test", class_distribution(data.split.test)}};
  });

  FeatureTable train_t;
  FeatureTable dev_t;
  FeatureTable test_t;
  FeatureTable pool_t;
  stage(report, "featurize", [&] {
    train_t = extract_dataset(data.split.train, config.features);
    dev_t = extract_dataset(data.split.dev, config.features);
    test_t = extract_dataset(data.split.test, config.features);
    pool_t = extract_dataset(data.pool, config.features);
    write_feature_csv(train_t, out("features_train.csv"));
    write_feature_csv(dev_t, out("features_dev.csv"));
    write_feature_csv(test_t, out("features_test.csv"));
    write_feature_csv(pool_t, out("features_pool.csv"));
  });
  const auto dev_gold = gold_vector(dev_t);
  const auto test_gold = gold_vector(test_t);

  LinearModel ent;
  stage(report, "baseline", [&] {
    ent = train(train_t, config.train);
    save_model(ent, out("ent_model.json"));
    report.results.push_back({"ENT", "dev", evaluate(predict_proba(ent, dev_t), dev_gold, threshold)});
    report.results.push_back({"ENT", "test", evaluate(predict_proba(ent, test_t), test_gold, threshold)});
  });

  SweepResult sweep;
  stage(report, "selftrain", [&] {
    SelfTrainConfig base;
    base.max_iterations = config.selftrain_max_iterations;
    base.train_options = config.train;
    sweep = threshold_sweep(train_t, pool_t, dev_t, config.tau_grid, base);
    report.best_tau = sweep.best_tau;
    write_sweep_csv(sweep, out("selftrain_sweep.csv"));
    write_history_csv(sweep.runs[sweep.best_index].history, out("selftrain_history.csv"));
    const auto& best = sweep.runs[sweep.best_index].model;
    const std::string name = "self-training (tau=" + format_double(sweep.best_tau) + ")";
    report.results.push_back({name, "dev", sweep.rows[sweep.best_index].dev});
    report.results.push_back({name, "test", evaluate(predict_proba(best, test_t), test_gold, threshold)});
    report.significance.emplace_back(
        "ENT vs " + name + " on test",
        significance_test(predictions(ent, test_t, threshold), predictions(best, test_t, threshold), test_gold,
                          config.significance_shuffles, config.stage_seed("significance", 0)));
  });

  stage(report, "active", [&] {
    std::vector<LearningCurve> curves;
    for (auto strategy : config.strategies) {
      ActiveConfig ac = config.active;
      ac.strategy = strategy;
      ac.seed = config.stage_seed("active");
      ac.train_options = config.train;
      curves.push_back(simulate(train_t, dev_t, ac));
    }
    for (const auto& c : curves) {
      const std::string tag(to_string(c.strategy));
      write_curve_csv({c}, out("active_curve_" + tag + ".csv"));
      write_runs_csv({c}, out("active_runs_" + tag + ".csv"));
    }
    write_consumption_csv(curves, out("active_consumption.csv"));
    report.results.push_back({"full-data (active pool)", "dev", full_data_baseline(train_t, dev_t, config.train)});
  });

  stage(report, "smote", [&] {
    std::vector<Eigen::Index> pos_rows;
    for (Eigen::Index i = 0; i < train_t.rows(); ++i) {
      if (train_t.labels[static_cast<std::size_t>(i)] == Label::Entail) pos_rows.push_back(i);
    }
    const FeatureTable minority = train_t.subset(pos_rows);
    Eigen::VectorXd scale = ent.feature_stds;

    CsvWriter csv(out("smote_compare.csv"), "smote-compare",
                  {"tau", "added", "selftrain_p", "selftrain_r", "selftrain_f1", "smote_p", "smote_r", "smote_f1"});
    const EvalResult ent_dev = evaluate(predict_proba(ent, dev_t), dev_gold, threshold);
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
      const auto& row = sweep.rows[i];
      SmoteConfig sc = config.smote;
      sc.n_synthetic = row.added_total;
      sc.seed = config.stage_seed("smote", i);
      EvalResult smote_dev = ent_dev;
      std::vector<SyntheticInstance> synthetic;
      if (sc.n_synthetic > 0) {
        synthetic = smote(minority.values, minority.pair_ids, sc, scale);
        const LinearModel m = train(with_synthetic(train_t, synthetic), config.train);
        smote_dev = evaluate(predict_proba(m, dev_t), dev_gold, threshold);
      }
      if (i == sweep.best_index) {
        write_synthetic_csv(train_t.names, synthetic, out("smote_synthetic.csv"));
        report.results.push_back({"SMOTE (+" + std::to_string(row.added_total) + ")", "dev", smote_dev});
      }
      csv.row({format_double(row.tau), std::to_string(row.added_total), format_double(row.dev.precision),
               format_double(row.dev.recall), format_double(row.dev.f1), format_double(smote_dev.precision),
               format_double(smote_dev.recall), format_double(smote_dev.f1)});
    }
  });

  stage(report, "resample", [&] {
    CsvWriter csv(out("resample.csv"), "resample",
                  {"method", "train_positives", "train_negatives", "dev_p", "dev_r", "dev_f1"});
    auto emit = [&](const std::string& method, const FeatureTable& t) {
      const EvalResult e = evaluate(predict_proba(train(t, config.train), dev_t), dev_gold, threshold);
      const auto pos = static_cast<std::size_t>(std::count(t.labels.begin(), t.labels.end(), Label::Entail));
      csv.row({method, std::to_string(pos), std::to_string(t.labels.size() - pos), format_double(e.precision),
               format_double(e.recall), format_double(e.f1)});
      if (method != "none") report.results.push_back({method, "dev", e});
    };
    emit("none", train_t);
    emit("downsample", downsample(train_t, config.stage_seed("downsample")));
    emit("upsample", upsample(train_t, config.stage_seed("upsample")));
  });

  stage(report, "retrieval", [&] {
    CsvWriter csv(out("retrieval.csv"), "retrieval-eval", {"n_top", "split", "precision", "recall", "f1"});
    for (auto n : config.retrieval_n) {
      RetrievalConfig rc = config.retrieval;
      rc.n_top = n;
      for (const auto* ds : {&data.split.dev, &data.split.test}) {
        const auto preds = topn_baseline(*ds, rc);
        const EvalResult e = evaluate_retrieval(*ds, preds);
        const std::string split = ds == &data.split.dev ? "dev" : "test";
        csv.row({std::to_string(n), split, format_double(e.precision), format_double(e.recall), format_double(e.f1)});
        report.results.push_back({"BM25 top-" + std::to_string(n), split, e});
      }
    }
    const auto preds = topn_baseline(data.split.test, config.retrieval);
    write_predictions_csv(preds, out("retrieval_predictions.csv"));
    std::vector<bool> top;
    for (const auto& p : preds) top.push_back(p.label == Label::Entail);
    report.significance.emplace_back(
        "ENT vs BM25 top-" + std::to_string(config.retrieval.n_top) + " on test",
        significance_test(predictions(ent, test_t, threshold), top, test_gold, config.significance_shuffles,
                          config.stage_seed("significance", 1)));
  });

  stage(report, "report", [&] {
    write_systems_csv(report.results, out("systems.csv"));
    const auto json_path = out("report.json");
    const auto text_path = out("report.txt");
    report.manifest = out.manifest();
    std::ofstream(text_path, std::ios::binary) << report.to_text();
  });
  std::ofstream(config.output_dir / "report.json", std::ios::binary) << report.to_json().dump(2) << "\n";
  return report;
}

}  // namespace entailloop
