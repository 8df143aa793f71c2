#include "entailloop/cli.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "entailloop/csv.hpp"
#include "entailloop/error.hpp"
#include "entailloop/pipeline.hpp"

namespace entailloop {

namespace {

namespace fs = std::filesystem;

void require_distinct(const std::vector<fs::path>& paths) {
  std::set<fs::path> seen;
  for (const auto& p : paths) {
    if (p.empty()) continue;
    if (!seen.insert(fs::absolute(p).lexically_normal()).second) {
      throw ConfigError("path used twice: " + p.string());
    }
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_eval(std::ostream& out, const std::string& label, const EvalResult& e) {
  out << label << ": P=" << format_double(e.precision) << " R=" << format_double(e.recall)
      << " F=" << format_double(e.f1) << " (tp=" << e.tp << " fp=" << e.fp << " fn=" << e.fn << " tn=" << e.tn
      << ")\n";
}

struct Args {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;

  // shared by several subcommands
  std::string in;
  std::string out;
  std::string out_dir;
  std::string train;
  std::string pool;
  std::string dev;
  std::string test;
  std::string eval;
  bool unlabeled = false;
  std::string data;
  std::string model;
  std::string predictions;
  std::string role;
  std::string method = "both";
  std::optional<std::string> grid;
  std::optional<std::size_t> max_iterations;
  std::optional<std::size_t> hypotheses;
  std::optional<std::size_t> candidates;
  std::optional<double> positive_fraction;
  std::optional<std::size_t> vocab;
  std::optional<std::size_t> runs;
  std::optional<std::string> strategies;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> step;
  std::optional<std::size_t> retrain_every;
  std::optional<Eigen::Index> k;
  std::optional<std::size_t> n_top;
  std::optional<double> k1;
  std::optional<double> b;
  std::optional<double> lambda;
};

ExperimentConfig resolve_config(const Args& a) {
  ExperimentConfig cfg = a.config ? load_config(*a.config) : ExperimentConfig{};
  if (a.seed) cfg.seed = *a.seed;
  auto& s = cfg.synth;
  if (a.hypotheses) s.n_hypotheses = *a.hypotheses;
  if (a.candidates) s.candidates_per_hypothesis = *a.candidates;
  if (a.positive_fraction) s.positive_fraction = *a.positive_fraction;
  if (a.vocab) s.vocab_size = *a.vocab;
  if (a.grid) cfg.tau_grid = parse_grid(*a.grid);
  if (a.max_iterations) cfg.selftrain_max_iterations = *a.max_iterations;
  if (a.runs) cfg.active.n_runs = *a.runs;
  if (a.budget) cfg.active.budget = *a.budget;
  if (a.step) cfg.active.step = *a.step;
  if (a.retrain_every) cfg.active.retrain_every = *a.retrain_every;
  if (a.strategies) {
    cfg.strategies.clear();
    for (const auto& name : split_list(*a.strategies)) cfg.strategies.push_back(parse_strategy(name));
  }
  if (a.k) cfg.smote.k = *a.k;
  if (a.n_top) cfg.retrieval.n_top = *a.n_top;
  if (a.k1) cfg.retrieval.k1 = *a.k1;
  if (a.b) cfg.retrieval.b = *a.b;
  if (a.lambda) cfg.train.ridge_lambda = *a.lambda;
  if (!a.out_dir.empty()) cfg.output_dir = a.out_dir;
  cfg.validate();
  return cfg;
}

FeatureTable featurize_file(const std::string& path, std::optional<Role> role, const ExperimentConfig& cfg) {
  return extract_dataset(load_jsonl(path, role), cfg.features);
}

int cmd_synth(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  SynthConfig sc = cfg.synth;
  sc.seed = cfg.stage_seed("synth");
  Dataset ds = synth_generate(sc);
  if (a.unlabeled) ds = strip_labels(ds, "synth-pool", "u-");
  save_jsonl(ds, a.out);
  out << "wrote " << ds.size() << " pairs";
  if (!a.unlabeled) out << ", positives " << class_distribution(ds).display();
  out << " to " << a.out << "\n";
  return 0;
}

int cmd_split(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  const Dataset ds = load_jsonl(a.in, Role::Train);
  const auto split = split_dataset(ds, cfg.split, cfg.stage_seed("split"));
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  require_distinct({a.in, dir / "train.jsonl", dir / "dev.jsonl", dir / "test.jsonl"});
  save_jsonl(split.train, dir / "train.jsonl");
  save_jsonl(split.dev, dir / "dev.jsonl");
  save_jsonl(split.test, dir / "test.jsonl");
  out << "train " << split.train.size() << ", dev " << split.dev.size() << ", test " << split.test.size() << "\n";
  return 0;
}

int cmd_featurize(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  require_distinct({a.in, a.out});
  const std::optional<Role> role = a.role.empty() ? std::nullopt : std::optional<Role>(parse_role(a.role));
  const FeatureTable t = featurize_file(a.in, role, cfg);
  write_feature_csv(t, a.out);
  out << "wrote " << t.rows() << " feature rows to " << a.out << "\n";
  return 0;
}

int cmd_train(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  require_distinct({a.train, a.model});
  const FeatureTable t = featurize_file(a.train, Role::Train, cfg);
  const LinearModel m = train(t, cfg.train);
  save_model(m, a.model);
  out << "trained on " << t.rows() << " pairs, model written to " << a.model << "\n";
  return 0;
}

int cmd_eval(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  require_distinct({a.model, a.data, a.predictions});
  const LinearModel m = load_model(a.model);
  const FeatureTable t = featurize_file(a.data, Role::Test, cfg);
  const Eigen::VectorXd p = predict_proba(m, t);
  const EvalResult e = evaluate(p, gold_vector(t), cfg.train.decision_threshold);
  print_eval(out, a.data, e);
  if (!a.predictions.empty()) {
    CsvWriter csv(a.predictions, "classifier-predictions", {"pair_id", "probability", "predicted_label"});
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      csv.row({t.pair_ids[static_cast<std::size_t>(i)], format_double(p(i)),
               p(i) >= cfg.train.decision_threshold ? "entail" : "nonentail"});
    }
  }
  return 0;
}

int cmd_selftrain(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  const fs::path dir(a.out_dir);
  require_distinct({a.train, a.pool, a.dev, a.test, dir / "selftrain_sweep.csv", dir / "selftrain_history.csv"});
  const FeatureTable L = featurize_file(a.train, Role::Train, cfg);
  const FeatureTable U = featurize_file(a.pool, Role::Unlabeled, cfg);
  const FeatureTable D = featurize_file(a.dev, Role::Dev, cfg);
  SelfTrainConfig base;
  base.max_iterations = cfg.selftrain_max_iterations;
  base.train_options = cfg.train;
  const SweepResult sweep = threshold_sweep(L, U, D, cfg.tau_grid, base);
  fs::create_directories(dir);
  write_sweep_csv(sweep, dir / "selftrain_sweep.csv");
  write_history_csv(sweep.runs[sweep.best_index].history, dir / "selftrain_history.csv");
  out << "best tau " << format_double(sweep.best_tau) << " (dev F " << format_double(sweep.rows[sweep.best_index].dev.f1)
      << ", " << sweep.rows[sweep.best_index].added_total << " pairs added)\n";
  if (!a.test.empty()) {
    const FeatureTable T = featurize_file(a.test, Role::Test, cfg);
    const auto gold = gold_vector(T);
    const double thr = cfg.train.decision_threshold;
    const LinearModel ent = train(L, cfg.train);
    const Eigen::VectorXd pa = predict_proba(ent, T);
    const Eigen::VectorXd pb = predict_proba(sweep.runs[sweep.best_index].model, T);
    print_eval(out, "ENT test", evaluate(pa, gold, thr));
    print_eval(out, "self-training test", evaluate(pb, gold, thr));
    std::vector<bool> va;
    std::vector<bool> vb;
    for (Eigen::Index i = 0; i < pa.size(); ++i) {
      va.push_back(pa(i) >= thr);
      vb.push_back(pb(i) >= thr);
    }
    out << "approximate randomization p = "
        << format_double(significance_test(va, vb, gold, cfg.significance_shuffles, cfg.stage_seed("significance")))
        << "\n";
  }
  return 0;
}

int cmd_active(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  require_distinct({a.train, a.eval});
  const FeatureTable pool = featurize_file(a.train, Role::Train, cfg);
  const FeatureTable eval = featurize_file(a.eval, Role::Dev, cfg);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const double base = full_data_baseline(pool, eval, cfg.train).f1;
  std::vector<LearningCurve> curves;
  for (auto strategy : cfg.strategies) {
    ActiveConfig ac = cfg.active;
    ac.strategy = strategy;
    ac.seed = cfg.stage_seed("active");
    ac.train_options = cfg.train;
    curves.push_back(simulate(pool, eval, ac));
    const auto& c = curves.back();
    const std::string tag(to_string(strategy));
    write_curve_csv({c}, dir / ("active_curve_" + tag + ".csv"));
    write_runs_csv({c}, dir / ("active_runs_" + tag + ".csv"));
    const auto reach = labels_to_reach(c.points, base);
    out << tag << ": mean curve reaches full-data F " << format_double(base) << " at "
        << (reach ? std::to_string(*reach) : std::string("never")) << " labels\n";
  }
  write_consumption_csv(curves, dir / "active_consumption.csv");
  return 0;
}

int cmd_smote_compare(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  require_distinct({a.train, a.pool, a.dev});
  const FeatureTable L = featurize_file(a.train, Role::Train, cfg);
  const FeatureTable U = featurize_file(a.pool, Role::Unlabeled, cfg);
  const FeatureTable D = featurize_file(a.dev, Role::Dev, cfg);
  SelfTrainConfig base;
  base.max_iterations = cfg.selftrain_max_iterations;
  base.train_options = cfg.train;
  const SweepResult sweep = threshold_sweep(L, U, D, cfg.tau_grid, base);
  const LinearModel ent = train(L, cfg.train);
  const auto gold = gold_vector(D);
  std::vector<Eigen::Index> pos;
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    if (L.labels[static_cast<std::size_t>(i)] == Label::Entail) pos.push_back(i);
  }
  const FeatureTable minority = L.subset(pos);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  CsvWriter csv(dir / "smote_compare.csv", "smote-compare",
                {"tau", "added", "selftrain_p", "selftrain_r", "selftrain_f1", "smote_p", "smote_r", "smote_f1"});
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto& row = sweep.rows[i];
    EvalResult e = evaluate(predict_proba(ent, D), gold, cfg.train.decision_threshold);
    if (row.added_total > 0) {
      SmoteConfig sc = cfg.smote;
      sc.n_synthetic = row.added_total;
      sc.seed = cfg.stage_seed("smote", i);
      const auto synthetic = smote(minority.values, minority.pair_ids, sc, ent.feature_stds);
      const LinearModel m = train(with_synthetic(L, synthetic), cfg.train);
      e = evaluate(predict_proba(m, D), gold, cfg.train.decision_threshold);
    }
    csv.row({format_double(row.tau), std::to_string(row.added_total), format_double(row.dev.precision),
             format_double(row.dev.recall), format_double(row.dev.f1), format_double(e.precision),
             format_double(e.recall), format_double(e.f1)});
  }
  out << "wrote " << sweep.rows.size() << " comparison rows to " << (dir / "smote_compare.csv").string() << "\n";
  return 0;
}

int cmd_resample(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  require_distinct({a.train, a.dev});
  if (a.method != "down" && a.method != "up" && a.method != "both") {
    throw ConfigError("--method must be down, up or both");
  }
  const FeatureTable L = featurize_file(a.train, Role::Train, cfg);
  const FeatureTable D = a.dev.empty() ? FeatureTable{} : featurize_file(a.dev, Role::Dev, cfg);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  auto run = [&](const std::string& name, const FeatureTable& t) {
    write_feature_csv(t, dir / ("resampled_" + name + ".csv"));
    if (!a.dev.empty()) {
      print_eval(out, name, evaluate(predict_proba(train(t, cfg.train), D), gold_vector(D),
                                     cfg.train.decision_threshold));
    }
  };
  if (a.method != "up") run("downsample", downsample(L, cfg.stage_seed("downsample")));
  if (a.method != "down") run("upsample", upsample(L, cfg.stage_seed("upsample")));
  return 0;
}

int cmd_baseline(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  require_distinct({a.data, a.out});
  const Dataset ds = load_jsonl(a.data, Role::Test);
  const auto preds = topn_baseline(ds, cfg.retrieval);
  write_predictions_csv(preds, a.out);
  print_eval(out, "BM25 top-" + std::to_string(cfg.retrieval.n_top), evaluate_retrieval(ds, preds));
  return 0;
}

int cmd_report(const Args& a, std::ostream& out) {
  std::ifstream in(a.in);
  if (!in) throw DataError("cannot open " + a.in);
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(a.in + ": " + e.what());
  }
  const std::string text = report_from_json(doc).to_text();
  if (a.out.empty()) {
    out << text;
  } else {
    require_distinct({a.in, a.out});
    std::ofstream(a.out, std::ios::binary) << text;
  }
  return 0;
}

int cmd_pipeline(const Args& a, std::ostream& out) {
  const auto cfg = resolve_config(a);
  const RunReport report = run_paper_pipeline(cfg);
  out << report.to_text();
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entailment search with self-training, active learning and imbalance countermeasures"};
  app.require_subcommand(1);
  app.fallthrough();
  Args a;
  app.add_option("--config", a.config, "Experiment config JSON; flags override it");
  app.add_option("--seed", a.seed, "Global seed (default 42)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--out", a.out, "Output JSONL")->required();
  synth->add_option("--hypotheses", a.hypotheses);
  synth->add_option("--candidates", a.candidates);
  synth->add_option("--positive-fraction", a.positive_fraction);
  synth->add_option("--vocab", a.vocab);
  synth->add_flag("--unlabeled", a.unlabeled, "Drop labels and prefix ids with u- (a self-training pool)");

  auto* split = app.add_subcommand("split", "Split a corpus by hypothesis into train/dev/test");
  split->add_option("--in", a.in)->required();
  split->add_option("--out-dir", a.out_dir)->required();

  auto* featurize = app.add_subcommand("featurize", "Write the feature matrix CSV");
  featurize->add_option("--in", a.in)->required();
  featurize->add_option("--out", a.out)->required();
  featurize->add_option("--role", a.role, "Override the role in the file header");

  auto* trn = app.add_subcommand("train", "Train the ENT classifier");
  trn->add_option("--train", a.train)->required();
  trn->add_option("--model", a.model)->required();
  trn->add_option("--lambda", a.lambda, "Ridge penalty");

  auto* ev = app.add_subcommand("eval", "Evaluate a saved model");
  ev->add_option("--model", a.model)->required();
  ev->add_option("--data", a.data)->required();
  ev->add_option("--predictions", a.predictions, "Optional per-pair predictions CSV");

  auto* st = app.add_subcommand("selftrain", "Self-training threshold sweep");
  st->add_option("--train", a.train)->required();
  st->add_option("--pool", a.pool)->required();
  st->add_option("--dev", a.dev)->required();
  st->add_option("--test", a.test, "Evaluate the best tau on this set");
  st->add_option("--grid", a.grid, "lo:hi:step or a comma list (default 0.1:0.9:0.1)");
  st->add_option("--max-iterations", a.max_iterations);
  st->add_option("--out-dir", a.out_dir)->required();

  auto* act = app.add_subcommand("active", "Simulated pool-based active learning");
  act->add_option("--train", a.train, "Labeled pool")->required();
  act->add_option("--eval", a.eval)->required();
  act->add_option("--runs", a.runs);
  act->add_option("--strategies", a.strategies, "Comma list of uncertainty,random");
  act->add_option("--budget", a.budget);
  act->add_option("--step", a.step);
  act->add_option("--retrain-every", a.retrain_every);
  act->add_option("--out-dir", a.out_dir)->required();

  auto* sm = app.add_subcommand("smote-compare", "Self-training vs SMOTE at matched added counts");
  sm->add_option("--train", a.train)->required();
  sm->add_option("--pool", a.pool)->required();
  sm->add_option("--dev", a.dev)->required();
  sm->add_option("--grid", a.grid);
  sm->add_option("--k", a.k);
  sm->add_option("--out-dir", a.out_dir)->required();

  auto* rs = app.add_subcommand("resample", "Balanced down- or up-sampling");
  rs->add_option("--train", a.train)->required();
  rs->add_option("--dev", a.dev, "Evaluate the resampled models here");
  rs->add_option("--method", a.method, "down, up or both");
  rs->add_option("--out-dir", a.out_dir)->required();

  auto* bl = app.add_subcommand("baseline", "BM25 top-N retrieval baseline");
  bl->add_option("--data", a.data)->required();
  bl->add_option("--n-top", a.n_top);
  bl->add_option("--k1", a.k1);
  bl->add_option("--b", a.b);
  bl->add_option("--out", a.out, "Predictions CSV")->required();

  auto* rep = app.add_subcommand("report", "Render a report.json as a table");
  rep->add_option("--in", a.in)->required();
  rep->add_option("--out", a.out);

  auto* pipe = app.add_subcommand("pipeline", "Run every experiment end to end");
  pipe->add_option("--out-dir", a.out_dir, "Default entailloop-out");
  pipe->add_option("--runs", a.runs, "Active-learning runs per strategy");
  pipe->add_option("--retrain-every", a.retrain_every, "Active-learning acquisitions between retrains");
  pipe->add_option("--grid", a.grid, "Self-training tau grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(a, out);
    if (split->parsed()) return cmd_split(a, out);
    if (featurize->parsed()) return cmd_featurize(a, out);
    if (trn->parsed()) return cmd_train(a, out);
    if (ev->parsed()) return cmd_eval(a, out);
    if (st->parsed()) return cmd_selftrain(a, out);
    if (act->parsed()) return cmd_active(a, out);
    if (sm->parsed()) return cmd_smote_compare(a, out);
    if (rs->parsed()) return cmd_resample(a, out);
    if (bl->parsed()) return cmd_baseline(a, out);
    if (rep->parsed()) return cmd_report(a, out);
    if (pipe->parsed()) return cmd_pipeline(a, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace entailloop
