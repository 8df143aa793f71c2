#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "entailloop/corpus.hpp"
#include "entailloop/error.hpp"
#include "entailloop/rng.hpp"
#include "entailloop/selftrain.hpp"
#include "support.hpp"

using namespace entailloop;

namespace {

struct Tables {
  FeatureTable labeled, pool, dev;
};

Tables small_corpus(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_hypotheses = 30;
  cfg.candidates_per_hypothesis = 20;
  cfg.positive_fraction = 0.1;
  cfg.seed = seed;
  const auto split = split_dataset(synth_generate(cfg), {}, seed + 1);
  SynthConfig pool_cfg = cfg;
  pool_cfg.seed = seed + 2;
  return {extract_dataset(split.train), extract_dataset(strip_labels(synth_generate(pool_cfg), "pool", "u-")),
          extract_dataset(split.dev)};
}

void check_bookkeeping(const SelfTrainResult& run, const FeatureTable& labeled, const FeatureTable& pool) {
  REQUIRE_FALSE(run.history.empty());
  CHECK(run.history[0].iteration == 0);
  CHECK(run.history[0].added == 0);
  CHECK(run.history[0].labeled_size == static_cast<std::size_t>(labeled.rows()));
  CHECK(run.history[0].pool_size == static_cast<std::size_t>(pool.rows()));
  std::size_t total = 0;
  for (std::size_t i = 1; i < run.history.size(); ++i) {
    const auto& prev = run.history[i - 1];
    const auto& cur = run.history[i];
    CHECK(cur.iteration == i);
    CHECK(cur.added > 0);
    CHECK(cur.labeled_size == prev.labeled_size + cur.added);
    CHECK(cur.pool_size + cur.added == prev.pool_size);
    total += cur.added;
  }
  CHECK(total == run.added_total());
  CHECK(run.history.back().pool_size == static_cast<std::size_t>(pool.rows()) - total);
  const std::set<std::string> added(run.added_ids.begin(), run.added_ids.end());
  CHECK(added.size() == run.added_ids.size());  // never added twice
  const std::set<std::string> pool_ids(pool.pair_ids.begin(), pool.pair_ids.end());
  const std::set<std::string> labeled_ids(labeled.pair_ids.begin(), labeled.pair_ids.end());
  for (const auto& id : added) {
    CHECK(pool_ids.count(id) == 1);
    CHECK(labeled_ids.count(id) == 0);
  }
}

}  // namespace

TEST_CASE("tau grid") {
  const auto grid = default_tau_grid();
  REQUIRE(grid.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(grid[i] == (i + 1) / 10.0);
  CHECK(parse_grid("0.2,0.5") == std::vector<double>{0.2, 0.5});
  CHECK(parse_grid("0.5:0.5:0.1") == std::vector<double>{0.5});
  CHECK_THROWS_AS(parse_grid("0:1:0.5"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0.1:0.9"), ConfigError);
  CHECK_THROWS_AS(parse_grid("abc"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0.1:0.9:0"), ConfigError);
  SelfTrainConfig cfg;
  cfg.tau = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("threshold too high adds nothing") {
  const auto t = small_corpus(11);
  SelfTrainConfig cfg;
  cfg.tau = 1.0 - 1e-15;
  const auto run = self_train(t.labeled, t.pool, t.dev, cfg);
  CHECK(run.history.size() == 1);
  CHECK(run.added_total() == 0);
  const auto baseline = train(t.labeled);
  CHECK(run.model.weights == baseline.weights);
  CHECK(run.model.bias == baseline.bias);
}

TEST_CASE("empty pool returns the baseline") {
  const auto t = small_corpus(12);
  const auto run = self_train(t.labeled, t.pool.subset({}), t.dev, SelfTrainConfig{});
  CHECK(run.history.empty());
  CHECK(run.model.weights == train(t.labeled).weights);
}

TEST_CASE("copies of labeled positives are absorbed in round one") {
  const auto t = small_corpus(13);
  std::vector<Eigen::Index> positives;
  for (Eigen::Index i = 0; i < t.labeled.rows(); ++i)
    if (t.labeled.labels[static_cast<std::size_t>(i)] == Label::Entail) positives.push_back(i);
  FeatureTable copies = t.labeled.subset(positives);
  copies.labels.clear();
  for (auto& id : copies.pair_ids) id = "copy-" + id;

  const auto baseline = train(t.labeled);
  const Eigen::VectorXd p = predict_proba(baseline, copies);
  // Only meaningful when the baseline separates its own positives.
  REQUIRE((p.array() > 0.5).all());
  SelfTrainConfig cfg;
  cfg.tau = 0.5;
  const auto run = self_train(t.labeled, copies, t.dev, cfg);
  REQUIRE(run.history.size() >= 2);
  CHECK(run.history[1].added == copies.pair_ids.size());
  CHECK(run.history.back().pool_size == 0);
  check_bookkeeping(run, t.labeled, copies);
}

TEST_CASE("bookkeeping and determinism across the grid") {
  const auto t = small_corpus(14);
  const auto sweep = threshold_sweep(t.labeled, t.pool, t.dev, default_tau_grid());
  REQUIRE(sweep.rows.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    check_bookkeeping(sweep.runs[i], t.labeled, t.pool);
    if (i > 0) CHECK(sweep.rows[i].first_round_added <= sweep.rows[i - 1].first_round_added);
  }
  // Best tau: maximal F, ties to the smaller tau.
  for (const auto& row : sweep.rows) {
    CHECK(row.dev.f1 <= sweep.rows[sweep.best_index].dev.f1);
    if (row.dev.f1 == sweep.rows[sweep.best_index].dev.f1) CHECK(row.tau >= sweep.best_tau);
  }
  // The first-round count is the number of pool rows the baseline puts above tau.
  const Eigen::VectorXd p = predict_proba(train(t.labeled), t.pool);
  for (const auto& row : sweep.rows) CHECK(row.first_round_added == std::size_t((p.array() > row.tau).count()));

  const auto again = threshold_sweep(t.labeled, t.pool, t.dev, default_tau_grid());
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(again.runs[i].added_ids == sweep.runs[i].added_ids);
    CHECK(again.rows[i].dev.f1 == sweep.rows[i].dev.f1);
  }
}

TEST_CASE("max_iterations caps rounds") {
  const auto t = small_corpus(15);
  SelfTrainConfig cfg;
  cfg.tau = 0.1;
  cfg.max_iterations = 1;
  const auto run = self_train(t.labeled, t.pool, t.dev, cfg);
  CHECK(run.history.size() <= 2);
}

TEST_CASE("schema mismatch is rejected") {
  const auto t = small_corpus(16);
  auto pool = t.pool;
  pool.names.back() = "other";
  CHECK_THROWS_AS(self_train(t.labeled, pool, t.dev, SelfTrainConfig{}), DataError);
}

TEST_CASE("history and sweep CSV") {
  testsupport::TempDir dir;
  const auto t = small_corpus(17);
  const auto sweep = threshold_sweep(t.labeled, t.pool, t.dev, parse_grid("0.1:0.9:0.1"));
  write_sweep_csv(sweep, dir / "sweep.csv");
  write_history_csv(sweep.runs[0].history, dir / "hist.csv");
  const auto s = testsupport::read_file(dir / "sweep.csv");
  CHECK(s.rfind("# entailloop:selftrain-sweep v1\ntau,added_total,dev_p,dev_r,dev_f1\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 2 + 9);
  const auto h = testsupport::read_file(dir / "hist.csv");
  CHECK(h.rfind("# entailloop:selftrain-history v1\niteration,added,labeled_size,pool_size,dev_p,dev_r,dev_f1\n", 0) ==
        0);
}
