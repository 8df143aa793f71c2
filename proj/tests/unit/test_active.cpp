#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "entailloop/active.hpp"
#include "entailloop/corpus.hpp"
#include "entailloop/error.hpp"
#include "entailloop/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace entailloop;

namespace {

struct Tables {
  FeatureTable pool, dev;
};

Tables small_corpus(std::uint64_t seed, std::size_t hypotheses = 20) {
  SynthConfig cfg;
  cfg.n_hypotheses = hypotheses;
  cfg.candidates_per_hypothesis = 10;
  cfg.positive_fraction = 0.1;
  cfg.seed = seed;
  const auto split = split_dataset(synth_generate(cfg), {0.6, 0.4, 0.0}, seed);
  return {extract_dataset(split.train), extract_dataset(split.dev)};
}

std::vector<std::string> ids_for(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(1000 + i));
  return ids;
}

std::size_t pick(const std::vector<double>& probs, const std::vector<std::string>& ids) {
  return uncertainty_select(probs, ids);
}

}  // namespace

TEST_CASE("uncertainty picks the probability nearest one half") {
  CHECK(pick({0.9, 0.55, 0.2}, ids_for(3)) == 1);
  CHECK(pick({0.1, 0.5, 0.9}, ids_for(3)) == 1);
  CHECK(pick({0.5, 0.0, 1.0, 0.5000001}, ids_for(4)) == 0);
  // Equidistant: the smaller id wins wherever it sits.
  CHECK(pick({0.45, 0.55}, {"b", "a"}) == 1);
  CHECK(pick({0.45, 0.55}, {"a", "b"}) == 0);
  CHECK(pick({0.7}, {"only"}) == 0);
  CHECK_THROWS_AS(pick({}, {}), DataError);
  CHECK_THROWS_AS(pick({0.1, 0.2}, {"a"}), DataError);
}

TEST_CASE("uncertainty selection matches the brute-force oracle") {
  Rng rng(91);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(30);
    std::vector<double> probs(n);
    // Coarse grid so ties happen often.
    for (auto& p : probs) p = static_cast<double>(rng.uniform_index(21)) / 20.0;
    auto ids = ids_for(n);
    Rng(trial).shuffle(ids);
    REQUIRE(uncertainty_select(probs, ids) == oracle::most_uncertain(probs, ids));
  }
}

TEST_CASE("random selection is uniform") {
  Rng rng(5);
  std::vector<int> hits(4, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++hits[random_select(4, rng)];
  for (int h : hits) CHECK(std::abs(h / static_cast<double>(draws) - 0.25) < 0.02);
  CHECK(random_select(1, rng) == 0);
  CHECK_THROWS_AS(random_select(0, rng), DataError);
}

TEST_CASE("strategy names") {
  CHECK(parse_strategy("uncertainty") == Strategy::Uncertainty);
  CHECK(parse_strategy("random") == Strategy::Random);
  CHECK(to_string(Strategy::Random) == "random");
  CHECK_THROWS_AS(parse_strategy("greedy"), ConfigError);
  ActiveConfig cfg;
  cfg.step = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("run bookkeeping") {
  const auto t = small_corpus(3);
  for (auto strategy : {Strategy::Uncertainty, Strategy::Random}) {
    ActiveConfig cfg;
    cfg.strategy = strategy;
    cfg.n_runs = 3;
    cfg.budget = 40;
    const auto curve = simulate(t.pool, t.dev, cfg);
    REQUIRE(curve.runs.size() == 3);
    REQUIRE(curve.points.size() == 40);
    for (std::size_t s = 0; s < curve.points.size(); ++s) CHECK(curve.points[s].n_labeled == s + 1);
    for (const auto& run : curve.runs) {
      CHECK(run.acquired.size() == 40);
      const std::set<Eigen::Index> distinct(run.acquired.begin(), run.acquired.end());
      CHECK(distinct.size() == run.acquired.size());
      for (std::size_t s = 1; s < run.points.size(); ++s) {
        CHECK(run.points[s].pos_consumed >= run.points[s - 1].pos_consumed);
        CHECK(run.points[s].neg_consumed >= run.points[s - 1].neg_consumed);
      }
      CHECK(run.pool_positives + run.pool_negatives == static_cast<std::size_t>(t.pool.rows()));
    }
    // The average is the pointwise mean of the runs.
    for (std::size_t s = 0; s < curve.points.size(); ++s) {
      double f = 0.0;
      for (const auto& run : curve.runs) f += run.points[s].f1;
      CHECK(curve.points[s].f1 == doctest::Approx(f / 3.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("step size groups acquisitions") {
  const auto t = small_corpus(4);
  ActiveConfig cfg;
  cfg.n_runs = 2;
  cfg.step = 5;
  cfg.budget = 23;
  const auto curve = simulate(t.pool, t.dev, cfg);
  std::vector<std::size_t> n;
  for (const auto& p : curve.points) n.push_back(p.n_labeled);
  CHECK(n == std::vector<std::size_t>{1, 6, 11, 16, 21, 23});
}

TEST_CASE("full budget ends at the full-data model for both strategies") {
  const auto t = small_corpus(5, 10);
  const auto full = full_data_baseline(t.pool, t.dev);
  double final_f[2];
  int k = 0;
  for (auto strategy : {Strategy::Uncertainty, Strategy::Random}) {
    ActiveConfig cfg;
    cfg.strategy = strategy;
    cfg.n_runs = 2;
    cfg.retrain_every = 7;
    const auto curve = simulate(t.pool, t.dev, cfg);
    const auto& last = curve.points.back();
    CHECK(last.n_labeled == static_cast<std::size_t>(t.pool.rows()));
    CHECK(last.pos_consumed == 1.0);
    CHECK(last.neg_consumed == 1.0);
    const auto cons = consumption_curve(curve);
    CHECK(cons.back().frac_added == 1.0);
    final_f[k++] = last.f1;
    CHECK(last.f1 == doctest::Approx(full.f1).epsilon(1e-9));
  }
  CHECK(final_f[0] == doctest::Approx(final_f[1]).epsilon(1e-9));
}

TEST_CASE("runs are deterministic and seeded independently") {
  const auto t = small_corpus(6);
  ActiveConfig cfg;
  cfg.n_runs = 3;
  cfg.budget = 30;
  cfg.strategy = Strategy::Random;
  const auto a = simulate(t.pool, t.dev, cfg);
  const auto b = simulate(t.pool, t.dev, cfg);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(a.runs[r].acquired == b.runs[r].acquired);
    CHECK(a.runs[r].seed == (cfg.seed ^ r));
  }
  CHECK(a.runs[0].acquired != a.runs[1].acquired);
}

TEST_CASE("pool validation") {
  const auto t = small_corpus(7);
  std::vector<Eigen::Index> negatives;
  for (Eigen::Index i = 0; i < t.pool.rows(); ++i)
    if (t.pool.labels[static_cast<std::size_t>(i)] == Label::NonEntail) negatives.push_back(i);
  CHECK_THROWS_AS(simulate(t.pool.subset(negatives), t.dev, ActiveConfig{}), DataError);
  CHECK_THROWS_AS(simulate(t.pool.subset({}), t.dev, ActiveConfig{}), DataError);
}

TEST_CASE("consumption area and label count helpers") {
  CHECK(consumption_area({{0.5, 1.0, 0.0}, {1.0, 1.0, 1.0}}) == doctest::Approx(0.75));
  CHECK(consumption_area({{1.0, 1.0, 1.0}}) == doctest::Approx(0.5));
  std::vector<CurvePoint> pts(3);
  pts[0] = {1, 0, 0, 0.2, 0, 0};
  pts[1] = {2, 0, 0, 0.6, 0, 0};
  pts[2] = {3, 0, 0, 0.5, 0, 0};
  CHECK(labels_to_reach(pts, 0.6) == 2u);
  CHECK(labels_to_reach(pts, 0.1) == 1u);
  CHECK_FALSE(labels_to_reach(pts, 0.7).has_value());
}

TEST_CASE("curve CSVs") {
  testsupport::TempDir dir;
  const auto t = small_corpus(8);
  ActiveConfig cfg;
  cfg.n_runs = 2;
  cfg.budget = 5;
  const auto u = simulate(t.pool, t.dev, cfg);
  cfg.strategy = Strategy::Random;
  const auto r = simulate(t.pool, t.dev, cfg);
  write_curve_csv({u, r}, dir / "curve.csv");
  write_runs_csv({u, r}, dir / "runs.csv");
  write_consumption_csv({u, r}, dir / "cons.csv");
  const auto curve = testsupport::read_file(dir / "curve.csv");
  CHECK(curve.rfind("# entailloop:active-curve v1\nstrategy,n_labeled,precision,recall,f1,pos_consumed,neg_consumed\n",
                    0) == 0);
  CHECK(std::count(curve.begin(), curve.end(), '\n') == 2 + 10);
  const auto runs = testsupport::read_file(dir / "runs.csv");
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 2 + 20);
  const auto cons = testsupport::read_file(dir / "cons.csv");
  CHECK(cons.rfind("# entailloop:active-consumption v1\nstrategy,frac_added,pos_consumed,neg_consumed\n", 0) == 0);
}
