#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "entailloop/corpus.hpp"
#include "entailloop/error.hpp"
#include "entailloop/retrieval.hpp"
#include "support.hpp"

using namespace entailloop;

namespace {

Dataset one_hypothesis(const std::string& hyp, const std::vector<std::string>& texts, std::size_t positives = 1) {
  Dataset d;
  d.name = "r";
  for (std::size_t i = 0; i < texts.size(); ++i) {
    d.pairs.push_back({"c" + std::to_string(10 + i), "h", texts[i], hyp,
                       i < positives ? Label::Entail : Label::NonEntail});
  }
  return d;
}

}  // namespace

TEST_CASE("bm25 frozen scores") {
  const std::vector<Candidate> docs{
      {"d1", retrieval_terms("heart attack patient")},
      {"d2", retrieval_terms("patient has heart disease and heart failure")},
      {"d3", retrieval_terms("the attack was sudden")},
      {"d4", retrieval_terms("no relevant words here at all")},
      {"d5", retrieval_terms("patient patient patient stable")},
  };
  const auto ranked = bm25_rank({"heart", "attack", "patient"}, docs);
  const std::map<std::string, double> expected{{"d1", 2.704888454211582},
                                               {"d2", 1.5202066535805552},
                                               {"d3", 0.9395274254529659},
                                               {"d4", 0.0},
                                               {"d5", 0.8783646678606755}};
  REQUIRE(ranked.size() == 5);
  for (const auto& r : ranked) CHECK(r.score == doctest::Approx(expected.at(r.pair_id)).epsilon(1e-12));
  std::vector<std::string> order;
  for (const auto& r : ranked) order.push_back(r.pair_id);
  CHECK(order == std::vector<std::string>{"d1", "d2", "d3", "d5", "d4"});
}

TEST_CASE("repeated query terms count once") {
  const std::vector<Candidate> docs{{"a", {"x", "y"}}, {"b", {"y", "z"}}};
  const auto once = bm25_rank({"x", "y"}, docs);
  const auto twice = bm25_rank({"x", "x", "y"}, docs);
  for (std::size_t i = 0; i < 2; ++i) CHECK(once[i].score == twice[i].score);
}

TEST_CASE("retrieval terms") {
  CHECK(retrieval_terms("The Heart, failing.") == std::vector<std::string>{"the", "heart", "failing"});
  CHECK(retrieval_terms("").empty());
}

TEST_CASE("identical candidate ranks first") {
  const std::string hyp = "the patient was given aspirin";
  const auto preds = topn_baseline(
      one_hypothesis(hyp, {"aspirin daily", hyp, "nothing shared", "patient stable", "given time"}, 0),
      RetrievalConfig{1});
  for (const auto& p : preds) CHECK((p.label == Label::Entail) == (p.pair_id == "c11"));
}

TEST_CASE("identical candidates tie and order by id") {
  const std::vector<Candidate> docs{{"z", {"a", "b"}}, {"m", {"a", "b"}}, {"c", {"a", "b"}}};
  const auto ranked = bm25_rank({"a"}, docs);
  CHECK(ranked[0].pair_id == "c");
  CHECK(ranked[1].pair_id == "m");
  CHECK(ranked[2].pair_id == "z");
  CHECK(ranked[0].score == ranked[2].score);
}

TEST_CASE("n larger than the candidate list marks everything") {
  const auto d = one_hypothesis("heart attack", {"heart", "attack", "other"});
  const auto preds = topn_baseline(d, RetrievalConfig{10});
  for (const auto& p : preds) CHECK(p.label == Label::Entail);
  const auto e = evaluate_retrieval(d, preds);
  CHECK(e.recall == 1.0);
  CHECK(e.precision == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(topn_baseline(one_hypothesis("a", {"a"}), RetrievalConfig{0}), ConfigError);
  CHECK_THROWS_AS(RetrievalConfig({1, -1.0, 0.5}).validate(), ConfigError);
  CHECK_THROWS_AS(RetrievalConfig({1, 1.2, 1.5}).validate(), ConfigError);
}

TEST_CASE("per-hypothesis entail counts on synthetic data") {
  SynthConfig cfg;
  cfg.n_hypotheses = 12;
  cfg.candidates_per_hypothesis = 9;
  cfg.seed = 3;
  const auto d = synth_generate(cfg);
  for (std::size_t n : {1u, 5u, 9u, 20u}) {
    const auto preds = topn_baseline(d, RetrievalConfig{n});
    REQUIRE(preds.size() == d.size());
    std::map<std::string, std::size_t> entail, total;
    std::map<std::string, double> min_entail, max_non;
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(preds[i].pair_id == d.pairs[i].id);
      const auto& h = d.pairs[i].hypothesis_id;
      ++total[h];
      if (preds[i].label == Label::Entail) {
        ++entail[h];
        min_entail[h] = min_entail.count(h) ? std::min(min_entail[h], preds[i].score) : preds[i].score;
      } else {
        max_non[h] = std::max(max_non[h], preds[i].score);
      }
    }
    for (const auto& [h, t] : total) {
      CHECK(entail[h] == std::min(n, t));
      // Ranking is by score, so no rejected candidate outscores an accepted one.
      if (max_non.count(h) && min_entail.count(h)) CHECK(max_non[h] <= min_entail[h]);
    }
    // A candidate sharing no term with its hypothesis scores 0.
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto q = retrieval_terms(d.pairs[i].hypothesis);
      const auto c = retrieval_terms(d.pairs[i].text);
      bool shared = false;
      for (const auto& t : c) shared = shared || std::find(q.begin(), q.end(), t) != q.end();
      if (!shared) CHECK(preds[i].score == 0.0);
      CHECK(preds[i].score >= 0.0);
    }
  }
  CHECK(topn_baseline(d, {}).size() == d.size());
  const auto a = topn_baseline(d, RetrievalConfig{5});
  const auto b = topn_baseline(d, RetrievalConfig{5});
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].score == b[i].score);
}

TEST_CASE("evaluation and CSV") {
  const auto d = one_hypothesis("heart attack", {"heart attack", "heart", "other"});
  auto preds = topn_baseline(d, RetrievalConfig{1});
  const auto e = evaluate_retrieval(d, preds);
  CHECK(e.tp == 1);
  CHECK(e.tn == 2);
  testsupport::TempDir dir;
  write_predictions_csv(preds, dir / "p.csv");
  CHECK(testsupport::read_file(dir / "p.csv").rfind("# entailloop:retrieval-predictions v1\npair_id,predicted_label,score\nc10,entail,",
                                                    0) == 0);
  preds.pop_back();
  CHECK_THROWS_AS(evaluate_retrieval(d, preds), DataError);
}
