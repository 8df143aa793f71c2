#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "entailloop/error.hpp"
#include "entailloop/imbalance.hpp"
#include "entailloop/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace entailloop;
using testsupport::random_matrix;

namespace {

Eigen::VectorXd labels_with(Eigen::Index pos, Eigen::Index neg) {
  Eigen::VectorXd y(pos + neg);
  y.head(pos).setOnes();
  y.tail(neg).setZero();
  return y;
}

long count_pos(const Eigen::VectorXd& y) { return static_cast<long>(y.sum()); }

}  // namespace

TEST_CASE("downsample 10/90") {
  Rng rng(1);
  const Eigen::MatrixXd X = random_matrix(rng, 100, 3);
  const Eigen::VectorXd y = labels_with(10, 90);
  const auto r = downsample(X, y, 5);
  CHECK(r.labels.size() == 20);
  CHECK(count_pos(r.labels) == 10);
  CHECK(std::is_sorted(r.source_rows.begin(), r.source_rows.end()));
  for (Eigen::Index i = 0; i < r.features.rows(); ++i) {
    CHECK(r.features.row(i) == X.row(r.source_rows[static_cast<std::size_t>(i)]));
  }
  for (Eigen::Index i = 0; i < 10; ++i) CHECK(r.source_rows[static_cast<std::size_t>(i)] == i);  // minority untouched
  const auto again = downsample(X, y, 5);
  CHECK(again.source_rows == r.source_rows);
  CHECK(downsample(X, y, 6).source_rows != r.source_rows);
}

TEST_CASE("upsample 10/90") {
  Rng rng(2);
  const Eigen::MatrixXd X = random_matrix(rng, 100, 3);
  const Eigen::VectorXd y = labels_with(10, 90);
  const auto r = upsample(X, y, 5);
  CHECK(r.labels.size() == 180);
  CHECK(count_pos(r.labels) == 90);
  CHECK(r.features.topRows(100) == X);
  for (Eigen::Index i = 100; i < 180; ++i) {
    const auto src = r.source_rows[static_cast<std::size_t>(i)];
    CHECK(src < 10);
    CHECK(r.features.row(i) == X.row(src));
    CHECK(r.labels(i) == 1.0);
  }
}

TEST_CASE("already balanced is a fixed point") {
  Rng rng(3);
  const Eigen::MatrixXd X = random_matrix(rng, 8, 2);
  const Eigen::VectorXd y = labels_with(4, 4);
  CHECK(downsample(X, y, 1).features == X);
  CHECK(upsample(X, y, 1).features == X);
}

TEST_CASE("minority may be the negative class") {
  Rng rng(4);
  const Eigen::MatrixXd X = random_matrix(rng, 30, 2);
  const Eigen::VectorXd y = labels_with(25, 5);
  CHECK(count_pos(downsample(X, y, 1).labels) == 5);
  CHECK(upsample(X, y, 1).labels.size() == 50);
}

TEST_CASE("single class is an error") {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3, 1);
  CHECK_THROWS_AS(downsample(X, labels_with(3, 0), 1), DataError);
  CHECK_THROWS_AS(upsample(X, labels_with(0, 3), 1), DataError);
}

TEST_CASE("feature table resampling renames duplicates") {
  FeatureTable t;
  t.names = {"f"};
  t.values = Eigen::MatrixXd(4, 1);
  t.values << 1, 2, 3, 4;
  t.pair_ids = {"a", "b", "c", "d"};
  t.labels = {Label::Entail, Label::NonEntail, Label::NonEntail, Label::NonEntail};
  const auto up = upsample(t, 3);
  CHECK(up.rows() == 6);
  CHECK(up.pair_ids[4] == "a#dup1");
  CHECK(up.pair_ids[5] == "a#dup2");
  const auto down = downsample(t, 3);
  CHECK(down.rows() == 2);
  CHECK(down.pair_ids[0] == "a");
}

TEST_CASE("knn examples") {
  Eigen::MatrixXd line(3, 1);
  line << 0, 1, 5;
  CHECK(knn(line, 0, 1) == std::vector<Eigen::Index>{1});
  Eigen::MatrixXd dup(4, 2);
  dup << 0, 0, 3, 3, 0, 0, 1, 1;
  CHECK(knn(dup, 0, 2) == std::vector<Eigen::Index>{2, 3});
  Eigen::MatrixXd tie(3, 1);
  tie << 0, -1, 1;
  CHECK(knn(tie, 0, 1) == std::vector<Eigen::Index>{1});  // equal distance, lower index
  CHECK_THROWS_AS(knn(line, 0, 3), DataError);
  CHECK_THROWS_AS(knn(line, 3, 1), DataError);
}

TEST_CASE("knn matches exhaustive sort") {
  Rng rng(5);
  const Eigen::MatrixXd P = random_matrix(rng, 50, 4);
  for (Eigen::Index q = 0; q < 50; ++q) CHECK(knn(P, q, 5) == oracle::knn(P, q, 5));
  // Scaling columns equals searching the rescaled points.
  Eigen::VectorXd scale(4);
  scale << 1, 10, 0.5, 2;
  const Eigen::MatrixXd scaled = P.array().rowwise() / scale.transpose().array();
  for (Eigen::Index q = 0; q < 50; ++q) CHECK(knn(P, q, 5, scale) == oracle::knn(scaled, q, 5));
}

TEST_CASE("smote examples") {
  Eigen::MatrixXd two(2, 2);
  two << 0, 0, 2, 2;
  SmoteConfig cfg;
  cfg.n_synthetic = 50;
  cfg.seed = 3;
  const auto synth = smote(two, {"s", "n"}, cfg);
  REQUIRE(synth.size() == 50);
  CHECK(cfg.k == 5);  // clamped internally to 1
  for (std::size_t i = 0; i < synth.size(); ++i) {
    CHECK(synth[i].source_row == static_cast<Eigen::Index>(i % 2));
    const auto& s = synth[i];
    CHECK(s.values(0) == doctest::Approx(s.source_row == 0 ? 2 * s.lambda : 2 - 2 * s.lambda));
  }
  // Midpoint and endpoint arithmetic.
  const Eigen::Vector2d src(0, 0), nb(2, 2);
  CHECK((src + 0.5 * (nb - src)) == Eigen::Vector2d(1, 1));
  CHECK((src + 0.0 * (nb - src)) == src);
  CHECK_THROWS_AS(smote(two.topRows(1), {"s"}, cfg), DataError);
  SmoteConfig bad;
  bad.k = 0;
  CHECK_THROWS_AS(smote(two, {"s", "n"}, bad), ConfigError);
}

TEST_CASE("smote geometry") {
  Rng rng(6);
  const Eigen::MatrixXd M = random_matrix(rng, 30, 5, -3, 3);
  std::vector<std::string> ids;
  for (int i = 0; i < 30; ++i) ids.push_back("m" + std::to_string(i));
  SmoteConfig cfg;
  cfg.n_synthetic = 1000;
  cfg.seed = 8;
  const auto synth = smote(M, ids, cfg);
  REQUIRE(synth.size() == 1000);
  std::set<Eigen::Index> sources;
  for (const auto& s : synth) {
    const Eigen::VectorXd a = M.row(s.source_row).transpose(), b = M.row(s.neighbor_row).transpose();
    const auto fit = oracle::segment_lambda(a, b, s.values);
    REQUIRE(fit);
    CHECK(fit->first >= 0.0);
    CHECK(fit->first <= 1.0);
    CHECK(std::abs(fit->first - s.lambda) < 1e-9);
    CHECK(fit->second < 1e-9);
    CHECK((s.values.array() >= a.cwiseMin(b).array() - 1e-12).all());
    CHECK((s.values.array() <= a.cwiseMax(b).array() + 1e-12).all());
    const auto nn = oracle::knn(M, s.source_row, 5);
    CHECK(std::find(nn.begin(), nn.end(), s.neighbor_row) != nn.end());
    CHECK(s.source_id == ids[static_cast<std::size_t>(s.source_row)]);
    sources.insert(s.source_row);
  }
  CHECK(sources.size() == 30);
  // Deterministic in the seed.
  const auto again = smote(M, ids, cfg);
  for (std::size_t i = 0; i < synth.size(); ++i) CHECK(again[i].values == synth[i].values);
}

TEST_CASE("with_synthetic adds exactly n positives") {
  FeatureTable t;
  t.names = {"a", "b"};
  t.values = Eigen::MatrixXd(3, 2);
  t.values << 0, 0, 1, 1, 5, 5;
  t.pair_ids = {"x", "y", "z"};
  t.labels = {Label::Entail, Label::Entail, Label::NonEntail};
  SmoteConfig cfg;
  cfg.n_synthetic = 7;
  const auto synth = smote(t.values.topRows(2), {"x", "y"}, cfg);
  const auto joined = with_synthetic(t, synth);
  CHECK(joined.rows() == 10);
  CHECK(std::count(joined.labels.begin(), joined.labels.end(), Label::Entail) == 2 + 7);
  CHECK(joined.pair_ids.back() == "smote:6");

  testsupport::TempDir dir;
  write_synthetic_csv(t.names, synth, dir / "s.csv");
  const auto text = testsupport::read_file(dir / "s.csv");
  CHECK(text.rfind("# entailloop:smote-synthetic v1\npair_id,label,a,b,source_id,neighbor_id,lambda\n", 0) == 0);
}
