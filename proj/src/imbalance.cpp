#include "entailloop/imbalance.hpp"

#include <algorithm>
#include <numeric>

#include "entailloop/csv.hpp"
#include "entailloop/error.hpp"
#include "entailloop/rng.hpp"

namespace entailloop {

namespace {

struct ClassRows {
  std::vector<Eigen::Index> minority;
  std::vector<Eigen::Index> majority;
};

ClassRows split_classes(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels) {
  if (features.rows() != labels.size()) throw DataError("resample: feature rows and labels differ in length");
  std::vector<Eigen::Index> pos;
  std::vector<Eigen::Index> neg;
  for (Eigen::Index i = 0; i < labels.size(); ++i) (labels(i) > 0.5 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw DataError("resample: both classes must be present");
  if (pos.size() <= neg.size()) return {std::move(pos), std::move(neg)};
  return {std::move(neg), std::move(pos)};
}

Resampled gather(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, std::vector<Eigen::Index> rows) {
  Resampled out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.features.row(static_cast<Eigen::Index>(k)) = features.row(rows[k]);
    out.labels(static_cast<Eigen::Index>(k)) = labels(rows[k]);
  }
  out.source_rows = std::move(rows);
  return out;
}

}  // namespace

Resampled downsample(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, std::uint64_t seed) {
  auto [minority, majority] = split_classes(features, labels);
  Rng rng(seed);
  // Partial Fisher-Yates: the first |minority| slots are a uniform sample.
  for (std::size_t i = 0; i < minority.size(); ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(majority.size() - i));
    std::swap(majority[i], majority[j]);
  }
  majority.resize(minority.size());
  std::vector<Eigen::Index> keep = minority;
  keep.insert(keep.end(), majority.begin(), majority.end());
  std::sort(keep.begin(), keep.end());
  return gather(features, labels, std::move(keep));
}

Resampled upsample(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, std::uint64_t seed) {
  const auto [minority, majority] = split_classes(features, labels);
  Rng rng(seed);
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(features.rows()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  for (std::size_t i = minority.size(); i < majority.size(); ++i) {
    rows.push_back(minority[static_cast<std::size_t>(rng.uniform_index(minority.size()))]);
  }
  return gather(features, labels, std::move(rows));
}

namespace {

FeatureTable table_from(const FeatureTable& table, const Resampled& r) {
  FeatureTable out;
  out.names = table.names;
  out.values = r.features;
  std::vector<int> copies(static_cast<std::size_t>(table.rows()), 0);
  for (auto src : r.source_rows) {
    const auto s = static_cast<std::size_t>(src);
    const int copy = copies[s]++;
    out.pair_ids.push_back(copy == 0 ? table.pair_ids[s] : table.pair_ids[s] + "#dup" + std::to_string(copy));
    out.labels.push_back(table.labels[s]);
  }
  return out;
}

}  // namespace

FeatureTable downsample(const FeatureTable& table, std::uint64_t seed) {
  return table_from(table, downsample(table.values, table.targets(), seed));
}

FeatureTable upsample(const FeatureTable& table, std::uint64_t seed) {
  return table_from(table, upsample(table.values, table.targets(), seed));
}

std::vector<Eigen::Index> knn(const Eigen::MatrixXd& points, Eigen::Index query, Eigen::Index k,
                              const Eigen::VectorXd& scale) {
  const Eigen::Index n = points.rows();
  if (query < 0 || query >= n) throw DataError("knn: query index out of range");
  if (k < 0 || k > n - 1) {
    throw DataError("knn: k=" + std::to_string(k) + " exceeds the " + std::to_string(n - 1) + " other points");
  }
  if (scale.size() != 0 && scale.size() != points.cols()) throw DataError("knn: scale length mismatch");

  std::vector<std::pair<double, Eigen::Index>> dist;
  dist.reserve(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == query) continue;
    Eigen::VectorXd diff = (points.row(i) - points.row(query)).transpose();
    if (scale.size() != 0) diff = diff.cwiseQuotient(scale);
    dist.emplace_back(diff.squaredNorm(), i);
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) out.push_back(dist[static_cast<std::size_t>(j)].second);
  return out;
}

void SmoteConfig::validate() const {
  if (k < 1) throw ConfigError("smote: k must be >= 1");
}

std::vector<SyntheticInstance> smote(const Eigen::MatrixXd& minority, const std::vector<std::string>& ids,
                                     const SmoteConfig& config, const Eigen::VectorXd& scale) {
  config.validate();
  const Eigen::Index m = minority.rows();
  if (m < 2) throw DataError("smote: need at least 2 minority rows, got " + std::to_string(m));
  if (static_cast<Eigen::Index>(ids.size()) != m) throw DataError("smote: ids do not match minority rows");
  const Eigen::Index k = std::min(config.k, m - 1);

  std::vector<std::vector<Eigen::Index>> neighbors(static_cast<std::size_t>(m));
  Rng rng(config.seed);
  std::vector<SyntheticInstance> out;
  out.reserve(config.n_synthetic);
  for (std::size_t s = 0; s < config.n_synthetic; ++s) {
    const auto src = static_cast<Eigen::Index>(s % static_cast<std::size_t>(m));
    auto& nn = neighbors[static_cast<std::size_t>(src)];
    if (nn.empty()) nn = knn(minority, src, k, scale);
    const Eigen::Index nb = nn[static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(k)))];
    const double lambda = rng.uniform_closed01();
    SyntheticInstance inst;
    inst.values = (minority.row(src) + lambda * (minority.row(nb) - minority.row(src))).transpose();
    inst.source_id = ids[static_cast<std::size_t>(src)];
    inst.neighbor_id = ids[static_cast<std::size_t>(nb)];
    inst.source_row = src;
    inst.neighbor_row = nb;
    inst.lambda = lambda;
    out.push_back(std::move(inst));
  }
  return out;
}

FeatureTable with_synthetic(const FeatureTable& table, const std::vector<SyntheticInstance>& synthetic, Label label) {
  FeatureTable extra;
  extra.names = table.names;
  extra.values.resize(static_cast<Eigen::Index>(synthetic.size()), static_cast<Eigen::Index>(table.names.size()));
  for (std::size_t i = 0; i < synthetic.size(); ++i) {
    extra.values.row(static_cast<Eigen::Index>(i)) = synthetic[i].values.transpose();
    extra.pair_ids.push_back("smote:" + std::to_string(i));
    extra.labels.push_back(label);
  }
  FeatureTable out = table;
  out.append(extra);
  return out;
}

void write_synthetic_csv(const std::vector<std::string>& names, const std::vector<SyntheticInstance>& synthetic,
                         const std::filesystem::path& path) {
  std::vector<std::string> header{"pair_id", "label"};
  header.insert(header.end(), names.begin(), names.end());
  header.insert(header.end(), {"source_id", "neighbor_id", "lambda"});
  CsvWriter csv(path, "smote-synthetic", header);
  for (std::size_t i = 0; i < synthetic.size(); ++i) {
    std::vector<std::string> row{"smote:" + std::to_string(i), "entail"};
    for (Eigen::Index j = 0; j < synthetic[i].values.size(); ++j) row.push_back(format_double(synthetic[i].values(j)));
    row.push_back(synthetic[i].source_id);
    row.push_back(synthetic[i].neighbor_id);
    row.push_back(format_double(synthetic[i].lambda));
    csv.row(row);
  }
}

}  // namespace entailloop
