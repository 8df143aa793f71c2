#pragma once

// Reference implementations used as test oracles. They are deliberately
// naive: full enumerations, finite differences, whole-array sorts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double f1(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

inline double f1_counts(long tp, long fp, long fn) {
  const double p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
  const double r = tp + fn ? double(tp) / double(tp + fn) : 0.0;
  return f1(p, r);
}

/// Plain regularized logistic loss, bias last and unpenalized.
inline double objective(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        double lambda) {
  const Eigen::Index d = X.cols();
  double total = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double z = X.row(i).dot(theta.head(d)) + theta(d);
    total += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - y(i) * z;
  }
  return total + 0.5 * lambda * theta.head(d).squaredNorm();
}

template <typename Fn>
Eigen::VectorXd central_difference(const Fn& f, const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd up = x, down = x;
    up(j) += h;
    down(j) -= h;
    g(j) = (f(up) - f(down)) / (2 * h);
  }
  return g;
}

/// Exact two-sided randomization p-value: every one of the 2^n swap patterns
/// over all pairs, agreeing ones included.
inline double exhaustive_p(const std::vector<bool>& a, const std::vector<bool>& b, const std::vector<bool>& gold) {
  const std::size_t n = gold.size();
  auto fscore = [&](const std::vector<bool>& pred) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      tp += pred[i] && gold[i];
      fp += pred[i] && !gold[i];
      fn += !pred[i] && gold[i];
    }
    return f1_counts(tp, fp, fn);
  };
  const double observed = std::abs(fscore(a) - fscore(b));
  std::uint64_t hits = 0;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    std::vector<bool> x = a, y = b;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) {
        const bool t = x[i];
        x[i] = y[i];
        y[i] = t;
      }
    }
    if (std::abs(fscore(x) - fscore(y)) >= observed - 1e-12) ++hits;
  }
  return double(hits) / double(patterns);
}

/// k nearest rows to `query` by full sort on (distance, index).
inline std::vector<Eigen::Index> knn(const Eigen::MatrixXd& points, Eigen::Index query, Eigen::Index k) {
  std::vector<std::pair<double, Eigen::Index>> all;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (i == query) continue;
    double d2 = 0;
    for (Eigen::Index j = 0; j < points.cols(); ++j) d2 += std::pow(points(i, j) - points(query, j), 2);
    all.emplace_back(d2, i);
  }
  std::sort(all.begin(), all.end());
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < k; ++i) out.push_back(all[static_cast<std::size_t>(i)].second);
  return out;
}

/// Lambda implied by the first component where source and neighbor differ,
/// or nullopt when they coincide. Returns (lambda, max componentwise error).
inline std::optional<std::pair<double, double>> segment_lambda(const Eigen::VectorXd& source,
                                                               const Eigen::VectorXd& neighbor,
                                                               const Eigen::VectorXd& value) {
  Eigen::Index first = -1;
  for (Eigen::Index j = 0; j < source.size(); ++j) {
    if (neighbor(j) != source(j)) {
      first = j;
      break;
    }
  }
  if (first < 0) return std::nullopt;
  const double lambda = (value(first) - source(first)) / (neighbor(first) - source(first));
  double err = 0.0;
  for (Eigen::Index j = 0; j < source.size(); ++j) {
    err = std::max(err, std::abs(source(j) + lambda * (neighbor(j) - source(j)) - value(j)));
  }
  return std::make_pair(lambda, err);
}

/// argmin |p - 0.5| with exact ties resolved by smallest id, by linear scan.
inline std::size_t most_uncertain(const std::vector<double>& probs, const std::vector<std::string>& ids) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    const double di = std::abs(probs[i] - 0.5), db = std::abs(probs[best] - 0.5);
    if (di < db - 1e-12 || (std::abs(di - db) <= 1e-12 && ids[i] < ids[best])) best = i;
  }
  return best;
}

/// The (P, R, F) rows of the two published result tables, distinct rows only.
struct PublishedRow {
  const char* system;
  const char* domain;
  double p, r, f;
};

inline const std::vector<PublishedRow>& published_rows() {
  static const std::vector<PublishedRow> rows{
      {"Lucene", "newswire", 0.47, 0.48, 0.47}, {"EDITS", "newswire", 0.22, 0.57, 0.32},
      {"TIE", "newswire", 0.66, 0.21, 0.31},    {"ENT", "newswire", 0.77, 0.26, 0.39},
      {"Lucene", "clinical", 0.16, 0.22, 0.19}, {"EDITS", "clinical", 0.23, 0.21, 0.20},
      {"TIE", "clinical", 0.43, 0.01, 0.02},    {"ENT", "clinical", 0.42, 0.15, 0.23},
      {"ENT+self-training", "newswire", 0.62, 0.48, 0.54},
      {"ENT+self-training", "clinical", 0.34, 0.39, 0.36},
  };
  return rows;
}

/// Smallest-total confusion counts (tp, fp, fn) up to `max_total` whose
/// precision and recall round to (p, r) at two decimals and whose F rounds
/// within `tol` of f.
inline std::optional<std::tuple<long, long, long>> counts_for(double p, double r, double f, double tol,
                                                             long max_total = 400) {
  auto round2 = [](double x) { return std::round(x * 100.0) / 100.0; };
  for (long total = 1; total <= max_total; ++total) {
    for (long tp = 1; tp <= total; ++tp) {
      for (long fp = 0; tp + fp <= total; ++fp) {
        const long fn = total - tp - fp;
        const double pp = double(tp) / double(tp + fp), rr = double(tp) / double(tp + fn);
        if (round2(pp) != p || round2(rr) != r) continue;
        if (std::abs(f1(pp, rr) - f) <= tol) return std::make_tuple(tp, fp, fn);
      }
    }
  }
  return std::nullopt;
}

}  // namespace oracle
