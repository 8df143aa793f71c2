#include "entailloop/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "entailloop/csv.hpp"
#include "entailloop/error.hpp"
#include "entailloop/matchers.hpp"

namespace entailloop {

void RetrievalConfig::validate() const {
  if (n_top < 1) throw ConfigError("n_top must be >= 1");
  if (!(k1 >= 0.0) || !std::isfinite(k1)) throw ConfigError("k1 must be >= 0");
  if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("b must be in [0,1]");
}

std::vector<ScoredCandidate> bm25_rank(const std::vector<std::string>& query, const std::vector<Candidate>& candidates,
                                       double k1, double b) {
  const std::set<std::string> terms(query.begin(), query.end());
  const auto n = static_cast<double>(candidates.size());
  double total_len = 0.0;
  for (const auto& c : candidates) total_len += static_cast<double>(c.terms.size());
  const double avgdl = candidates.empty() ? 0.0 : total_len / n;

  std::vector<std::unordered_map<std::string, double>> tf(candidates.size());
  std::map<std::string, double> df;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (const auto& t : candidates[i].terms) {
      if (terms.count(t)) tf[i][t] += 1.0;
    }
    for (const auto& [t, count] : tf[i]) df[t] += 1.0;
  }

  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double score = 0.0;
    const double dl = static_cast<double>(candidates[i].terms.size());
    const double norm = avgdl > 0.0 ? k1 * (1.0 - b + b * dl / avgdl) : k1;
    for (const auto& t : terms) {
      const auto it = tf[i].find(t);
      if (it == tf[i].end()) continue;
      const double d = df[t];
      const double idf = std::log(1.0 + (n - d + 0.5) / (d + 0.5));
      score += idf * it->second * (k1 + 1.0) / (it->second + norm);
    }
    out.push_back({candidates[i].pair_id, score});
  }
  std::sort(out.begin(), out.end(), [](const ScoredCandidate& x, const ScoredCandidate& y) {
    return x.score != y.score ? x.score > y.score : x.pair_id < y.pair_id;
  });
  return out;
}

std::vector<std::string> retrieval_terms(std::string_view sentence) {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(sentence)) {
    if (is_punctuation(tok)) continue;
    if (tok.is_multiword) {
      for (const auto& p : tok.parts) out.push_back(casefold(p));
    } else {
      out.push_back(tok.norm);
    }
  }
  return out;
}

std::vector<RetrievalPrediction> topn_baseline(const Dataset& dataset, const RetrievalConfig& config) {
  config.validate();
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
    auto [it, fresh] = groups.try_emplace(dataset.pairs[i].hypothesis_id);
    if (fresh) order.push_back(dataset.pairs[i].hypothesis_id);
    it->second.push_back(i);
  }

  std::vector<RetrievalPrediction> out(dataset.pairs.size());
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
    out[i].pair_id = dataset.pairs[i].id;
    index[dataset.pairs[i].id] = i;
  }
  for (const auto& hid : order) {
    const auto& rows = groups[hid];
    std::vector<Candidate> cands;
    cands.reserve(rows.size());
    for (auto r : rows) cands.push_back({dataset.pairs[r].id, retrieval_terms(dataset.pairs[r].text)});
    const auto ranked = bm25_rank(retrieval_terms(dataset.pairs[rows.front()].hypothesis), cands, config.k1, config.b);
    for (std::size_t k = 0; k < ranked.size(); ++k) {
      auto& pred = out[index.at(ranked[k].pair_id)];
      pred.score = ranked[k].score;
      pred.label = k < config.n_top ? Label::Entail : Label::NonEntail;
    }
  }
  return out;
}

EvalResult evaluate_retrieval(const Dataset& dataset, const std::vector<RetrievalPrediction>& predictions) {
  if (predictions.size() != dataset.pairs.size()) throw DataError("prediction count does not match dataset");
  std::vector<bool> predicted;
  std::vector<bool> gold;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& pair = dataset.pairs[i];
    if (!pair.label) throw DataError("pair " + pair.id + " is unlabeled");
    if (predictions[i].pair_id != pair.id) throw DataError("prediction order does not match dataset at " + pair.id);
    predicted.push_back(predictions[i].label == Label::Entail);
    gold.push_back(pair.is_positive());
  }
  return evaluate_predictions(predicted, gold);
}

void write_predictions_csv(const std::vector<RetrievalPrediction>& predictions, const std::filesystem::path& path) {
  CsvWriter csv(path, "retrieval-predictions", {"pair_id", "predicted_label", "score"});
  for (const auto& p : predictions) csv.row({p.pair_id, std::string(to_string(p.label)), format_double(p.score)});
}

}  // namespace entailloop
