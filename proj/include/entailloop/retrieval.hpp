#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "entailloop/classifier.hpp"
#include "entailloop/corpus.hpp"

namespace entailloop {

struct RetrievalConfig {
  std::size_t n_top = 10;
  double k1 = 1.2;
  double b = 0.75;

  void validate() const;
};

struct Candidate {
  std::string pair_id;
  std::vector<std::string> terms;
};

struct ScoredCandidate {
  std::string pair_id;
  double score = 0.0;
};

/// BM25 with the candidate list as the whole collection:
///   idf(q) = ln(1 + (N - df + 0.5) / (df + 0.5))
///   score  = sum over distinct query terms of idf * tf (k1 + 1) / (tf + k1 (1 - b + b dl / avgdl))
/// Sorted by score descending, then pair id ascending.
std::vector<ScoredCandidate> bm25_rank(const std::vector<std::string>& query, const std::vector<Candidate>& candidates,
                                       double k1 = 1.2, double b = 0.75);

/// Casefolded word tokens with multiword tokens expanded into their parts;
/// punctuation dropped.
std::vector<std::string> retrieval_terms(std::string_view sentence);

struct RetrievalPrediction {
  std::string pair_id;
  Label label = Label::NonEntail;
  double score = 0.0;
};

/// Per hypothesis, the top min(n_top, #candidates) candidates by BM25 are
/// predicted Entail. Output follows dataset order.
std::vector<RetrievalPrediction> topn_baseline(const Dataset& dataset, const RetrievalConfig& config = {});

/// Scores predictions against the dataset's gold labels (same order).
EvalResult evaluate_retrieval(const Dataset& dataset, const std::vector<RetrievalPrediction>& predictions);

/// "pair_id,predicted_label,score"
void write_predictions_csv(const std::vector<RetrievalPrediction>& predictions, const std::filesystem::path& path);

}  // namespace entailloop
