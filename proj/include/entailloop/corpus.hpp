#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace entailloop {

enum class Label { Entail, NonEntail };
enum class Role { Train, Dev, Test, Unlabeled };

std::string_view to_string(Label label);
std::string_view to_string(Role role);
/// Accepts "entail" / "nonentail".
Label parse_label(std::string_view text);
/// Accepts "train" / "dev" / "test" / "unlabeled".
Role parse_role(std::string_view text);

/// One text-hypothesis candidate.
struct Pair {
  std::string id;
  std::string hypothesis_id;
  std::string text;
  std::string hypothesis;
  std::optional<Label> label;

  bool is_positive() const { return label == Label::Entail; }
  friend bool operator==(const Pair&, const Pair&) = default;
};

/// Named, ordered collection of pairs playing one role in an experiment.
struct Dataset {
  std::string name;
  Role role = Role::Train;
  std::vector<Pair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }

  /// Throws DataError on duplicate ids, blank text/hypothesis, or labels
  /// inconsistent with the role.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ClassDistribution {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double positive_fraction = 0.0;

  std::size_t total() const { return positives + negatives; }
  /// "810 (4.0%)"; the percentage is truncated to one decimal.
  std::string display() const;
};

/// Reads the canonical JSONL pair format.
///
/// The first line may be a header object
///   {"format":"entailloop.pairs","version":1,"name":...,"role":...}
/// Every other non-blank line is one pair with keys id, hypothesis_id, text,
/// hypothesis and optional label ("entail" | "nonentail"). `role` overrides
/// the header; without either, loading fails.
Dataset load_jsonl(const std::filesystem::path& path, std::optional<Role> role = std::nullopt);

/// Writes the header line followed by one line per pair, keys in canonical
/// order (id, hypothesis_id, text, hypothesis, label). Unlabeled pairs carry
/// no "label" key.
void save_jsonl(const Dataset& dataset, const std::filesystem::path& path);

/// TSV fixture import. Header row required; columns
/// id, hypothesis_id, label, hypothesis, text. An empty label cell means
/// unlabeled.
Dataset load_tsv(const std::filesystem::path& path, std::string name, Role role);

/// Counts by label. Throws DataError if any pair is unlabeled.
ClassDistribution class_distribution(const Dataset& dataset);

/// Synthetic stand-in for an imbalanced entailment-search corpus.
///
/// Regular positives embed a contiguous ceil(overlap_pos*|H|)-token span of
/// the hypothesis among filler tokens drawn from a power law over word
/// ranks. Regular negatives are filler only, resampled until their
/// hypothesis-token overlap is at most overlap_neg. Two knobs add realistic label noise:
///   - hard positives (paraphrases) follow the negative recipe but carry some
///     hypothesis tokens in inflected form (+s / +ed / +ing);
///   - hard negatives (topical distractors) contain ceil(overlap_pos*|H|)
///     hypothesis tokens scattered in random order.
/// With both fractions at 0 every positive has overlap >= overlap_pos and
/// every negative overlap <= overlap_neg.
struct SynthConfig {
  std::size_t n_hypotheses = 100;
  std::size_t candidates_per_hypothesis = 40;
  double positive_fraction = 0.05;
  std::size_t vocab_size = 2000;
  std::size_t hypothesis_len_min = 5;
  std::size_t hypothesis_len_max = 12;
  double overlap_pos = 0.5;
  double overlap_neg = 0.3;
  std::size_t noise_tokens_min = 4;
  std::size_t noise_tokens_max = 16;
  double hard_positive_fraction = 0.25;
  double hard_negative_fraction = 0.2;
  /// Word ranks are drawn with P(r) ~ (r + 1)^-exponent; 0 is uniform.
  double word_frequency_exponent = 0.75;
  std::uint64_t seed = 42;

  std::size_t total_pairs() const { return n_hypotheses * candidates_per_hypothesis; }
  /// Throws ConfigError when an invariant fails.
  void validate() const;
};

/// Deterministic in `config` (bitwise-identical output for equal configs).
/// Produces a Train-role dataset named "synth" with every pair labeled and
/// round(positive_fraction * total) positives.
Dataset synth_generate(const SynthConfig& config);

/// The i-th synthetic vocabulary word (lowercase consonant-vowel syllables).
std::string synth_word(std::size_t index);

struct SplitFractions {
  double train = 0.5;
  double dev = 0.25;
  double test = 0.25;
};

struct DatasetSplit {
  Dataset train;
  Dataset dev;
  Dataset test;
};

/// Splits by hypothesis_id. Distinct ids are collected in first-appearance
/// order, shuffled with Rng(seed).shuffle, and the first round(train*H) go to
/// train, the next round(dev*H) to dev, the rest to test. Pair order within
/// each split follows the input.
DatasetSplit split_dataset(const Dataset& dataset, SplitFractions fractions, std::uint64_t seed);

/// Copy of `dataset` with labels removed, role Unlabeled, and ids and
/// hypothesis ids prefixed with `id_prefix`.
Dataset strip_labels(const Dataset& dataset, std::string name, std::string_view id_prefix = "");

struct LengthStats {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean and population standard deviation of text lengths in
/// whitespace-delimited words. Throws DataError on an empty dataset.
LengthStats sentence_length_stats(const Dataset& dataset);

}  // namespace entailloop
