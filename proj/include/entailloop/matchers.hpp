#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace entailloop {

/// A word, punctuation mark, date expression, or run of capitalized words.
struct Token {
  std::string surface;
  std::string norm;  // ASCII-casefolded surface
  std::size_t position = 0;
  bool is_multiword = false;
  std::vector<std::string> parts;  // constituent words, non-empty iff is_multiword

  friend bool operator==(const Token&, const Token&) = default;
};

/// Builds a token from a surface string. Surfaces containing spaces become
/// multiword tokens unless they parse as a date.
Token make_token(std::string_view surface, std::size_t position = 0);

std::string casefold(std::string_view s);

/// True for tokens made only of ASCII punctuation. No matcher fires on them.
bool is_punctuation(const Token& token);

/// Splits on whitespace and punctuation; punctuation characters become their
/// own tokens. Date expressions (see normalize_date) are kept whole, and runs
/// of two or more consecutive capitalized words are merged into one
/// multiword token. Positions index the returned list.
std::vector<Token> tokenize(std::string_view sentence);

enum class MatcherKind { Exact, MultiWord, Head, Morphology, DateTime };

std::string_view to_string(MatcherKind kind);

/// Tie-break rank inside match_all; lower wins.
int matcher_priority(MatcherKind kind);

struct TermMatch {
  std::size_t text_pos = 0;
  std::size_t hyp_pos = 0;
  MatcherKind matcher = MatcherKind::Exact;
  double confidence = 1.0;

  friend bool operator==(const TermMatch&, const TermMatch&) = default;
};

/// Confidences for matchers that do not derive their own.
struct MatcherConfig {
  double head_confidence = 0.9;
  double morphology_confidence = 0.8;

  void validate() const;
};

/// Suffix-rewrite stemmer driven by an ordered rule list.
///
/// For a word, the longest suffix that has a rule is selected; if removing it
/// leaves fewer than min_stem_length characters the word is left as is.
/// Otherwise every rule for that suffix yields one candidate stem. When a rule's replacement is empty and the stem ends
/// in a doubled consonant other than l, s or z, the double is reduced
/// ("running" -> "run"). Words with no applicable rule stem to themselves.
class Stemmer {
 public:
  using Rule = std::pair<std::string, std::string>;

  explicit Stemmer(std::vector<Rule> rules, std::size_t min_stem_length = 3);

  /// The built-in rule set (identical to data/stemmer_rules.tsv).
  static const Stemmer& default_stemmer();
  /// One rule per line, "suffix<TAB>replacement"; blank lines and lines
  /// starting with '#' are skipped.
  static Stemmer from_file(const std::filesystem::path& path);

  std::vector<std::string> stems(std::string_view word) const;
  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
  std::size_t min_stem_length_;
};

/// ISO-8601 form of MM/DD/YYYY, YYYY-MM-DD or "<MonthName> D, YYYY";
/// nullopt when the string is not a complete, valid calendar date.
std::optional<std::string> normalize_date(std::string_view text);

// Each matcher takes (text token, hypothesis token) and reports positions in
// that order. Boolean outcomes are symmetric in the arguments.

/// Case-insensitive full-token equality, confidence 1.
std::optional<TermMatch> exact_match(const Token& a, const Token& b);

/// Requires a multiword side. Confidence = shared parts / max part count.
std::optional<TermMatch> multiword_overlap(const Token& a, const Token& b);

/// Requires a multiword side. The rightmost part of a multiword token is its
/// head; it must equal the other token (or the other token's head).
std::optional<TermMatch> head_match(const Token& a, const Token& b, double confidence = 0.9);

/// Non-identical single words whose candidate stems intersect.
std::optional<TermMatch> morphology_match(const Token& a, const Token& b, double confidence = 0.8,
                                          const Stemmer& stemmer = Stemmer::default_stemmer());

/// Both tokens normalize to the same calendar date, confidence 1.
std::optional<TermMatch> datetime_match(const Token& a, const Token& b);

/// Runs every matcher on every (text, hypothesis) token pair and keeps the
/// best match per position pair: highest confidence, ties broken by
/// matcher_priority. Sorted by (hyp_pos, text_pos).
std::vector<TermMatch> match_all(const std::vector<Token>& text_tokens,
                                 const std::vector<Token>& hyp_tokens,
                                 const MatcherConfig& config = {},
                                 const Stemmer& stemmer = Stemmer::default_stemmer());

}  // namespace entailloop
