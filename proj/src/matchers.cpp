#include "entailloop/matchers.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <tuple>

#include "entailloop/error.hpp"

namespace entailloop {

namespace {

bool is_ascii_punct(unsigned char c) { return c < 128 && std::ispunct(c); }
bool is_ascii_space(unsigned char c) { return c < 128 && std::isspace(c); }

bool is_capitalized_word(std::string_view w) {
  if (w.empty() || !std::isupper(static_cast<unsigned char>(w.front()))) return false;
  return std::all_of(w.begin(), w.end(), [](unsigned char c) { return c < 128 && std::isalpha(c); });
}

std::vector<std::string> split_spaces(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_ascii_space(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[static_cast<std::size_t>(m - 1)];
}

std::optional<std::string> iso_date(int y, int m, int d) {
  if (y < 1 || y > 9999 || m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return std::string(buf);
}

const std::regex& date_search_regex() {
  static const std::regex re(
      R"(\b\d{1,2}/\d{1,2}/\d{4}\b|\b\d{4}-\d{2}-\d{2}\b|\b(january|february|march|april|may|june|july|august|september|october|november|december)\s+\d{1,2}\s*,\s*\d{4}\b)",
      std::regex::ECMAScript | std::regex::icase);
  return re;
}

Token word_token(std::string surface) {
  Token t;
  t.norm = casefold(surface);
  t.surface = std::move(surface);
  return t;
}

Token multiword_token(const std::vector<std::string>& words) {
  Token t;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) t.surface += ' ';
    t.surface += words[i];
  }
  t.norm = casefold(t.surface);
  t.is_multiword = true;
  t.parts = words;
  return t;
}

// Appends tokens for a span that contains no date expression.
void tokenize_plain(std::string_view span, std::vector<Token>& out) {
  std::vector<std::string> run;  // pending capitalized words
  auto flush_run = [&] {
    if (run.size() >= 2) {
      out.push_back(multiword_token(run));
    } else if (run.size() == 1) {
      out.push_back(word_token(run.front()));
    }
    run.clear();
  };
  auto emit_word = [&](std::string w) {
    if (is_capitalized_word(w)) {
      run.push_back(std::move(w));
    } else {
      flush_run();
      out.push_back(word_token(std::move(w)));
    }
  };

  std::string word;
  for (char ch : span) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_ascii_space(c)) {
      if (!word.empty()) emit_word(std::move(word));
      word.clear();
    } else if (is_ascii_punct(c)) {
      if (!word.empty()) emit_word(std::move(word));
      word.clear();
      flush_run();
      out.push_back(word_token(std::string(1, ch)));
    } else {
      word += ch;
    }
  }
  if (!word.empty()) emit_word(std::move(word));
  flush_run();
}

std::set<std::string> part_set(const Token& t) {
  std::set<std::string> parts;
  if (t.is_multiword) {
    for (const auto& p : t.parts) parts.insert(casefold(p));
  } else {
    parts.insert(t.norm);
  }
  return parts;
}

std::string head_of(const Token& t) { return t.is_multiword ? casefold(t.parts.back()) : t.norm; }

TermMatch make_match(const Token& a, const Token& b, MatcherKind kind, double confidence) {
  return TermMatch{a.position, b.position, kind, confidence};
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

}  // namespace

std::string casefold(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return c < 128 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
  });
  return out;
}

Token make_token(std::string_view surface, std::size_t position) {
  const auto words = split_spaces(surface);
  Token t;
  if (words.size() >= 2 && !normalize_date(surface)) {
    t = multiword_token(words);
  } else {
    t = word_token(std::string(surface));
  }
  t.position = position;
  return t;
}

bool is_punctuation(const Token& token) {
  return !token.surface.empty() &&
         std::all_of(token.surface.begin(), token.surface.end(),
                     [](unsigned char c) { return is_ascii_punct(c); });
}

std::vector<Token> tokenize(std::string_view sentence) {
  std::vector<Token> out;
  const std::string s(sentence);
  std::size_t cursor = 0;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), date_search_regex());
       it != std::sregex_iterator(); ++it) {
    const auto begin = static_cast<std::size_t>(it->position());
    const std::string matched = it->str();
    if (!normalize_date(matched)) continue;
    tokenize_plain(std::string_view(s).substr(cursor, begin - cursor), out);
    out.push_back(word_token(matched));
    cursor = begin + matched.size();
  }
  tokenize_plain(std::string_view(s).substr(cursor), out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].position = i;
  return out;
}

std::string_view to_string(MatcherKind kind) {
  switch (kind) {
    case MatcherKind::Exact: return "exact";
    case MatcherKind::MultiWord: return "multiword";
    case MatcherKind::Head: return "head";
    case MatcherKind::Morphology: return "morphology";
    case MatcherKind::DateTime: return "datetime";
  }
  return "exact";
}

int matcher_priority(MatcherKind kind) {
  switch (kind) {
    case MatcherKind::Exact: return 0;
    case MatcherKind::DateTime: return 1;
    case MatcherKind::Morphology: return 2;
    case MatcherKind::Head: return 3;
    case MatcherKind::MultiWord: return 4;
  }
  return 5;
}

void MatcherConfig::validate() const {
  if (!(head_confidence > 0.0 && head_confidence <= 1.0)) {
    throw ConfigError("head_confidence must be in (0,1]");
  }
  if (!(morphology_confidence > 0.0 && morphology_confidence <= 1.0)) {
    throw ConfigError("morphology_confidence must be in (0,1]");
  }
}

// ---------------------------------------------------------------------------
// stemmer

Stemmer::Stemmer(std::vector<Rule> rules, std::size_t min_stem_length)
    : rules_(std::move(rules)), min_stem_length_(min_stem_length) {
  for (const auto& [suffix, replacement] : rules_) {
    if (suffix.empty()) throw ConfigError("stemmer rule with empty suffix");
  }
}

const Stemmer& Stemmer::default_stemmer() {
  static const Stemmer stemmer({{"ological", "ology"},
                                {"ical", "y"},
                                {"ies", "y"},
                                {"ing", ""},
                                {"ing", "e"},
                                {"ed", ""},
                                {"ed", "e"},
                                {"tion", "te"},
                                {"ss", "ss"},
                                {"s", ""}});
  return stemmer;
}

Stemmer Stemmer::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open stemmer rules " + path.string());
  std::vector<Rule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) +
                      ": expected suffix<TAB>replacement");
    }
    rules.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    if (rules.back().first.empty()) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": empty suffix");
    }
  }
  return Stemmer(std::move(rules));
}

std::vector<std::string> Stemmer::stems(std::string_view word) const {
  std::size_t best_len = 0;
  for (const auto& [suffix, replacement] : rules_) {
    if (suffix.size() > best_len && word.ends_with(suffix)) {
      best_len = suffix.size();
    }
  }
  if (best_len == 0 || word.size() < best_len + min_stem_length_) return {std::string(word)};

  std::vector<std::string> out;
  for (const auto& [suffix, replacement] : rules_) {
    if (suffix.size() != best_len || !word.ends_with(suffix)) continue;
    std::string stem(word.substr(0, word.size() - suffix.size()));
    if (replacement.empty() && stem.size() >= 2) {
      const char last = stem.back();
      const char prev = stem[stem.size() - 2];
      if (last == prev && std::isalpha(static_cast<unsigned char>(last)) && !is_vowel(last) &&
          last != 'l' && last != 's' && last != 'z') {
        stem.pop_back();
      }
    }
    stem += replacement;
    if (std::find(out.begin(), out.end(), stem) == out.end()) out.push_back(std::move(stem));
  }
  return out;
}

std::optional<std::string> normalize_date(std::string_view text) {
  static const std::regex us(R"(\s*(\d{1,2})/(\d{1,2})/(\d{4})\s*)");
  static const std::regex iso(R"(\s*(\d{4})-(\d{2})-(\d{2})\s*)");
  static const std::regex named(R"(\s*([A-Za-z]+)\s+(\d{1,2})\s*,\s*(\d{4})\s*)");
  static const std::map<std::string, int> kMonths{
      {"january", 1}, {"february", 2}, {"march", 3},     {"april", 4},    {"may", 5},       {"june", 6},
      {"july", 7},    {"august", 8},   {"september", 9}, {"october", 10}, {"november", 11}, {"december", 12}};

  const std::string s(text);
  std::smatch m;
  if (std::regex_match(s, m, us)) return iso_date(std::stoi(m[3]), std::stoi(m[1]), std::stoi(m[2]));
  if (std::regex_match(s, m, iso)) return iso_date(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]));
  if (std::regex_match(s, m, named)) {
    const auto month = kMonths.find(casefold(m[1].str()));
    if (month == kMonths.end()) return std::nullopt;
    return iso_date(std::stoi(m[3]), month->second, std::stoi(m[2]));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// matchers

std::optional<TermMatch> exact_match(const Token& a, const Token& b) {
  if (is_punctuation(a) || is_punctuation(b)) return std::nullopt;
  if (a.norm != b.norm) return std::nullopt;
  return make_match(a, b, MatcherKind::Exact, 1.0);
}

std::optional<TermMatch> multiword_overlap(const Token& a, const Token& b) {
  if (!a.is_multiword && !b.is_multiword) return std::nullopt;
  if (is_punctuation(a) || is_punctuation(b)) return std::nullopt;
  const auto pa = part_set(a);
  const auto pb = part_set(b);
  std::size_t shared = 0;
  for (const auto& p : pa) shared += pb.count(p);
  if (shared == 0) return std::nullopt;
  const double confidence = static_cast<double>(shared) / static_cast<double>(std::max(pa.size(), pb.size()));
  return make_match(a, b, MatcherKind::MultiWord, confidence);
}

std::optional<TermMatch> head_match(const Token& a, const Token& b, double confidence) {
  if (!a.is_multiword && !b.is_multiword) return std::nullopt;
  if (is_punctuation(a) || is_punctuation(b)) return std::nullopt;
  if (head_of(a) != head_of(b)) return std::nullopt;
  return make_match(a, b, MatcherKind::Head, confidence);
}

std::optional<TermMatch> morphology_match(const Token& a, const Token& b, double confidence,
                                          const Stemmer& stemmer) {
  if (a.is_multiword || b.is_multiword) return std::nullopt;
  if (is_punctuation(a) || is_punctuation(b)) return std::nullopt;
  if (a.norm == b.norm) return std::nullopt;
  const auto sa = stemmer.stems(a.norm);
  const auto sb = stemmer.stems(b.norm);
  for (const auto& s : sa) {
    if (std::find(sb.begin(), sb.end(), s) != sb.end()) {
      return make_match(a, b, MatcherKind::Morphology, confidence);
    }
  }
  return std::nullopt;
}

std::optional<TermMatch> datetime_match(const Token& a, const Token& b) {
  const auto da = normalize_date(a.surface);
  if (!da) return std::nullopt;
  const auto db = normalize_date(b.surface);
  if (!db || *da != *db) return std::nullopt;
  return make_match(a, b, MatcherKind::DateTime, 1.0);
}

std::vector<TermMatch> match_all(const std::vector<Token>& text_tokens,
                                 const std::vector<Token>& hyp_tokens, const MatcherConfig& config,
                                 const Stemmer& stemmer) {
  std::vector<TermMatch> out;
  for (std::size_t h = 0; h < hyp_tokens.size(); ++h) {
    const Token& hyp = hyp_tokens[h];
    if (is_punctuation(hyp)) continue;
    for (std::size_t t = 0; t < text_tokens.size(); ++t) {
      const Token& text = text_tokens[t];
      if (is_punctuation(text)) continue;
      const std::optional<TermMatch> candidates[] = {
          exact_match(text, hyp),
          datetime_match(text, hyp),
          morphology_match(text, hyp, config.morphology_confidence, stemmer),
          head_match(text, hyp, config.head_confidence),
          multiword_overlap(text, hyp),
      };
      std::optional<TermMatch> best;
      for (const auto& c : candidates) {
        if (!c) continue;
        if (!best || c->confidence > best->confidence ||
            (c->confidence == best->confidence &&
             matcher_priority(c->matcher) < matcher_priority(best->matcher))) {
          best = c;
        }
      }
      if (best) {
        best->text_pos = t;
        best->hyp_pos = h;
        out.push_back(*best);
      }
    }
  }
  return out;
}

}  // namespace entailloop
