#include "entailloop/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>

#include "entailloop/csv.hpp"
#include "entailloop/error.hpp"
#include "entailloop/parallel.hpp"

namespace entailloop {

std::vector<std::string> FeatureConfig::schema() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (enabled[i]) names.emplace_back(kFeatureNames[i]);
  }
  return names;
}

void FeatureConfig::validate() const {
  if (std::none_of(enabled.begin(), enabled.end(), [](bool b) { return b; })) {
    throw ConfigError("feature config: at least one feature must be enabled");
  }
  matchers.validate();
}

const Stemmer& FeatureConfig::active_stemmer() const {
  return stemmer ? *stemmer : Stemmer::default_stemmer();
}

Eigen::VectorXd FeatureTable::targets() const {
  if (!labeled()) throw DataError("feature table is unlabeled");
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = labels[i] == Label::Entail ? 1.0 : 0.0;
  }
  return y;
}

FeatureVector FeatureTable::row(Eigen::Index i) const {
  return FeatureVector{names, values.row(i).transpose(), pair_ids[static_cast<std::size_t>(i)]};
}

FeatureTable FeatureTable::subset(const std::vector<Eigen::Index>& indices) const {
  FeatureTable out;
  out.names = names;
  out.values.resize(static_cast<Eigen::Index>(indices.size()), values.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = indices[k];
    out.values.row(static_cast<Eigen::Index>(k)) = values.row(i);
    out.pair_ids.push_back(pair_ids[static_cast<std::size_t>(i)]);
    if (labeled()) out.labels.push_back(labels[static_cast<std::size_t>(i)]);
  }
  return out;
}

void FeatureTable::append(const FeatureTable& other) {
  if (pair_ids.empty() && names.empty()) {
    *this = other;
    return;
  }
  if (other.names != names) throw DataError("cannot append feature tables with different schemas");
  if (labeled() != other.labeled() && !(other.pair_ids.empty() || pair_ids.empty())) {
    throw DataError("cannot append labeled and unlabeled feature tables");
  }
  Eigen::MatrixXd stacked(values.rows() + other.values.rows(), static_cast<Eigen::Index>(names.size()));
  stacked << values, other.values;
  values = std::move(stacked);
  pair_ids.insert(pair_ids.end(), other.pair_ids.begin(), other.pair_ids.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

std::vector<std::size_t> term_positions(const std::vector<Token>& tokens) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_punctuation(tokens[i])) out.push_back(i);
  }
  return out;
}

double skip_bigram_feature(const std::vector<TermMatch>& matches, const std::vector<Token>& hyp_tokens) {
  const auto terms = term_positions(hyp_tokens);
  const std::size_t n = terms.size();
  if (n < 2) return 0.0;
  // Earliest and latest matched text position per hypothesis token.
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> first(hyp_tokens.size(), kNone);
  std::vector<std::size_t> last(hyp_tokens.size(), 0);
  for (const auto& m : matches) {
    if (m.hyp_pos >= hyp_tokens.size()) continue;
    first[m.hyp_pos] = std::min(first[m.hyp_pos], m.text_pos);
    last[m.hyp_pos] = std::max(last[m.hyp_pos], m.text_pos);
  }
  std::size_t ordered = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (first[terms[a]] == kNone) continue;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (first[terms[b]] == kNone) continue;
      if (first[terms[a]] < last[terms[b]]) ++ordered;
    }
  }
  return static_cast<double>(ordered) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double coverage_feature(const std::vector<TermMatch>& matches, const std::vector<Token>& hyp_tokens) {
  std::vector<bool> hit(hyp_tokens.size(), false);
  for (const auto& m : matches) {
    if (m.hyp_pos < hit.size()) hit[m.hyp_pos] = true;
  }
  std::size_t matched = 0;
  std::size_t unmatched = 0;
  for (auto pos : term_positions(hyp_tokens)) {
    if (hit[pos]) {
      ++matched;
    } else {
      ++unmatched;
    }
  }
  return static_cast<double>(matched) / static_cast<double>(unmatched + 1);
}

bool has_list_marker(std::string_view text) {
  static const std::regex re(R"(^\s*(\d{1,3}|[A-Za-z])[.)](\s|$)|^\s*[-*]\s)");
  return std::regex_search(std::string(text), re);
}

namespace {

bool all_upper(const Token& t) {
  bool has_letter = false;
  for (unsigned char c : t.surface) {
    if (c >= 128) continue;
    if (std::islower(c)) return false;
    if (std::isupper(c)) has_letter = true;
  }
  return has_letter;
}

}  // namespace

FeatureVector extract(const Pair& pair, const FeatureConfig& config) {
  const auto text = tokenize(pair.text);
  const auto hyp = tokenize(pair.hypothesis);
  const auto matches = match_all(text, hyp, config.matchers, config.active_stemmer());

  const auto hyp_terms = term_positions(hyp);
  const auto text_terms = term_positions(text);
  std::vector<double> best_exact(hyp.size(), 0.0);
  std::vector<double> best_any(hyp.size(), 0.0);
  for (const auto& m : matches) {
    best_any[m.hyp_pos] = std::max(best_any[m.hyp_pos], m.confidence);
    if (m.matcher == MatcherKind::Exact) best_exact[m.hyp_pos] = std::max(best_exact[m.hyp_pos], m.confidence);
  }
  double exact_sum = 0.0;
  double any_sum = 0.0;
  for (auto pos : hyp_terms) {
    exact_sum += best_exact[pos];
    any_sum += best_any[pos];
  }
  const double n_hyp = static_cast<double>(hyp_terms.size());

  std::size_t upper = 0;
  for (auto pos : text_terms) upper += all_upper(text[pos]) ? 1 : 0;

  const bool ends_sentence =
      !text.empty() && (text.back().surface == "." || text.back().surface == "!" || text.back().surface == "?");

  const std::array<double, kFeatureNames.size()> all{
      n_hyp > 0 ? exact_sum / n_hyp : 0.0,
      n_hyp > 0 ? any_sum / n_hyp : 0.0,
      skip_bigram_feature(matches, hyp),
      coverage_feature(matches, hyp),
      static_cast<double>(text_terms.size()),
      text_terms.empty() ? 0.0 : static_cast<double>(upper) / static_cast<double>(text_terms.size()),
      ends_sentence ? 1.0 : 0.0,
      has_list_marker(pair.text) ? 1.0 : 0.0,
  };

  FeatureVector fv;
  fv.pair_id = pair.id;
  fv.names = config.schema();
  fv.values.resize(static_cast<Eigen::Index>(fv.names.size()));
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (config.enabled[i]) fv.values(k++) = all[i];
  }
  return fv;
}

FeatureTable extract_dataset(const Dataset& dataset, const FeatureConfig& config) {
  config.validate();
  FeatureTable table;
  table.names = config.schema();
  const auto n = dataset.size();
  table.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(table.names.size()));
  parallel_for(n, [&](std::size_t i) {
    try {
      table.values.row(static_cast<Eigen::Index>(i)) = extract(dataset.pairs[i], config).values.transpose();
    } catch (const std::exception& e) {
      throw DataError("pair " + dataset.pairs[i].id + ": " + e.what());
    }
  });
  const bool labeled = std::all_of(dataset.pairs.begin(), dataset.pairs.end(),
                                   [](const Pair& p) { return p.label.has_value(); });
  for (const auto& p : dataset.pairs) {
    table.pair_ids.push_back(p.id);
    if (labeled) table.labels.push_back(*p.label);
  }
  return table;
}

void write_feature_csv(const FeatureTable& table, const std::filesystem::path& path) {
  std::vector<std::string> header{"pair_id", "label"};
  header.insert(header.end(), table.names.begin(), table.names.end());
  CsvWriter csv(path, "features", header);
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    std::vector<std::string> row{table.pair_ids[static_cast<std::size_t>(i)],
                                 table.labeled() ? std::string(to_string(table.labels[static_cast<std::size_t>(i)]))
                                                 : std::string()};
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) row.push_back(format_double(table.values(i, j)));
    csv.row(row);
  }
}

}  // namespace entailloop
