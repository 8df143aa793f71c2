#include "entailloop/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "entailloop/error.hpp"
#include "entailloop/rng.hpp"

namespace entailloop {

namespace {

constexpr std::string_view kFormatTag = "entailloop.pairs";
constexpr int kFormatVersion = 1;

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> words;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) words.push_back(std::move(w));
  return words;
}

std::string line_prefix(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

std::string required_string(const nlohmann::json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(line_prefix(line_no) + "missing field " + key);
  if (!it->is_string()) throw DataError(line_prefix(line_no) + "field " + key + " must be a string");
  return it->get<std::string>();
}

void check_pair(const Pair& p, Role role, const std::string& where) {
  if (is_blank(p.text)) throw DataError(where + "empty field text (pair " + p.id + ")");
  if (is_blank(p.hypothesis)) throw DataError(where + "empty field hypothesis (pair " + p.id + ")");
  if (role == Role::Unlabeled && p.label) {
    throw DataError(where + "unlabeled dataset contains labeled pair " + p.id);
  }
  if (role != Role::Unlabeled && !p.label) {
    throw DataError(where + "missing field label (pair " + p.id + ", role " +
                    std::string(to_string(role)) + ")");
  }
}

}  // namespace

std::string_view to_string(Label label) {
  return label == Label::Entail ? "entail" : "nonentail";
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Train: return "train";
    case Role::Dev: return "dev";
    case Role::Test: return "test";
    case Role::Unlabeled: return "unlabeled";
  }
  return "train";
}

Label parse_label(std::string_view text) {
  if (text == "entail") return Label::Entail;
  if (text == "nonentail") return Label::NonEntail;
  throw DataError("invalid label '" + std::string(text) + "' (expected entail or nonentail)");
}

Role parse_role(std::string_view text) {
  if (text == "train") return Role::Train;
  if (text == "dev") return Role::Dev;
  if (text == "test") return Role::Test;
  if (text == "unlabeled") return Role::Unlabeled;
  throw DataError("invalid role '" + std::string(text) + "'");
}

void Dataset::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& p : pairs) {
    if (!seen.insert(p.id).second) throw DataError("duplicate id " + p.id + " in dataset " + name);
    check_pair(p, role, name + ": ");
  }
}

std::string ClassDistribution::display() const {
  // Truncated, not rounded, to one decimal: 293 of 7026 is "4.1%".
  const std::size_t permille = total() == 0 ? 0 : positives * 1000 / total();
  return std::to_string(positives) + " (" + std::to_string(permille / 10) + "." +
         std::to_string(permille % 10) + "%)";
}

Dataset load_jsonl(const std::filesystem::path& path, std::optional<Role> role) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());

  Dataset ds;
  ds.name = path.stem().string();
  std::optional<Role> header_role;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  std::vector<std::size_t> line_of_pair;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(line_prefix(line_no) + "malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw DataError(line_prefix(line_no) + "expected a JSON object");

    if (first_content && obj.contains("format")) {
      first_content = false;
      if (obj["format"] != kFormatTag) {
        throw DataError(line_prefix(line_no) + "unknown format tag");
      }
      if (obj.value("version", 0) != kFormatVersion) {
        throw DataError(line_prefix(line_no) + "unsupported format version");
      }
      if (obj.contains("name")) ds.name = required_string(obj, "name", line_no);
      if (obj.contains("role")) header_role = parse_role(required_string(obj, "role", line_no));
      continue;
    }
    first_content = false;

    Pair p;
    p.id = required_string(obj, "id", line_no);
    p.hypothesis_id = required_string(obj, "hypothesis_id", line_no);
    p.text = required_string(obj, "text", line_no);
    p.hypothesis = required_string(obj, "hypothesis", line_no);
    if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw DataError(line_prefix(line_no) + "field label must be a string");
      try {
        p.label = parse_label(it->get<std::string>());
      } catch (const DataError& e) {
        throw DataError(line_prefix(line_no) + e.what());
      }
    }
    if (!seen.insert(p.id).second) {
      throw DataError(line_prefix(line_no) + "duplicate id " + p.id);
    }
    ds.pairs.push_back(std::move(p));
    line_of_pair.push_back(line_no);
  }

  if (role) {
    ds.role = *role;
  } else if (header_role) {
    ds.role = *header_role;
  } else {
    throw DataError(path.string() + ": no header line with a role and no role given");
  }
  for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
    check_pair(ds.pairs[i], ds.role, line_prefix(line_of_pair[i]));
  }
  return ds;
}

void save_jsonl(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  try {
    nlohmann::ordered_json header;
    header["format"] = kFormatTag;
    header["version"] = kFormatVersion;
    header["name"] = dataset.name;
    header["role"] = to_string(dataset.role);
    out << header.dump() << '\n';
    for (const auto& p : dataset.pairs) {
      nlohmann::ordered_json obj;
      obj["id"] = p.id;
      obj["hypothesis_id"] = p.hypothesis_id;
      obj["text"] = p.text;
      obj["hypothesis"] = p.hypothesis;
      if (p.label) obj["label"] = to_string(*p.label);
      out << obj.dump() << '\n';
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!out) throw DataError("write failed: " + path.string());
}

Dataset load_tsv(const std::filesystem::path& path, std::string name, Role role) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  Dataset ds{std::move(name), role, {}};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (!header_seen) {
      const std::vector<std::string> expected{"id", "hypothesis_id", "label", "hypothesis", "text"};
      if (cols != expected) {
        throw DataError(line_prefix(line_no) +
                        "expected header id\thypothesis_id\tlabel\thypothesis\ttext");
      }
      header_seen = true;
      continue;
    }
    if (cols.size() != 5) {
      throw DataError(line_prefix(line_no) + "expected 5 columns, got " + std::to_string(cols.size()));
    }
    Pair p{cols[0], cols[1], cols[4], cols[3], std::nullopt};
    if (!cols[2].empty()) {
      try {
        p.label = parse_label(cols[2]);
      } catch (const DataError& e) {
        throw DataError(line_prefix(line_no) + e.what());
      }
    }
    if (!seen.insert(p.id).second) throw DataError(line_prefix(line_no) + "duplicate id " + p.id);
    check_pair(p, role, line_prefix(line_no));
    ds.pairs.push_back(std::move(p));
  }
  return ds;
}

ClassDistribution class_distribution(const Dataset& dataset) {
  ClassDistribution dist;
  for (const auto& p : dataset.pairs) {
    if (!p.label) throw DataError("class_distribution: pair " + p.id + " is unlabeled");
    if (*p.label == Label::Entail) {
      ++dist.positives;
    } else {
      ++dist.negatives;
    }
  }
  if (dist.total() > 0) {
    dist.positive_fraction = static_cast<double>(dist.positives) / static_cast<double>(dist.total());
  }
  return dist;
}

// ---------------------------------------------------------------------------
// synthetic corpus

void SynthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("synth config: " + msg); };
  if (n_hypotheses == 0) fail("n_hypotheses must be >= 1");
  if (candidates_per_hypothesis == 0) fail("candidates_per_hypothesis must be >= 1");
  if (!(positive_fraction > 0.0 && positive_fraction < 1.0)) fail("positive_fraction must be in (0,1)");
  if (hypothesis_len_min == 0 || hypothesis_len_min > hypothesis_len_max) {
    fail("hypothesis length range must satisfy 1 <= min <= max");
  }
  if (noise_tokens_min > noise_tokens_max) fail("noise token range must satisfy min <= max");
  if (!(overlap_pos > 0.0 && overlap_pos <= 1.0)) fail("overlap_pos must be in (0,1]");
  if (!(overlap_neg >= 0.0 && overlap_neg < 1.0)) fail("overlap_neg must be in [0,1)");
  if (!(overlap_neg < overlap_pos)) fail("overlap_neg must be < overlap_pos");
  if (!(hard_positive_fraction >= 0.0 && hard_positive_fraction <= 1.0)) {
    fail("hard_positive_fraction must be in [0,1]");
  }
  if (!(hard_negative_fraction >= 0.0 && hard_negative_fraction <= 1.0)) {
    fail("hard_negative_fraction must be in [0,1]");
  }
  if (!(word_frequency_exponent >= 0.0) || !std::isfinite(word_frequency_exponent)) {
    fail("word_frequency_exponent must be >= 0");
  }
}

std::string synth_word(std::size_t index) {
  static constexpr std::string_view kConsonants = "bdfgklmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  const std::size_t base = kConsonants.size() * kVowels.size();
  // Offsetting by `base` guarantees at least two syllables and a unique spelling.
  std::size_t n = index + base;
  std::string word;
  while (n > 0) {
    const std::size_t syl = n % base;
    word.insert(word.begin(), kVowels[syl % kVowels.size()]);
    word.insert(word.begin(), kConsonants[syl / kVowels.size()]);
    n /= base;
  }
  return word;
}

namespace {

// Rank-frequency sampler with P(r) proportional to (r + 1)^-exponent;
// exponent 0 is plain uniform.
class WordSampler {
 public:
  WordSampler(std::size_t n, double exponent) : n_(n) {
    if (exponent == 0.0) return;
    cdf_.resize(n);
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += std::pow(static_cast<double>(r + 1), -exponent);
      cdf_[r] = acc;
    }
    for (auto& c : cdf_) c /= acc;
  }

  std::size_t operator()(Rng& rng) const {
    if (cdf_.empty()) return static_cast<std::size_t>(rng.uniform_index(n_));
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), rng.uniform01());
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), n_ - 1);
  }

 private:
  std::size_t n_;
  std::vector<double> cdf_;
};

std::size_t uniform_in(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform_index(hi - lo + 1));
}

// Fraction of distinct hypothesis words present in the text.
double word_overlap(const std::vector<std::size_t>& hyp, const std::vector<std::size_t>& text) {
  const std::unordered_set<std::size_t> in_text(text.begin(), text.end());
  std::size_t shared = 0;
  for (auto w : hyp) shared += in_text.count(w);
  return static_cast<double>(shared) / static_cast<double>(hyp.size());
}

enum class Recipe { Positive, Negative, HardPositive, HardNegative };

struct Generator {
  const SynthConfig& cfg;
  Rng& rng;
  const WordSampler& sample;
  std::vector<std::string> vocab;

  std::vector<std::size_t> filler(std::size_t n) {
    std::vector<std::size_t> out(n);
    for (auto& w : out) w = sample(rng);
    return out;
  }

  std::vector<std::size_t> hypothesis() {
    const std::size_t len = uniform_in(rng, cfg.hypothesis_len_min, cfg.hypothesis_len_max);
    std::vector<std::size_t> hyp;
    std::unordered_set<std::size_t> used;
    while (hyp.size() < len) {
      const auto w = sample(rng);
      if (used.insert(w).second) hyp.push_back(w);
    }
    return hyp;
  }

  std::size_t span_len(std::size_t hyp_len) const {
    const auto k = static_cast<std::size_t>(std::ceil(cfg.overlap_pos * static_cast<double>(hyp_len) - 1e-12));
    return std::clamp<std::size_t>(k, 1, hyp_len);
  }

  std::vector<std::size_t> negative_words(const std::vector<std::size_t>& hyp, std::size_t len) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      auto words = filler(len);
      if (word_overlap(hyp, words) <= cfg.overlap_neg + 1e-12) return words;
    }
    throw DataError("synth: vocabulary too small to draw negatives with overlap <= " +
                    std::to_string(cfg.overlap_neg));
  }

  std::string render(const std::vector<std::string>& words, bool enumerate) {
    std::string out;
    if (enumerate) out = std::to_string(uniform_in(rng, 1, 9)) + ". ";
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) out += ' ';
      out += words[i];
    }
    if (rng.uniform01() < 0.7) out += '.';
    return out;
  }

  std::string text(const std::vector<std::size_t>& hyp, Recipe recipe) {
    const std::size_t k = span_len(hyp.size());
    const std::size_t noise = uniform_in(rng, cfg.noise_tokens_min, cfg.noise_tokens_max);
    std::vector<std::string> words;
    std::vector<bool> from_hyp;

    auto push_filler = [&](const std::vector<std::size_t>& ids) {
      for (auto id : ids) {
        std::string w = vocab[id];
        if (rng.uniform01() < 0.04) std::transform(w.begin(), w.end(), w.begin(), ::toupper);
        words.push_back(std::move(w));
        from_hyp.push_back(false);
      }
    };

    switch (recipe) {
      case Recipe::Positive: {
        const std::size_t start = uniform_in(rng, 0, hyp.size() - k);
        const std::size_t before = uniform_in(rng, 0, noise);
        push_filler(filler(before));
        for (std::size_t i = start; i < start + k; ++i) {
          words.push_back(vocab[hyp[i]]);
          from_hyp.push_back(true);
        }
        push_filler(filler(noise - before));
        break;
      }
      case Recipe::Negative: {
        push_filler(negative_words(hyp, noise + k));
        break;
      }
      case Recipe::HardPositive: {
        push_filler(negative_words(hyp, noise + k));
        // Paraphrase: inflected forms of hypothesis words replace filler slots.
        static constexpr std::string_view kSuffixes[] = {"s", "ed", "ing"};
        std::vector<std::size_t> order(hyp.size());
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        const std::size_t n_inflected = std::min(k, words.size());
        std::vector<std::size_t> slots(words.size());
        std::iota(slots.begin(), slots.end(), 0);
        rng.shuffle(slots);
        for (std::size_t i = 0; i < n_inflected; ++i) {
          words[slots[i]] = vocab[hyp[order[i]]] + std::string(kSuffixes[rng.uniform_index(3)]);
        }
        break;
      }
      case Recipe::HardNegative: {
        push_filler(filler(noise));
        std::vector<std::size_t> order(hyp.size());
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        for (std::size_t i = 0; i < k; ++i) {
          const std::size_t at = uniform_in(rng, 0, words.size());
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), vocab[hyp[order[i]]]);
        }
        break;
      }
    }
    return render(words, rng.uniform01() < 0.1);
  }
};

std::string hypothesis_text(const std::vector<std::size_t>& hyp, const std::vector<std::string>& vocab) {
  std::string out;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (i) out += ' ';
    out += vocab[hyp[i]];
  }
  out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  out += '.';
  return out;
}

std::string padded(std::size_t value, int width) {
  std::ostringstream out;
  out << std::setw(width) << std::setfill('0') << value;
  return out.str();
}

}  // namespace

Dataset synth_generate(const SynthConfig& config) {
  config.validate();
  if (config.vocab_size < config.hypothesis_len_max * 2) {
    throw DataError("synth: vocab_size " + std::to_string(config.vocab_size) +
                    " too small for hypotheses of up to " + std::to_string(config.hypothesis_len_max) +
                    " distinct words");
  }
  Rng rng(config.seed);
  const WordSampler sampler(config.vocab_size, config.word_frequency_exponent);
  Generator gen{config, rng, sampler, {}};
  gen.vocab.reserve(config.vocab_size);
  for (std::size_t i = 0; i < config.vocab_size; ++i) gen.vocab.push_back(synth_word(i));

  const std::size_t total = config.total_pairs();
  const auto n_pos = static_cast<std::size_t>(std::llround(config.positive_fraction * static_cast<double>(total)));
  const auto n_hard_pos =
      static_cast<std::size_t>(std::llround(config.hard_positive_fraction * static_cast<double>(n_pos)));
  const auto n_hard_neg = static_cast<std::size_t>(
      std::llround(config.hard_negative_fraction * static_cast<double>(total - n_pos)));

  std::vector<std::size_t> slots(total);
  std::iota(slots.begin(), slots.end(), 0);
  rng.shuffle(slots);
  std::vector<Recipe> recipe(total, Recipe::Negative);
  for (std::size_t i = 0; i < n_pos; ++i) {
    recipe[slots[i]] = i < n_hard_pos ? Recipe::HardPositive : Recipe::Positive;
  }
  for (std::size_t i = n_pos; i < n_pos + n_hard_neg; ++i) recipe[slots[i]] = Recipe::HardNegative;

  Dataset ds;
  ds.name = "synth";
  ds.role = Role::Train;
  ds.pairs.reserve(total);
  const int hyp_width = std::max<int>(4, static_cast<int>(std::to_string(config.n_hypotheses).size()));
  const int cand_width =
      std::max<int>(3, static_cast<int>(std::to_string(config.candidates_per_hypothesis).size()));
  for (std::size_t h = 0; h < config.n_hypotheses; ++h) {
    const auto hyp = gen.hypothesis();
    const std::string hyp_id = "h" + padded(h, hyp_width);
    const std::string hyp_text = hypothesis_text(hyp, gen.vocab);
    for (std::size_t c = 0; c < config.candidates_per_hypothesis; ++c) {
      const std::size_t slot = h * config.candidates_per_hypothesis + c;
      const Recipe r = recipe[slot];
      Pair p;
      p.id = hyp_id + "-c" + padded(c, cand_width);
      p.hypothesis_id = hyp_id;
      p.hypothesis = hyp_text;
      p.text = gen.text(hyp, r);
      p.label = (r == Recipe::Positive || r == Recipe::HardPositive) ? Label::Entail : Label::NonEntail;
      ds.pairs.push_back(std::move(p));
    }
  }
  return ds;
}

DatasetSplit split_dataset(const Dataset& dataset, SplitFractions fractions, std::uint64_t seed) {
  if (fractions.train < 0 || fractions.dev < 0 || fractions.test < 0) {
    throw ConfigError("split fractions must be non-negative");
  }
  if (std::abs(fractions.train + fractions.dev + fractions.test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const auto& p : dataset.pairs) {
    if (seen.insert(p.hypothesis_id).second) ids.push_back(p.hypothesis_id);
  }
  if (ids.size() < 3) {
    throw DataError("split_dataset: need at least 3 hypotheses, got " + std::to_string(ids.size()));
  }
  Rng rng(seed);
  rng.shuffle(ids);
  const auto h = static_cast<double>(ids.size());
  const std::size_t n_train = std::min<std::size_t>(ids.size(), static_cast<std::size_t>(std::llround(fractions.train * h)));
  const std::size_t n_dev =
      std::min<std::size_t>(ids.size() - n_train, static_cast<std::size_t>(std::llround(fractions.dev * h)));

  std::unordered_map<std::string, int> bucket;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    bucket[ids[i]] = i < n_train ? 0 : (i < n_train + n_dev ? 1 : 2);
  }
  DatasetSplit out{{dataset.name + "-train", Role::Train, {}},
                   {dataset.name + "-dev", Role::Dev, {}},
                   {dataset.name + "-test", Role::Test, {}}};
  Dataset* parts[] = {&out.train, &out.dev, &out.test};
  for (const auto& p : dataset.pairs) parts[bucket.at(p.hypothesis_id)]->pairs.push_back(p);
  return out;
}

Dataset strip_labels(const Dataset& dataset, std::string name, std::string_view id_prefix) {
  Dataset out{std::move(name), Role::Unlabeled, dataset.pairs};
  for (auto& p : out.pairs) {
    p.label.reset();
    p.id = std::string(id_prefix) + p.id;
    p.hypothesis_id = std::string(id_prefix) + p.hypothesis_id;
  }
  return out;
}

LengthStats sentence_length_stats(const Dataset& dataset) {
  if (dataset.empty()) throw DataError("sentence_length_stats: empty dataset");
  // Welford's running update.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (const auto& p : dataset.pairs) {
    const auto n = static_cast<double>(split_ws(p.text).size());
    ++count;
    const double delta = n - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (n - mean);
  }
  const double var = m2 / static_cast<double>(count);
  return {mean, std::sqrt(var)};
}

}  // namespace entailloop
