#include "geostate/weighting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "geostate/error.hpp"

namespace geostate {

std::string_view to_string(WeightMethod m) {
  return m == WeightMethod::igr ? "igr" : "wlh";
}

namespace {

double xlogx(double p) {
  return p > 0 ? p * std::log(p) : 0.0;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const char* what) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw Error(std::string("bad number in ") + what + ": " + std::string(s));
  return v;
}

const CountsTable::WordStats& require_word(std::string_view word, const CountsTable& counts,
                                           const char* op) {
  const auto* stats = counts.find(word);
  if (!stats) throw Error(std::string(op) + ": unknown word: " + std::string(word));
  return *stats;
}

}  // namespace

FeatureScore igr(std::string_view word, const CountsTable& counts) {
  const auto& stats = require_word(word, counts, "igr");
  FeatureScore out{std::string(word), WeightMethod::igr, 0.0, false};

  const std::uint32_t n = counts.total_users();
  const std::uint32_t n_present = stats.total_users;
  if (n_present == 0 || n_present == n) {
    out.degenerate = true;  // the presence split carries no information
    return out;
  }

  const double p_present = counts.p_word_users(stats);
  const double p_absent = static_cast<double>(n - n_present) / static_cast<double>(n);

  double h_states = 0, h_present = 0, h_absent = 0;
  for (std::size_t slot = 0; slot < counts.states().size(); ++slot) {
    const int s = static_cast<int>(slot);
    h_states -= xlogx(counts.p_state_users(s));
    h_present -= xlogx(counts.p_state_given_present(stats, s));
    h_absent -= xlogx(counts.p_state_given_absent(stats, s));
  }

  const double gain = std::max(0.0, h_states - (p_present * h_present + p_absent * h_absent));
  const double intrinsic = -xlogx(p_present) - xlogx(p_absent);
  out.score = gain / intrinsic;
  return out;
}

std::pair<double, StateLabel> wlh_argmax(std::string_view word, const CountsTable& counts) {
  const auto& stats = require_word(word, counts, "wlh");
  const double p_word = counts.p_word_tokens(stats);
  double best = 0;
  int best_slot = 0;
  for (std::size_t slot = 0; slot < counts.states().size(); ++slot) {
    const double ratio = counts.p_word_given_state_tokens(stats, static_cast<int>(slot)) / p_word;
    if (ratio > best) {
      best = ratio;
      best_slot = static_cast<int>(slot);
    }
  }
  return {best, counts.states()[best_slot]};
}

FeatureScore wlh(std::string_view word, const CountsTable& counts) {
  FeatureScore out{std::string(word), WeightMethod::wlh, 0.0, false};
  out.score = wlh_argmax(word, counts).first;
  return out;
}

int FeatureSet::index_of(std::string_view word) const {
  const auto it = index.find(word);
  return it == index.end() ? -1 : it->second;
}

namespace {

FeatureSet finish(FeatureSet set) {
  for (std::size_t i = 0; i < set.words.size(); ++i)
    set.index.emplace(set.words[i], static_cast<int>(i));
  return set;
}

}  // namespace

FeatureSet rank_and_select(const Vocabulary& vocab, const CountsTable& counts, WeightMethod method,
                           double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) throw Error("rank_and_select: fraction must be in (0,1]");
  if (vocab.size() == 0) throw Error("rank_and_select: empty vocabulary");

  struct Row {
    double score;
    std::uint32_t users;
    const std::string* word;
  };
  std::vector<Row> rows;
  rows.reserve(vocab.size());
  for (const auto& word : vocab.words()) {
    const double score =
        method == WeightMethod::igr ? igr(word, counts).score : wlh(word, counts).score;
    rows.push_back({score, counts.find(word)->total_users, &word});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.users != b.users) return a.users > b.users;
    return *a.word < *b.word;
  });

  const auto n = static_cast<double>(vocab.size());
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * n - 1e-9));

  FeatureSet set;
  set.origin = std::string(to_string(method));
  set.fraction = fraction;
  set.source_media = std::string(to_string(counts.media()));
  set.min_users = vocab.min_users();
  set.words.reserve(keep);
  set.scores.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    set.words.push_back(*rows[i].word);
    set.scores.push_back(rows[i].score);
  }
  return finish(std::move(set));
}

FeatureSet all_words_features(const Vocabulary& vocab) {
  if (vocab.size() == 0) throw Error("all_words_features: empty vocabulary");
  FeatureSet set;
  set.origin = "all_words";
  set.fraction = 1.0;
  set.source_media = std::string(to_string(vocab.counts().media()));
  set.min_users = vocab.min_users();
  set.words = vocab.words();
  return finish(std::move(set));
}

void save_feature_set(const FeatureSet& set, std::ostream& out) {
  out << "# geostate-features v1\n";
  out << "# origin=" << set.origin << "\tfraction=" << format_double(set.fraction)
      << "\tmedia=" << set.source_media << "\tmin_users=" << set.min_users << '\n';
  for (std::size_t i = 0; i < set.words.size(); ++i) {
    out << (i + 1) << '\t' << set.words[i] << '\t' << set.origin << '\t'
        << (i < set.scores.size() ? format_double(set.scores[i]) : "0") << '\n';
  }
}

FeatureSet load_feature_set(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# geostate-features v1")
    throw Error("load_feature_set: missing header");
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw Error("load_feature_set: missing provenance line");

  FeatureSet set;
  {
    std::istringstream fields(line.substr(2));
    std::string field;
    while (std::getline(fields, field, '\t')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "origin") set.origin = value;
      else if (key == "fraction") set.fraction = parse_double(value, "feature header");
      else if (key == "media") set.source_media = value;
      else if (key == "min_users") set.min_users = static_cast<int>(parse_double(value, "feature header"));
    }
  }
  std::size_t expected_rank = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string rank, word, origin, score;
    if (!std::getline(fields, rank, '\t') || !std::getline(fields, word, '\t') ||
        !std::getline(fields, origin, '\t') || !std::getline(fields, score, '\t'))
      throw Error("load_feature_set: malformed row: " + line);
    if (rank != std::to_string(expected_rank))
      throw Error("load_feature_set: rank out of order: " + line);
    ++expected_rank;
    set.words.push_back(word);
    set.scores.push_back(parse_double(score, "feature row"));
  }
  if (set.words.empty()) throw Error("load_feature_set: no rows");
  return finish(std::move(set));
}

}  // namespace geostate
