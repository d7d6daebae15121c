#include "geostate/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "geostate/error.hpp"

namespace geostate {
namespace {

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

void validate(const LexiconParams& params) {
  std::string bad;
  if (params.p < 1) bad += " p must be at least 1;";
  if (!(params.h > 0)) bad += " h must be positive;";
  if (params.t < 1) bad += " t must be at least 1;";
  if (!bad.empty()) throw Error("invalid lexicon params:" + bad);
}

}  // namespace

const StateLexicon* LexiconSet::find(StateLabel s) const {
  for (const auto& lex : states)
    if (lex.state == s) return &lex;
  return nullptr;
}

LexiconSet build_lexicons(const Vocabulary& vocab, const CountsTable& counts,
                          const LexiconParams& params) {
  validate(params);

  struct Candidate {
    double score;
    std::uint32_t users;
    const std::string* word;
  };
  std::vector<std::vector<Candidate>> per_state(counts.states().size());
  for (const auto& word : vocab.words()) {
    const std::uint32_t users = counts.find(word)->total_users;
    if (users < params.p) continue;  // the user floor is never relaxed
    const auto [score, state] = wlh_argmax(word, counts);
    per_state[counts.state_slot(state)].push_back({score, users, &word});
  }

  LexiconSet out;
  out.params = params;
  out.states.reserve(counts.states().size());
  for (std::size_t slot = 0; slot < counts.states().size(); ++slot) {
    auto& candidates = per_state[slot];
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.users != b.users) return a.users > b.users;
      return *a.word < *b.word;
    });

    StateLexicon lex;
    lex.state = counts.states()[slot];
    lex.candidates = candidates.size();
    lex.effective_h = params.h;

    std::size_t keep = 0;
    while (keep < candidates.size() && candidates[keep].score >= params.h) ++keep;
    if (keep < params.t) {
      // Admit further candidates in score order until the size floor holds.
      const std::size_t want = std::min<std::size_t>(params.t, candidates.size());
      if (want > keep) {
        keep = want;
        lex.relaxed = true;
        lex.effective_h = candidates[keep - 1].score;
      }
      if (candidates.size() < params.t) lex.deficient = true;
    }
    lex.entries.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i)
      lex.entries.push_back({*candidates[i].word, candidates[i].score, candidates[i].users,
                             candidates[i].score < params.h});
    out.states.push_back(std::move(lex));
  }
  return out;
}

double jaccard_overlap(const LexiconSet& a, const LexiconSet& b, std::size_t size) {
  if (size < 1) throw Error("jaccard_overlap: size must be at least 1");
  const auto pool = [size](const LexiconSet& set) {
    std::set<std::string> words;
    for (const auto& lex : set.states) {
      const std::size_t take = std::min(size, lex.entries.size());
      for (std::size_t i = 0; i < take; ++i) words.insert(lex.entries[i].word);
    }
    return words;
  };
  const auto wa = pool(a);
  const auto wb = pool(b);
  std::size_t intersection = 0;
  for (const auto& w : wa) intersection += wb.count(w);
  const std::size_t unioned = wa.size() + wb.size() - intersection;
  if (unioned == 0) return 1.0;  // two empty pools are identical
  return static_cast<double>(intersection) / static_cast<double>(unioned);
}

FeatureSet lexicon_feature_set(const LexiconSet& lexicons) {
  FeatureSet set;
  set.origin = "lexicons";
  set.fraction = 1.0;
  for (const auto& lex : lexicons.states) {
    for (const auto& entry : lex.entries) {
      if (set.index.count(entry.word)) continue;
      set.index.emplace(entry.word, static_cast<int>(set.words.size()));
      set.words.push_back(entry.word);
      set.scores.push_back(entry.wlh_score);
    }
  }
  if (set.words.empty()) throw Error("lexicon_feature_set: all lexicons are empty");
  return set;
}

void save_lexicons(const LexiconSet& lexicons, std::ostream& out) {
  out << "# geostate-lexicons v1\n";
  out << "# p=" << lexicons.params.p << "\th=" << format_double(lexicons.params.h)
      << "\tt=" << lexicons.params.t << '\n';
  for (const auto& lex : lexicons.states) {
    out << "# state=" << lex.state.code() << "\teffective_h=" << format_double(lex.effective_h)
        << "\trelaxed=" << (lex.relaxed ? 1 : 0) << "\tdeficient=" << (lex.deficient ? 1 : 0)
        << "\tcandidates=" << lex.candidates << '\n';
  }
  for (const auto& lex : lexicons.states) {
    for (std::size_t i = 0; i < lex.entries.size(); ++i) {
      const auto& e = lex.entries[i];
      out << lex.state.code() << '\t' << (i + 1) << '\t' << e.word << '\t'
          << format_double(e.wlh_score) << '\t' << e.user_count << '\t' << (e.relaxed ? 1 : 0)
          << '\n';
    }
  }
}

LexiconSet load_lexicons(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# geostate-lexicons v1")
    throw Error("load_lexicons: missing header");
  if (!std::getline(in, line) || line.rfind("# p=", 0) != 0)
    throw Error("load_lexicons: missing params line");

  LexiconSet out;
  {
    std::istringstream fields(line.substr(2));
    std::string field;
    while (std::getline(fields, field, '\t')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw Error("load_lexicons: bad params line");
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "p") out.params.p = static_cast<std::uint32_t>(parse_double(value, "params"));
      else if (key == "h") out.params.h = parse_double(value, "params");
      else if (key == "t") out.params.t = static_cast<std::uint32_t>(parse_double(value, "params"));
    }
  }

  std::map<int, std::size_t> by_state;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# state=", 0) == 0) {
      StateLexicon lex;
      std::istringstream fields(line.substr(2));
      std::string field;
      while (std::getline(fields, field, '\t')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw Error("load_lexicons: bad state line: " + line);
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "state") {
          const auto s = StateLabel::parse(value);
          if (!s) throw Error("load_lexicons: unknown state: " + value);
          lex.state = *s;
        } else if (key == "effective_h") {
          lex.effective_h = parse_double(value, "state line");
        } else if (key == "relaxed") {
          lex.relaxed = value == "1";
        } else if (key == "deficient") {
          lex.deficient = value == "1";
        } else if (key == "candidates") {
          lex.candidates = static_cast<std::size_t>(parse_double(value, "state line"));
        }
      }
      by_state[lex.state.index()] = out.states.size();
      out.states.push_back(std::move(lex));
      continue;
    }
    std::istringstream fields(line);
    std::string state, rank, word, score, users, relaxed;
    if (!std::getline(fields, state, '\t') || !std::getline(fields, rank, '\t') ||
        !std::getline(fields, word, '\t') || !std::getline(fields, score, '\t') ||
        !std::getline(fields, users, '\t') || !std::getline(fields, relaxed, '\t'))
      throw Error("load_lexicons: malformed row: " + line);
    const auto s = StateLabel::parse(state);
    if (!s) throw Error("load_lexicons: unknown state: " + state);
    const auto it = by_state.find(s->index());
    if (it == by_state.end()) throw Error("load_lexicons: row for undeclared state: " + state);
    auto& lex = out.states[it->second];
    if (rank != std::to_string(lex.entries.size() + 1))
      throw Error("load_lexicons: rank out of order: " + line);
    lex.entries.push_back({word, parse_double(score, "lexicon row"),
                           static_cast<std::uint32_t>(parse_double(users, "lexicon row")),
                           relaxed == "1"});
  }
  return out;
}

}  // namespace geostate
