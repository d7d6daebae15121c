#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "geostate/counts.hpp"
#include "geostate/weighting.hpp"

namespace geostate {

struct LexiconParams {
  std::uint32_t p = 1;  // minimum distinct users for a word
  double h = 1.0;       // minimum locality ratio
  std::uint32_t t = 1;  // minimum words per state lexicon
};

struct LexiconEntry {
  std::string word;
  double wlh_score = 0;
  std::uint32_t user_count = 0;
  bool relaxed = false;  // admitted below h to satisfy the size floor
};

struct StateLexicon {
  StateLabel state;
  std::vector<LexiconEntry> entries;  // sorted by score descending
  double effective_h = 0;             // h, or the lowered threshold after relaxation
  bool relaxed = false;
  bool deficient = false;      // fewer candidates than t even at threshold zero
  std::size_t candidates = 0;  // argmax-assigned words passing the user floor
};

struct LexiconSet {
  LexiconParams params;
  std::vector<StateLexicon> states;  // one per state in the counts table

  const StateLexicon* find(StateLabel s) const;
};

// Builds one word list per state. A word is a candidate only for the state
// maximising its locality ratio. Candidates must be used by at least p
// users and score at least h; when a state ends up below t words, h alone
// is relaxed for that state by admitting the next candidates in score
// order (the user floor never is). States that cannot reach t at all are
// flagged deficient.
LexiconSet build_lexicons(const Vocabulary& vocab, const CountsTable& counts,
                          const LexiconParams& params);

// Jaccard overlap of the two pooled lexicons truncated to the top `size`
// words per state. Two empty pools count as identical.
double jaccard_overlap(const LexiconSet& a, const LexiconSet& b, std::size_t size);

// All lexicon words as one feature set: state order, then in-lexicon rank;
// duplicates keep their first position.
FeatureSet lexicon_feature_set(const LexiconSet& lexicons);

// "state <TAB> rank <TAB> word <TAB> wlh_score <TAB> user_count <TAB>
// relaxed_flag" rows; the header block carries params and per-state
// relaxation results, so a round-trip is lossless.
void save_lexicons(const LexiconSet& lexicons, std::ostream& out);
LexiconSet load_lexicons(std::istream& in);

}  // namespace geostate
