#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geostate/counts.hpp"

namespace geostate {

enum class WeightMethod { igr, wlh };
std::string_view to_string(WeightMethod m);

struct FeatureScore {
  std::string word;
  WeightMethod method = WeightMethod::igr;
  double score = 0;
  bool degenerate = false;  // zero intrinsic entropy; score pinned to 0
};

// Information gain ratio of a word under the user-presence estimator:
// (H(states) - H(states | word present/absent)) / intrinsic entropy of the
// word split. Natural log, 0*log(0) = 0. A word present in every user (or
// none) has zero intrinsic entropy; its score is 0 and flagged.
FeatureScore igr(std::string_view word, const CountsTable& counts);

// Locality ratio of a word under the token-mass estimator:
// max over states of P(word|state) / P(word).
FeatureScore wlh(std::string_view word, const CountsTable& counts);

// WLH plus the maximising state; ties go to the first state in code order.
std::pair<double, StateLabel> wlh_argmax(std::string_view word, const CountsTable& counts);

struct FeatureSet {
  std::string origin;  // "igr" | "wlh" | "all_words" | "lexicons"
  double fraction = 1.0;
  std::string source_media;
  int min_users = 0;
  std::vector<std::string> words;  // rank order; feature id = position
  std::vector<double> scores;      // aligned with words; may be empty
  std::map<std::string, int, std::less<>> index;

  int index_of(std::string_view word) const;
};

// Scores the whole vocabulary, sorts by score descending (ties: higher user
// count first, then lexicographic), and keeps the top ceil(fraction * size).
// The order is total, so a smaller fraction is always a prefix of a larger
// one.
FeatureSet rank_and_select(const Vocabulary& vocab, const CountsTable& counts, WeightMethod method,
                           double fraction);

// The unselected baseline: every pre-filtered word.
FeatureSet all_words_features(const Vocabulary& vocab);

// "rank <TAB> word <TAB> method <TAB> score" rows under a header.
void save_feature_set(const FeatureSet& set, std::ostream& out);
FeatureSet load_feature_set(std::istream& in);

}  // namespace geostate
