#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geostate/state.hpp"
#include "geostate/tokenize.hpp"

namespace geostate {

enum class Media { blog, tweet, other, mixed };
std::string_view to_string(Media m);
std::optional<Media> parse_media(std::string_view s);

enum class Gender { male, female, undefined };
std::string_view to_string(Gender g);
std::optional<Gender> parse_gender(std::string_view s);

// A user after ingestion: documents flattened into one token multiset.
// Only per-document character counts survive flattening (for corpus stats).
struct TokenizedUser {
  std::string user_id;
  StateLabel state;
  Media media = Media::other;
  TokenCounts tokens;
  std::vector<std::uint32_t> doc_char_counts;
  std::uint64_t char_count = 0;  // sum of doc_char_counts
  std::optional<Gender> gender;
  std::string industry;  // empty when absent

  std::uint64_t token_total() const;
};

struct Corpus {
  std::vector<TokenizedUser> users;
  Media media = Media::other;  // mixed allowed as corpus tag only
  std::string provenance;
};

struct SplitSpec {
  std::uint64_t seed = 0;
  double train_frac = 0.8;
  double dev_frac = 0.1;
  double test_frac = 0.1;
  bool stratify_by_state = true;
};

struct SplitResult {
  Corpus train, dev, test;
};

// Deterministic train/dev/test partition. Stratified per state by default;
// sizes follow largest-remainder apportionment, so per-state proportions
// hold to within one user. Same corpus + spec always gives the same split.
SplitResult split(const Corpus& corpus, const SplitSpec& spec);

struct Summary {
  double max = 0, mean = 0, stddev = 0, median = 0;
};

struct CorpusStats {
  Summary docs_per_user, chars_per_doc, chars_per_user;
};

CorpusStats compute_stats(const Corpus& corpus);

// A family of planted per-state words for synthetic corpora. locality 0
// keeps a word exclusive to its home state; 1 spreads its use uniformly
// over all states.
struct PlantedFamily {
  std::string prefix = "local";
  int words_per_state = 1;
  double token_rate = 0.05;
  double locality = 0.0;
};

struct SynthSpec {
  int num_states = 50;             // first n states in code order
  std::vector<StateLabel> states;  // explicit list wins when non-empty
  int users_per_state = 20;
  int tokens_per_user = 200;
  int background_vocab = 500;
  std::string background_prefix = "bg";
  std::vector<PlantedFamily> planted = {PlantedFamily{}};
  // Idiosyncratic noise: each user leans on a few words from a shared pool,
  // which makes those words correlate with the user's label in-sample.
  int noise_vocab = 0;
  int noise_words_per_user = 3;
  double noise_token_rate = 0.0;
  std::string noise_prefix = "nz";
  bool assign_demographics = false;
  Media media = Media::other;
  std::string id_prefix = "u";
  std::string provenance = "synth";

  std::vector<StateLabel> effective_states() const;
};

// Deterministic generator: the same spec and seed reproduce the corpus
// byte for byte, regardless of call order elsewhere.
Corpus synth_corpus(const SynthSpec& spec, std::uint64_t seed);

// Name of planted word j of a family for a state, as the generator emits it.
std::string planted_word(const PlantedFamily& family, StateLabel state, int j);

}  // namespace geostate
