#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "geostate/corpus.hpp"

namespace geostate {

// Exact token and user counts per word and state: the single source of
// truth for every probability downstream. No smoothing happens here.
//
// Two estimator families are exposed and kept apart by name:
//  - token-mass: probabilities over token occurrences,
//  - user-presence: probabilities over users containing a word.
class CountsTable {
public:
  struct WordStats {
    std::vector<std::uint64_t> state_tokens;  // indexed by state slot
    std::vector<std::uint32_t> state_users;
    std::uint64_t total_tokens = 0;
    std::uint32_t total_users = 0;  // distinct users containing the word
  };

  static CountsTable build(const Corpus& corpus);

  const std::vector<StateLabel>& states() const { return states_; }
  int state_slot(StateLabel s) const { return slot_of_[s.index()]; }
  Media media() const { return media_; }

  const std::map<std::string, WordStats, std::less<>>& words() const { return words_; }
  const WordStats* find(std::string_view word) const;

  std::uint64_t grand_token_total() const { return grand_token_total_; }
  std::uint64_t state_token_total(int slot) const { return state_token_total_[slot]; }
  std::uint32_t state_user_total(int slot) const { return state_user_total_[slot]; }
  std::uint32_t total_users() const { return total_users_; }

  // token-mass estimators
  double p_state_tokens(int slot) const;
  double p_word_tokens(const WordStats& w) const;
  double p_word_given_state_tokens(const WordStats& w, int slot) const;

  // user-presence estimators
  double p_word_users(const WordStats& w) const;
  double p_state_users(int slot) const;
  double p_state_given_present(const WordStats& w, int slot) const;
  double p_state_given_absent(const WordStats& w, int slot) const;

  // "word <TAB> state <TAB> count" rows under a totals header block.
  void dump_tsv(std::ostream& out) const;

private:
  std::vector<StateLabel> states_;
  std::array<int, StateLabel::kCount> slot_of_{};
  std::map<std::string, WordStats, std::less<>> words_;
  std::vector<std::uint64_t> state_token_total_;
  std::vector<std::uint32_t> state_user_total_;
  std::uint64_t grand_token_total_ = 0;
  std::uint32_t total_users_ = 0;
  Media media_ = Media::other;
};

// Pre-filtered word list with dense, stable indices (lexicographic order).
class Vocabulary {
public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, const CountsTable* counts, int min_users,
             std::size_t dropped);

  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  int index_of(std::string_view word) const;  // -1 when absent
  int min_users() const { return min_users_; }
  std::size_t dropped() const { return dropped_; }
  const CountsTable& counts() const { return *counts_; }

private:
  std::vector<std::string> words_;
  const CountsTable* counts_ = nullptr;  // must outlive the vocabulary
  int min_users_ = 0;
  std::size_t dropped_ = 0;
};

// Keeps words used by at least min_users distinct users.
Vocabulary prefilter(const CountsTable& counts, int min_users = 3);

// Token-mass frequency of a word inside each state, aligned with
// counts.states(). Unknown words are an error.
std::vector<double> relative_state_frequency(std::string_view word, const CountsTable& counts);

}  // namespace geostate
