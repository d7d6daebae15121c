#include "geostate/counts.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "geostate/error.hpp"

namespace geostate {

CountsTable CountsTable::build(const Corpus& corpus) {
  if (corpus.users.empty()) throw Error("build_counts: empty corpus");

  CountsTable table;
  table.media_ = corpus.media;
  table.slot_of_.fill(-1);

  std::set<StateLabel> present;
  for (const auto& u : corpus.users) present.insert(u.state);
  table.states_.assign(present.begin(), present.end());
  for (std::size_t i = 0; i < table.states_.size(); ++i)
    table.slot_of_[table.states_[i].index()] = static_cast<int>(i);

  const std::size_t n_states = table.states_.size();
  table.state_token_total_.assign(n_states, 0);
  table.state_user_total_.assign(n_states, 0);

  for (const auto& u : corpus.users) {
    const int slot = table.slot_of_[u.state.index()];
    ++table.state_user_total_[slot];
    ++table.total_users_;
    for (const auto& [word, count] : u.tokens) {
      auto& stats = table.words_[word];
      if (stats.state_tokens.empty()) {
        stats.state_tokens.assign(n_states, 0);
        stats.state_users.assign(n_states, 0);
      }
      stats.state_tokens[slot] += count;
      stats.total_tokens += count;
      ++stats.state_users[slot];
      ++stats.total_users;
      table.state_token_total_[slot] += count;
      table.grand_token_total_ += count;
    }
  }
  return table;
}

const CountsTable::WordStats* CountsTable::find(std::string_view word) const {
  const auto it = words_.find(word);
  return it == words_.end() ? nullptr : &it->second;
}

double CountsTable::p_state_tokens(int slot) const {
  return static_cast<double>(state_token_total_[slot]) / static_cast<double>(grand_token_total_);
}

double CountsTable::p_word_tokens(const WordStats& w) const {
  return static_cast<double>(w.total_tokens) / static_cast<double>(grand_token_total_);
}

double CountsTable::p_word_given_state_tokens(const WordStats& w, int slot) const {
  const std::uint64_t total = state_token_total_[slot];
  if (total == 0) return 0.0;
  return static_cast<double>(w.state_tokens[slot]) / static_cast<double>(total);
}

double CountsTable::p_word_users(const WordStats& w) const {
  return static_cast<double>(w.total_users) / static_cast<double>(total_users_);
}

double CountsTable::p_state_users(int slot) const {
  return static_cast<double>(state_user_total_[slot]) / static_cast<double>(total_users_);
}

double CountsTable::p_state_given_present(const WordStats& w, int slot) const {
  if (w.total_users == 0) return 0.0;
  return static_cast<double>(w.state_users[slot]) / static_cast<double>(w.total_users);
}

double CountsTable::p_state_given_absent(const WordStats& w, int slot) const {
  const std::uint32_t absent = total_users_ - w.total_users;
  if (absent == 0) return 0.0;
  return static_cast<double>(state_user_total_[slot] - w.state_users[slot]) /
         static_cast<double>(absent);
}

void CountsTable::dump_tsv(std::ostream& out) const {
  out << "# grand_token_total\t" << grand_token_total_ << '\n';
  out << "# total_users\t" << total_users_ << '\n';
  for (std::size_t i = 0; i < states_.size(); ++i)
    out << "# state\t" << states_[i].code() << "\ttokens\t" << state_token_total_[i] << "\tusers\t"
        << state_user_total_[i] << '\n';
  for (const auto& [word, stats] : words_) {
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (stats.state_tokens[i] == 0) continue;
      out << word << '\t' << states_[i].code() << '\t' << stats.state_tokens[i] << '\n';
    }
  }
}

Vocabulary::Vocabulary(std::vector<std::string> words, const CountsTable* counts, int min_users,
                       std::size_t dropped)
    : words_(std::move(words)), counts_(counts), min_users_(min_users), dropped_(dropped) {}

int Vocabulary::index_of(std::string_view word) const {
  const auto it = std::lower_bound(words_.begin(), words_.end(), word);
  if (it == words_.end() || *it != word) return -1;
  return static_cast<int>(it - words_.begin());
}

Vocabulary prefilter(const CountsTable& counts, int min_users) {
  if (min_users < 1) throw Error("prefilter: min_users must be at least 1");
  std::vector<std::string> kept;
  std::size_t dropped = 0;
  for (const auto& [word, stats] : counts.words()) {
    if (stats.total_users >= static_cast<std::uint32_t>(min_users))
      kept.push_back(word);
    else
      ++dropped;
  }
  return Vocabulary(std::move(kept), &counts, min_users, dropped);
}

std::vector<double> relative_state_frequency(std::string_view word, const CountsTable& counts) {
  const auto* stats = counts.find(word);
  if (!stats) throw Error("relative_state_frequency: unknown word: " + std::string(word));
  std::vector<double> out(counts.states().size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = counts.p_word_given_state_tokens(*stats, static_cast<int>(i));
  return out;
}

}  // namespace geostate
