#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "geostate/counts.hpp"
#include "geostate/weighting.hpp"
#include "oracles.hpp"

using geostate::CountsTable;
using geostate::igr;
using geostate::prefilter;
using geostate::rank_and_select;
using geostate::StateLabel;
using geostate::Vocabulary;
using geostate::WeightMethod;
using geostate::wlh;
using geostate::wlh_argmax;

namespace {

// users_per_state users in each of the first n states; every user carries
// the background word, plus whatever `extra` assigns per (state, user).
geostate::Corpus grid_corpus(
    int n_states, int users_per_state,
    const std::function<std::vector<std::pair<std::string, std::uint32_t>>(int, int)>& extra) {
  std::vector<geostate::TokenizedUser> users;
  for (int s = 0; s < n_states; ++s)
    for (int u = 0; u < users_per_state; ++u) {
      auto tokens = extra(s, u);
      tokens.emplace_back("bg", 1);
      users.push_back(oracles::user("g" + std::to_string(s) + "_" + std::to_string(u),
                                    StateLabel::from_index(s).code(), std::move(tokens)));
    }
  return oracles::corpus_from(std::move(users));
}

}  // namespace

TEST_CASE("a word marking exactly one state has the top gain ratio") {
  // 4 states x 5 users; "marker" in every TX-slot user, nowhere else
  const auto c = grid_corpus(4, 5, [](int s, int u) {
    std::vector<std::pair<std::string, std::uint32_t>> t;
    if (s == 0) t.emplace_back("marker", 1);
    if (u % 2 == 0) t.emplace_back("common", 2);
    return t;
  });
  const auto counts = CountsTable::build(c);
  const double marker = igr("marker", counts).score;
  for (const auto& [word, stats] : counts.words())
    CHECK(marker >= igr(word, counts).score);
  CHECK(marker > 0.9);
}

TEST_CASE("presence matching the state distribution gains nothing") {
  // every state has the word in exactly two of its four users
  const auto c = grid_corpus(3, 4, [](int, int u) {
    std::vector<std::pair<std::string, std::uint32_t>> t;
    if (u < 2) t.emplace_back("flat", 3);
    return t;
  });
  const auto counts = CountsTable::build(c);
  const auto score = igr("flat", counts);
  CHECK(score.score == 0.0);
  CHECK(!score.degenerate);
}

TEST_CASE("a word in every user has no split to score") {
  const auto c = grid_corpus(3, 4, [](int, int) {
    return std::vector<std::pair<std::string, std::uint32_t>>{{"everywhere", 1}};
  });
  const auto counts = CountsTable::build(c);
  const auto score = igr("everywhere", counts);
  CHECK(score.score == 0.0);
  CHECK(score.degenerate);
  // "bg" is also in every user by construction
  CHECK(igr("bg", counts).degenerate);
}

TEST_CASE("gain ratio matches a contingency-table recomputation") {
  geostate::Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = oracles::random_corpus(rng, 60, 15, 5);
    const auto counts = CountsTable::build(c);
    for (const auto& word : oracles::corpus_words(c)) {
      const double got = igr(word, counts).score;
      const double want = oracles::igr_bruteforce(word, c);
      CHECK(std::abs(got - want) <= 1e-9);
    }
  }
}

TEST_CASE("locality ratio of an exclusive word equals the state count") {
  for (int k : {2, 5, 50}) {
    // token-balanced: every user carries 10 tokens total
    const auto c = grid_corpus(k, 2, [](int s, int u) {
      std::vector<std::pair<std::string, std::uint32_t>> t;
      if (s == 0)
        t.emplace_back("exclusive", 9);
      else
        t.emplace_back("filler" + std::to_string(s), 9);
      return t;
    });
    const auto counts = CountsTable::build(c);
    const auto score = wlh("exclusive", counts);
    CHECK(std::abs(score.score - k) <= 1e-12 * k);
    const auto [value, state] = wlh_argmax("exclusive", counts);
    CHECK(value == score.score);
    CHECK(state == StateLabel::from_index(0));
  }
}

TEST_CASE("a uniformly spread word scores exactly one") {
  for (int k : {2, 5, 50}) {
    const auto c = grid_corpus(k, 2, [](int, int) {
      return std::vector<std::pair<std::string, std::uint32_t>>{{"uniform", 4}, {"pad", 5}};
    });
    const auto counts = CountsTable::build(c);
    CHECK(wlh("uniform", counts).score == 1.0);
    CHECK(wlh("pad", counts).score == 1.0);
    CHECK(wlh("bg", counts).score == 1.0);
  }
}

TEST_CASE("scores ignore a constant factor on every count") {
  geostate::Rng rng(555);
  const auto base = oracles::random_corpus(rng, 40, 12, 4);
  const auto counts0 = CountsTable::build(base);
  for (int k : {2, 7, 100}) {
    auto scaled = base;
    for (auto& u : scaled.users)
      for (auto& [w, n] : u.tokens) n *= k;
    const auto counts1 = CountsTable::build(scaled);
    for (const auto& word : oracles::corpus_words(base)) {
      CHECK(wlh(word, counts0).score == wlh(word, counts1).score);
      CHECK(igr(word, counts0).score == igr(word, counts1).score);
    }
  }
}

TEST_CASE("exclusive words outscore words spread over states") {
  const auto c = grid_corpus(4, 3, [](int s, int u) {
    std::vector<std::pair<std::string, std::uint32_t>> t;
    if (s == 1) t.emplace_back("tight", 5);
    t.emplace_back("loose", 5);  // everywhere
    return t;
  });
  const auto counts = CountsTable::build(c);
  CHECK(wlh("tight", counts).score > wlh("loose", counts).score);
  CHECK(igr("tight", counts).score > igr("loose", counts).score);
}

TEST_CASE("argmax state ties break to the first code") {
  // word with identical mass in two token-balanced states
  const auto c = grid_corpus(3, 2, [](int s, int u) {
    std::vector<std::pair<std::string, std::uint32_t>> t;
    if (s == 0 || s == 1) t.emplace_back("pair", 3);
    if (s == 2) t.emplace_back("elsewhere", 3);
    return t;
  });
  const auto counts = CountsTable::build(c);
  const auto [value, state] = wlh_argmax("pair", counts);
  CHECK(state == StateLabel::from_index(0));  // AK before AL
}

TEST_CASE("selection keeps the top fraction by score") {
  geostate::Rng rng(808);
  const auto c = oracles::random_corpus(rng, 50, 10, 4);
  const auto counts = CountsTable::build(c);
  const auto vocab = prefilter(counts, 1);
  const auto full = rank_and_select(vocab, counts, WeightMethod::wlh, 1.0);
  CHECK(full.words.size() == vocab.size());
  CHECK(full.origin == "wlh");
  REQUIRE(full.scores.size() == full.words.size());
  for (std::size_t i = 1; i < full.scores.size(); ++i)
    CHECK(full.scores[i - 1] >= full.scores[i]);
  for (const auto& w : full.words) CHECK(full.index_of(w) >= 0);
  CHECK(full.index_of("definitely_absent") == -1);
}

TEST_CASE("half of ten words is the top five") {
  std::vector<geostate::TokenizedUser> users;
  for (int i = 0; i < 10; ++i) {
    // word w<i> appears in i+1 users; lower i words are more exclusive
    for (int u = 0; u <= i; ++u) {
      const auto id = "u" + std::to_string(i) + "_" + std::to_string(u);
      users.push_back(
          oracles::user(id, StateLabel::from_index(u % 3).code(), {{"w" + std::to_string(i), 1}}));
    }
  }
  const auto c = oracles::corpus_from(std::move(users));
  const auto counts = CountsTable::build(c);
  const auto vocab = prefilter(counts, 1);
  REQUIRE(vocab.size() == 10);
  const auto half = rank_and_select(vocab, counts, WeightMethod::igr, 0.5);
  CHECK(half.words.size() == 5);
  CHECK(half.fraction == 0.5);
}

TEST_CASE("smaller fractions are prefixes of larger ones") {
  geostate::Rng rng(909);
  const auto c = oracles::random_corpus(rng, 60, 25, 5);
  const auto counts = CountsTable::build(c);
  const auto vocab = prefilter(counts, 1);
  for (auto method : {WeightMethod::igr, WeightMethod::wlh}) {
    const auto full = rank_and_select(vocab, counts, method, 1.0);
    for (double f : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      const auto part = rank_and_select(vocab, counts, method, f);
      const auto expect =
          static_cast<std::size_t>(std::ceil(f * static_cast<double>(vocab.size()) - 1e-9));
      CHECK(part.words.size() == expect);
      for (std::size_t i = 0; i < part.words.size(); ++i) CHECK(part.words[i] == full.words[i]);
    }
  }
}

TEST_CASE("the unselected baseline keeps the vocabulary in order") {
  geostate::Rng rng(31);
  const auto c = oracles::random_corpus(rng, 30, 8, 3);
  const auto counts = CountsTable::build(c);
  const auto vocab = prefilter(counts, 2);
  const auto all = geostate::all_words_features(vocab);
  CHECK(all.origin == "all_words");
  CHECK(all.words == vocab.words());
  CHECK(all.scores.empty());
}

TEST_CASE("feature sets round-trip through their text form") {
  geostate::Rng rng(47);
  const auto c = oracles::random_corpus(rng, 40, 15, 4);
  const auto counts = CountsTable::build(c);
  const auto vocab = prefilter(counts, 1);
  const auto set = rank_and_select(vocab, counts, WeightMethod::wlh, 0.6);
  std::stringstream buf;
  geostate::save_feature_set(set, buf);
  const auto back = geostate::load_feature_set(buf);
  CHECK(back.origin == set.origin);
  CHECK(back.fraction == set.fraction);
  CHECK(back.words == set.words);
  REQUIRE(back.scores.size() == set.scores.size());
  for (std::size_t i = 0; i < set.scores.size(); ++i)
    CHECK(back.scores[i] == set.scores[i]);  // exact, not approximate
  for (const auto& w : back.words) CHECK(back.index_of(w) == set.index_of(w));
}
