#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "geostate/corpus.hpp"
#include "geostate/error.hpp"
#include "oracles.hpp"

using geostate::Corpus;
using geostate::compute_stats;
using geostate::Error;
using geostate::Media;
using geostate::planted_word;
using geostate::split;
using geostate::SplitSpec;
using geostate::StateLabel;
using geostate::synth_corpus;
using geostate::SynthSpec;
using geostate::TokenizedUser;

namespace {

Corpus flat_corpus(int n_users, int n_states) {
  std::vector<TokenizedUser> users;
  for (int i = 0; i < n_users; ++i) {
    auto u = oracles::user("u" + std::to_string(1000 + i),
                           StateLabel::from_index(i % n_states).code(), {{"tok", 1}});
    users.push_back(std::move(u));
  }
  return oracles::corpus_from(std::move(users));
}

std::set<std::string> ids(const Corpus& c) {
  std::set<std::string> out;
  for (const auto& u : c.users) out.insert(u.user_id);
  return out;
}

}  // namespace

TEST_CASE("a hundred users split 80/10/10") {
  const auto c = flat_corpus(100, 5);
  SplitSpec spec;
  spec.seed = 7;
  const auto r = split(c, spec);
  CHECK(r.train.users.size() == 80);
  CHECK(r.dev.users.size() == 10);
  CHECK(r.test.users.size() == 10);
}

TEST_CASE("splits are a partition of the corpus") {
  const auto c = flat_corpus(103, 7);
  SplitSpec spec;
  spec.seed = 3;
  const auto r = split(c, spec);
  const auto train = ids(r.train), dev = ids(r.dev), test = ids(r.test);
  CHECK(train.size() + dev.size() + test.size() == c.users.size());
  std::set<std::string> all = train;
  all.insert(dev.begin(), dev.end());
  all.insert(test.begin(), test.end());
  CHECK(all == ids(c));
}

TEST_CASE("the same seed reproduces the same membership") {
  const auto c = flat_corpus(100, 4);
  SplitSpec spec;
  spec.seed = 7;
  const auto r1 = split(c, spec);
  const auto r2 = split(c, spec);
  CHECK(ids(r1.train) == ids(r2.train));
  CHECK(ids(r1.dev) == ids(r2.dev));
  CHECK(ids(r1.test) == ids(r2.test));
  spec.seed = 8;
  const auto r3 = split(c, spec);
  CHECK(ids(r3.train) != ids(r1.train));
}

TEST_CASE("membership does not depend on user order") {
  auto c = flat_corpus(60, 3);
  auto shuffled = c;
  std::reverse(shuffled.users.begin(), shuffled.users.end());
  SplitSpec spec;
  spec.seed = 21;
  const auto r1 = split(c, spec);
  const auto r2 = split(shuffled, spec);
  CHECK(ids(r1.train) == ids(r2.train));
  CHECK(ids(r1.test) == ids(r2.test));
}

TEST_CASE("stratified split keeps per-state proportions") {
  const auto c = flat_corpus(500, 50);  // ten users per state
  SplitSpec spec;
  spec.seed = 13;
  const auto r = split(c, spec);
  std::map<int, int> train_per_state, dev_per_state, test_per_state;
  for (const auto& u : r.train.users) ++train_per_state[u.state.index()];
  for (const auto& u : r.dev.users) ++dev_per_state[u.state.index()];
  for (const auto& u : r.test.users) ++test_per_state[u.state.index()];
  for (int s = 0; s < 50; ++s) {
    CHECK(train_per_state[s] == 8);
    CHECK(dev_per_state[s] == 1);
    CHECK(test_per_state[s] == 1);
  }
}

TEST_CASE("stratified split refuses states with fewer than three users") {
  auto c = flat_corpus(40, 4);
  c.users.push_back(oracles::user("tiny1", "WY", {{"tok", 1}}));
  c.users.push_back(oracles::user("tiny2", "WY", {{"tok", 1}}));
  SplitSpec spec;
  CHECK_THROWS_AS(split(c, spec), Error);
  try {
    split(c, spec);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("WY") != std::string::npos);
  }
  spec.stratify_by_state = false;  // the pooled split is fine with it
  CHECK_NOTHROW(split(c, spec));
}

TEST_CASE("invalid fractions are all reported at once") {
  const auto c = flat_corpus(30, 3);
  SplitSpec spec;
  spec.train_frac = 0;
  spec.dev_frac = -0.1;
  spec.test_frac = 0.5;
  try {
    split(c, spec);
    CHECK(false);
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("train_frac") != std::string::npos);
    CHECK(msg.find("dev_frac") != std::string::npos);
    CHECK(msg.find("sum to 1") != std::string::npos);
  }
}

TEST_CASE("stats for a single user with three documents") {
  TokenizedUser u = oracles::user("solo", "TX", {{"a", 1}});
  u.doc_char_counts = {1, 2, 3};
  u.char_count = 6;
  const auto stats = compute_stats(oracles::corpus_from({u}));
  CHECK(stats.docs_per_user.mean == doctest::Approx(3.0));
  CHECK(stats.docs_per_user.max == doctest::Approx(3.0));
  CHECK(stats.docs_per_user.stddev == doctest::Approx(0.0));
  CHECK(stats.chars_per_doc.median == doctest::Approx(2.0));
  CHECK(stats.chars_per_doc.mean == doctest::Approx(2.0));
  CHECK(stats.chars_per_doc.max == doctest::Approx(3.0));
  CHECK(stats.chars_per_user.mean == doctest::Approx(6.0));
  CHECK(stats.chars_per_user.stddev == doctest::Approx(0.0));
}

TEST_CASE("stats agree with a naive recomputation on a random corpus") {
  geostate::Rng rng(99);
  std::vector<TokenizedUser> users;
  std::vector<double> docs_per_user, chars_per_doc, chars_per_user;
  for (int i = 0; i < 200; ++i) {
    auto u = oracles::user("s" + std::to_string(i), StateLabel::from_index(i % 11).code(),
                           {{"x", 1}});
    const int docs = 1 + static_cast<int>(rng.bounded(6));
    u.doc_char_counts.clear();
    u.char_count = 0;
    for (int d = 0; d < docs; ++d) {
      const auto len = 1 + rng.bounded(5000);
      u.doc_char_counts.push_back(static_cast<std::uint32_t>(len));
      u.char_count += len;
      chars_per_doc.push_back(static_cast<double>(len));
    }
    docs_per_user.push_back(docs);
    chars_per_user.push_back(static_cast<double>(u.char_count));
    users.push_back(std::move(u));
  }
  const auto stats = compute_stats(oracles::corpus_from(std::move(users)));

  auto naive = [](std::vector<double> v) {
    geostate::Summary s;
    std::sort(v.begin(), v.end());
    s.max = v.back();
    double sum = 0;
    for (double x : v) sum += x;
    s.mean = sum / v.size();
    double sq = 0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / v.size());
    s.median = v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2.0;
    return s;
  };
  for (auto [got, want] : {std::pair{stats.docs_per_user, naive(docs_per_user)},
                           std::pair{stats.chars_per_doc, naive(chars_per_doc)},
                           std::pair{stats.chars_per_user, naive(chars_per_user)}}) {
    CHECK(got.max == doctest::Approx(want.max).epsilon(1e-12));
    CHECK(got.mean == doctest::Approx(want.mean).epsilon(1e-12));
    CHECK(got.stddev == doctest::Approx(want.stddev).epsilon(1e-12));
    CHECK(got.median == doctest::Approx(want.median).epsilon(1e-12));
  }
}

TEST_CASE("stats refuse an empty corpus") {
  CHECK_THROWS_AS(compute_stats(Corpus{}), Error);
}

TEST_CASE("planted words with zero locality stay exclusive to their state") {
  SynthSpec spec;
  spec.num_states = 6;
  spec.users_per_state = 5;
  spec.tokens_per_user = 300;
  spec.background_vocab = 40;
  const auto c = synth_corpus(spec, 4);
  CHECK(c.users.size() == 30);
  const auto& family = spec.planted[0];
  for (const auto& u : c.users) {
    const auto own = planted_word(family, u.state, 0);
    CHECK(u.tokens.count(own) == 1);  // rate 0.05 over 300 tokens: ~15 expected
    for (const auto& s : spec.effective_states()) {
      if (s == u.state) continue;
      CHECK(u.tokens.count(planted_word(family, s, 0)) == 0);
    }
  }
}

TEST_CASE("full locality spreads a planted word over all states") {
  SynthSpec spec;
  spec.num_states = 5;
  spec.users_per_state = 20;
  spec.tokens_per_user = 100;
  spec.background_vocab = 30;
  spec.planted = {geostate::PlantedFamily{"wide", 1, 0.2, 1.0}};
  const auto c = synth_corpus(spec, 9);
  // each planted word's tokens should land roughly uniformly across states
  const auto states = spec.effective_states();
  for (const auto& home : states) {
    const auto word = planted_word(spec.planted[0], home, 0);
    std::map<int, std::uint64_t> per_state;
    std::uint64_t total = 0;
    for (const auto& u : c.users) {
      const auto it = u.tokens.find(word);
      if (it == u.tokens.end()) continue;
      per_state[u.state.index()] += it->second;
      total += it->second;
    }
    CHECK(per_state.size() == states.size());  // present everywhere
    for (const auto& [s, n] : per_state) {
      const double share = static_cast<double>(n) / static_cast<double>(total);
      CHECK(share > 0.05);
      CHECK(share < 0.5);
    }
  }
}

TEST_CASE("generation is deterministic in spec and seed") {
  SynthSpec spec;
  spec.num_states = 4;
  spec.users_per_state = 3;
  spec.tokens_per_user = 50;
  spec.background_vocab = 25;
  spec.noise_vocab = 10;
  spec.noise_token_rate = 0.1;
  spec.assign_demographics = true;
  const auto a = synth_corpus(spec, 77);
  const auto b = synth_corpus(spec, 77);
  REQUIRE(a.users.size() == b.users.size());
  for (std::size_t i = 0; i < a.users.size(); ++i) {
    CHECK(a.users[i].user_id == b.users[i].user_id);
    CHECK(a.users[i].state == b.users[i].state);
    CHECK(a.users[i].tokens == b.users[i].tokens);
    CHECK(a.users[i].gender == b.users[i].gender);
    CHECK(a.users[i].industry == b.users[i].industry);
  }
  const auto c = synth_corpus(spec, 78);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.users.size() && !any_diff; ++i)
    any_diff = a.users[i].tokens != c.users[i].tokens;
  CHECK(any_diff);
}

TEST_CASE("token budget per user is honoured") {
  SynthSpec spec;
  spec.num_states = 3;
  spec.users_per_state = 4;
  spec.tokens_per_user = 75;
  spec.background_vocab = 20;
  const auto c = synth_corpus(spec, 1);
  for (const auto& u : c.users) CHECK(u.token_total() == 75);
}

TEST_CASE("bad synth specs report every problem") {
  SynthSpec spec;
  spec.num_states = 0;
  spec.background_vocab = 0;
  spec.planted[0].token_rate = 2.0;
  try {
    synth_corpus(spec, 0);
    CHECK(false);
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("state list") != std::string::npos);
    CHECK(msg.find("background_vocab") != std::string::npos);
    CHECK(msg.find("token_rate") != std::string::npos);
  }
}

TEST_CASE("explicit state lists win over the state count") {
  SynthSpec spec;
  spec.states = {*StateLabel::parse("TX"), *StateLabel::parse("CA")};
  spec.users_per_state = 2;
  spec.tokens_per_user = 30;
  spec.background_vocab = 10;
  const auto c = synth_corpus(spec, 5);
  std::set<int> seen;
  for (const auto& u : c.users) seen.insert(u.state.index());
  CHECK(seen == std::set<int>{StateLabel::parse("CA")->index(), StateLabel::parse("TX")->index()});
}
