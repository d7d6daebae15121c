#include "geostate/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "geostate/error.hpp"
#include "geostate/rng.hpp"

namespace geostate {

std::string_view to_string(Media m) {
  switch (m) {
    case Media::blog: return "blog";
    case Media::tweet: return "tweet";
    case Media::other: return "other";
    case Media::mixed: return "mixed";
  }
  return "other";
}

std::optional<Media> parse_media(std::string_view s) {
  if (s == "blog") return Media::blog;
  if (s == "tweet") return Media::tweet;
  if (s == "other") return Media::other;
  if (s == "mixed") return Media::mixed;
  return std::nullopt;
}

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::male: return "male";
    case Gender::female: return "female";
    case Gender::undefined: return "undefined";
  }
  return "undefined";
}

std::optional<Gender> parse_gender(std::string_view s) {
  std::string k(s);
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  if (k == "male") return Gender::male;
  if (k == "female") return Gender::female;
  if (k == "undefined") return Gender::undefined;
  return std::nullopt;
}

std::uint64_t TokenizedUser::token_total() const {
  std::uint64_t n = 0;
  for (const auto& [word, count] : tokens) n += count;
  return n;
}

namespace {

// Largest-remainder apportionment of n into three parts.
std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& fracs) {
  std::array<std::size_t, 3> out{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double exact = fracs[k] * static_cast<double>(n);
    out[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - std::floor(exact);
    assigned += out[k];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (std::size_t left = n - assigned, k = 0; left > 0; --left, ++k) ++out[order[k % 3]];
  return out;
}

void validate_split_spec(const SplitSpec& spec) {
  std::vector<std::string> bad;
  if (!(spec.train_frac > 0)) bad.push_back("train_frac must be positive");
  if (!(spec.dev_frac > 0)) bad.push_back("dev_frac must be positive");
  if (!(spec.test_frac > 0)) bad.push_back("test_frac must be positive");
  const double sum = spec.train_frac + spec.dev_frac + spec.test_frac;
  if (std::abs(sum - 1.0) > 1e-9) bad.push_back("fractions must sum to 1");
  if (!bad.empty()) {
    std::string msg = "invalid split spec:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw Error(msg);
  }
}

}  // namespace

SplitResult split(const Corpus& corpus, const SplitSpec& spec) {
  validate_split_spec(spec);
  if (corpus.users.empty()) throw Error("split: empty corpus");

  // Group user indices, stratified by state or as one pool. Sorting by
  // user_id first makes membership independent of input order.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < corpus.users.size(); ++i) {
    const std::string key =
        spec.stratify_by_state ? std::string(corpus.users[i].state.code()) : std::string("all");
    groups[key].push_back(i);
  }

  if (spec.stratify_by_state) {
    std::string deficient;
    for (const auto& [key, members] : groups) {
      if (members.size() < 3) {
        deficient += deficient.empty() ? "" : ", ";
        deficient += key + "(" + std::to_string(members.size()) + ")";
      }
    }
    if (!deficient.empty())
      throw Error("split: states with too few users for a three-way stratified split: " +
                  deficient);
  }

  const std::array<double, 3> fracs{spec.train_frac, spec.dev_frac, spec.test_frac};
  std::array<std::vector<std::size_t>, 3> members;
  for (auto& [key, idxs] : groups) {
    std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
      return corpus.users[a].user_id < corpus.users[b].user_id;
    });
    Rng rng(derive_seed(spec.seed, "split/" + key));
    fisher_yates(idxs, rng);
    const auto sizes = apportion(idxs.size(), fracs);
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k)
      for (std::size_t c = 0; c < sizes[k]; ++c) members[k].push_back(idxs[pos++]);
  }

  SplitResult out;
  Corpus* parts[3] = {&out.train, &out.dev, &out.test};
  const char* names[3] = {"train", "dev", "test"};
  for (int k = 0; k < 3; ++k) {
    std::sort(members[k].begin(), members[k].end(), [&](std::size_t a, std::size_t b) {
      return corpus.users[a].user_id < corpus.users[b].user_id;
    });
    parts[k]->media = corpus.media;
    parts[k]->provenance = corpus.provenance + " | split=" + names[k];
    parts[k]->users.reserve(members[k].size());
    for (std::size_t idx : members[k]) parts[k]->users.push_back(corpus.users[idx]);
  }
  return out;
}

namespace {

Summary summarize(std::vector<double> values) {
  Summary s;
  const std::size_t n = values.size();
  s.max = *std::max_element(values.begin(), values.end());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  s.mean = mean;
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  s.stddev = std::sqrt(ss / static_cast<double>(n));  // population
  std::sort(values.begin(), values.end());
  s.median = (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return s;
}

}  // namespace

CorpusStats compute_stats(const Corpus& corpus) {
  if (corpus.users.empty()) throw Error("compute_stats: empty corpus");
  std::vector<double> docs_per_user, chars_per_doc, chars_per_user;
  for (const auto& u : corpus.users) {
    docs_per_user.push_back(static_cast<double>(u.doc_char_counts.size()));
    chars_per_user.push_back(static_cast<double>(u.char_count));
    for (std::uint32_t c : u.doc_char_counts) chars_per_doc.push_back(static_cast<double>(c));
  }
  if (chars_per_doc.empty()) throw Error("compute_stats: corpus has no documents");
  CorpusStats stats;
  stats.docs_per_user = summarize(std::move(docs_per_user));
  stats.chars_per_doc = summarize(std::move(chars_per_doc));
  stats.chars_per_user = summarize(std::move(chars_per_user));
  return stats;
}

std::vector<StateLabel> SynthSpec::effective_states() const {
  if (!states.empty()) return states;
  std::vector<StateLabel> out;
  for (int i = 0; i < num_states; ++i) out.push_back(StateLabel::from_index(i));
  return out;
}

std::string planted_word(const PlantedFamily& family, StateLabel state, int j) {
  std::string code(state.code());
  std::transform(code.begin(), code.end(), code.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return family.prefix + code + std::to_string(j);
}

namespace {

std::string zero_pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

void validate_synth_spec(const SynthSpec& spec) {
  std::vector<std::string> bad;
  const auto states = spec.effective_states();
  if (states.empty() || states.size() > StateLabel::kCount)
    bad.push_back("state list must hold between 1 and 50 states");
  if (spec.users_per_state < 1) bad.push_back("users_per_state must be at least 1");
  if (spec.tokens_per_user < 1) bad.push_back("tokens_per_user must be at least 1");
  if (spec.background_vocab < 1) bad.push_back("background_vocab must be at least 1");
  double planted_rate = 0;
  for (const auto& f : spec.planted) {
    if (f.words_per_state < 1) bad.push_back("planted words_per_state must be at least 1");
    if (f.token_rate < 0 || f.token_rate > 1) bad.push_back("planted token_rate must be in [0,1]");
    if (f.locality < 0 || f.locality > 1) bad.push_back("planted locality must be in [0,1]");
    if (f.prefix.empty()) bad.push_back("planted prefix must be non-empty");
    planted_rate += f.token_rate;
  }
  if (spec.noise_token_rate < 0 || spec.noise_token_rate > 1)
    bad.push_back("noise_token_rate must be in [0,1]");
  if (planted_rate + spec.noise_token_rate > 1.0 + 1e-12)
    bad.push_back("token rates must sum to at most 1");
  if (spec.noise_token_rate > 0) {
    if (spec.noise_words_per_user < 1) bad.push_back("noise_words_per_user must be at least 1");
    if (spec.noise_vocab < spec.noise_words_per_user)
      bad.push_back("noise_vocab must cover noise_words_per_user");
  }
  if (spec.media == Media::mixed) bad.push_back("media must name a single medium");
  if (!bad.empty()) {
    std::string msg = "invalid synth spec:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw Error(msg);
  }
}

}  // namespace

Corpus synth_corpus(const SynthSpec& spec, std::uint64_t seed) {
  validate_synth_spec(spec);
  const auto states = spec.effective_states();
  const int n_states = static_cast<int>(states.size());

  Corpus corpus;
  corpus.media = spec.media;
  corpus.provenance = spec.provenance;

  static const char* kIndustries[] = {"technology", "arts", "law", "education", "science"};

  for (int si = 0; si < n_states; ++si) {
    const StateLabel state = states[si];
    std::string code(state.code());
    std::transform(code.begin(), code.end(), code.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    for (int ui = 0; ui < spec.users_per_state; ++ui) {
      TokenizedUser user;
      user.user_id = spec.id_prefix + code + zero_pad(ui, 4);
      user.state = state;
      user.media = spec.media;

      // One stream per user: corpus content is independent of generation order.
      Rng rng(derive_seed(seed, "synth/" + spec.provenance + "/" + user.user_id));

      std::vector<int> my_noise;
      if (spec.noise_token_rate > 0) {
        while (static_cast<int>(my_noise.size()) < spec.noise_words_per_user) {
          const int pick = static_cast<int>(rng.bounded(spec.noise_vocab));
          if (std::find(my_noise.begin(), my_noise.end(), pick) == my_noise.end())
            my_noise.push_back(pick);
        }
      }

      std::uint64_t joined_len = 0;
      for (int t = 0; t < spec.tokens_per_user; ++t) {
        const double r = rng.next_double();
        std::string word;
        double acc = 0;
        for (const auto& family : spec.planted) {
          acc += family.token_rate;
          if (r < acc) {
            const bool anywhere = rng.next_double() < family.locality;
            const StateLabel home =
                anywhere ? states[rng.bounded(static_cast<std::uint64_t>(n_states))] : state;
            const int j = static_cast<int>(rng.bounded(family.words_per_state));
            word = planted_word(family, home, j);
            break;
          }
        }
        if (word.empty()) {
          if (r < acc + spec.noise_token_rate) {
            const int pick = my_noise[rng.bounded(my_noise.size())];
            word = spec.noise_prefix + zero_pad(pick, 5);
          } else {
            word = spec.background_prefix +
                   zero_pad(static_cast<int>(rng.bounded(spec.background_vocab)), 5);
          }
        }
        joined_len += word.size() + 1;
        ++user.tokens[word];
      }
      if (joined_len > 0) --joined_len;  // no trailing space
      user.doc_char_counts = {static_cast<std::uint32_t>(joined_len)};
      user.char_count = joined_len;

      if (spec.assign_demographics) {
        const int g = (si * spec.users_per_state + ui) % 3;
        user.gender = g == 0 ? Gender::male : g == 1 ? Gender::female : Gender::undefined;
        user.industry = kIndustries[(si + ui) % 5];
      }
      corpus.users.push_back(std::move(user));
    }
  }
  return corpus;
}

}  // namespace geostate
