#include "geostate/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <boost/math/distributions/students_t.hpp>

#include "geostate/error.hpp"

namespace geostate {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Validates that the prediction ids and the gold key set are the same set.
void check_match(const std::vector<Prediction>& preds,
                 const std::map<std::string, StateLabel>& gold) {
  if (preds.empty()) throw Error("evaluate: empty prediction set");
  std::unordered_set<std::string> seen;
  seen.reserve(preds.size());
  for (const auto& p : preds) {
    if (!gold.count(p.user_id)) throw Error("evaluate: prediction for unknown user: " + p.user_id);
    if (!seen.insert(p.user_id).second)
      throw Error("evaluate: duplicate prediction for user: " + p.user_id);
  }
  if (seen.size() != gold.size()) {
    for (const auto& [id, state] : gold) {
      (void)state;
      if (!seen.count(id)) throw Error("evaluate: missing prediction for user: " + id);
    }
  }
}

void run_parallel(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::map<std::string, StateLabel> gold_labels(const Corpus& corpus) {
  std::map<std::string, StateLabel> gold;
  for (const auto& user : corpus.users) {
    if (!gold.emplace(user.user_id, user.state).second)
      throw Error("gold_labels: duplicate user id: " + user.user_id);
  }
  return gold;
}

double accuracy(const std::vector<Prediction>& preds,
                const std::map<std::string, StateLabel>& gold) {
  check_match(preds, gold);
  std::size_t correct = 0;
  for (const auto& p : preds)
    if (p.state == gold.at(p.user_id)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

double near_miss_accuracy(const std::vector<Prediction>& preds,
                          const std::map<std::string, StateLabel>& gold,
                          const AdjacencyGraph& adjacency) {
  check_match(preds, gold);
  std::size_t hit = 0;
  for (const auto& p : preds) {
    const StateLabel g = gold.at(p.user_id);
    if (p.state == g || adjacency.adjacent(g, p.state)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(preds.size());
}

EvalReport evaluate_predictions(const std::vector<Prediction>& preds, const Corpus& test,
                                const AdjacencyGraph& adjacency, RunProvenance provenance) {
  const auto gold = gold_labels(test);
  check_match(preds, gold);

  EvalReport report;
  report.provenance = std::move(provenance);
  report.n_test = preds.size();

  std::size_t exact = 0, near = 0;
  std::map<StateLabel, std::size_t> correct_by_state;
  for (const auto& p : preds) {
    const StateLabel g = gold.at(p.user_id);
    report.per_state_total[g] += 1;
    report.confusion[{g, p.state}] += 1;
    if (p.state == g) {
      ++exact;
      ++near;
      correct_by_state[g] += 1;
    } else if (adjacency.adjacent(g, p.state)) {
      ++near;
    }
  }
  const double n = static_cast<double>(report.n_test);
  report.accuracy = static_cast<double>(exact) / n;
  report.near_miss = static_cast<double>(near) / n;
  for (const auto& [state, total] : report.per_state_total) {
    const auto it = correct_by_state.find(state);
    const double c = it == correct_by_state.end() ? 0.0 : static_cast<double>(it->second);
    report.per_state_accuracy[state] = c / static_cast<double>(total);
  }
  return report;
}

std::string_view to_string(SliceField f) {
  switch (f) {
    case SliceField::state: return "state";
    case SliceField::gender: return "gender";
    case SliceField::industry: return "industry";
  }
  throw Error("unknown slice field");
}

SliceReport slice_accuracy(const std::vector<Prediction>& preds, const Corpus& test,
                           SliceField field, std::size_t min_support) {
  const auto gold = gold_labels(test);
  check_match(preds, gold);

  std::unordered_map<std::string, const TokenizedUser*> by_id;
  by_id.reserve(test.users.size());
  for (const auto& user : test.users) by_id.emplace(user.user_id, &user);

  std::map<std::string, std::pair<std::size_t, std::size_t>> cells;  // value -> (correct, total)
  for (const auto& p : preds) {
    const TokenizedUser& user = *by_id.at(p.user_id);
    std::string value;
    switch (field) {
      case SliceField::state: value = user.state.code(); break;
      case SliceField::gender:
        if (!user.gender) continue;
        value = to_string(*user.gender);
        break;
      case SliceField::industry:
        if (user.industry.empty()) continue;
        value = user.industry;
        break;
    }
    auto& cell = cells[value];
    cell.second += 1;
    if (p.state == user.state) cell.first += 1;
  }

  SliceReport report;
  report.field = field;
  report.min_support = min_support;
  for (const auto& [value, cell] : cells) {
    SliceRow row;
    row.value = value;
    row.support = cell.second;
    row.accuracy = static_cast<double>(cell.first) / static_cast<double>(cell.second);
    row.low_support = cell.second < min_support;
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

// Ranks with ties averaged, 1-based.
std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j + 1);  // average of i+1 .. j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

}  // namespace

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("spearman: input lengths differ");
  const std::size_t n = x.size();
  if (n < 3) throw Error("spearman: needs at least 3 points");
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; });
  };
  if (constant(x) || constant(y)) throw Error("spearman: constant input has no rank order");

  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx, dy = ry[i] - my;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  double rho = cov / std::sqrt(vx * vy);
  rho = std::clamp(rho, -1.0, 1.0);

  SpearmanResult result;
  result.rho = rho;
  const double df = static_cast<double>(n - 2);
  const double denom = 1.0 - rho * rho;
  if (denom <= 1e-15) {
    result.p_value = 0.0;
    return result;
  }
  const double t = rho * std::sqrt(df / denom);
  boost::math::students_t dist(df);
  result.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  result.p_value = std::clamp(result.p_value, 0.0, 1.0);
  return result;
}

SpearmanResult spearman(const std::map<std::string, double>& x,
                        const std::map<std::string, double>& y) {
  if (x.size() != y.size()) throw Error("spearman: key sets differ in size");
  std::vector<double> vx, vy;
  vx.reserve(x.size());
  vy.reserve(x.size());
  for (const auto& [key, value] : x) {
    const auto it = y.find(key);
    if (it == y.end()) throw Error("spearman: key missing from second input: " + key);
    vx.push_back(value);
    vy.push_back(it->second);
  }
  return spearman(vx, vy);
}

ProportionTestResult proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2,
                                     std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw Error("proportion_test: sample sizes must be positive");
  if (k1 > n1 || k2 > n2) throw Error("proportion_test: successes exceed the sample size");

  ProportionTestResult result;
  const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  const double pooled =
      static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  if (pooled == 0.0 || pooled == 1.0) {
    // No sampling variance under the pooled null; the samples cannot differ.
    result.degenerate = true;
    result.p_value = 1.0;
    result.z = 0.0;
    return result;
  }
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  result.z = (p1 - p2) / se;
  result.p_value = std::erfc(std::fabs(result.z) / std::sqrt(2.0));
  result.p_value = std::clamp(result.p_value, 0.0, 1.0);
  return result;
}

std::string_view to_string(FeatureMethod m) {
  switch (m) {
    case FeatureMethod::all_words: return "all_words";
    case FeatureMethod::igr: return "igr";
    case FeatureMethod::wlh: return "wlh";
    case FeatureMethod::lexicons: return "lexicons";
  }
  throw Error("unknown feature method");
}

std::string_view to_string(ClassifierKind c) {
  switch (c) {
    case ClassifierKind::nb: return "nb";
    case ClassifierKind::linear: return "linear";
  }
  throw Error("unknown classifier kind");
}

std::string ExperimentConfig::feature_label() const {
  switch (method) {
    case FeatureMethod::all_words: return "all_words";
    case FeatureMethod::igr: return "igr@" + format_double(fraction);
    case FeatureMethod::wlh: return "wlh@" + format_double(fraction);
    case FeatureMethod::lexicons:
      return "lexicons(p=" + std::to_string(lexicon_params.p) +
             ";h=" + format_double(lexicon_params.h) + ";t=" + std::to_string(lexicon_params.t) +
             ")";
  }
  throw Error("unknown feature method");
}

std::string ExperimentConfig::display_name() const {
  if (!name.empty()) return name;
  std::string tag = classifier == ClassifierKind::nb
                        ? "nb(a=" + format_double(alpha) + ")"
                        : "linear(l2=" + format_double(hyper.l2) +
                              ";ep=" + std::to_string(hyper.epochs) + ")";
  return feature_label() + "+" + tag + "+min" + std::to_string(min_users);
}

namespace {

void validate_grid(std::span<const ExperimentConfig> grid) {
  if (grid.empty()) throw Error("run_experiment: empty config grid");
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& cfg = grid[i];
    const std::string where = "config " + std::to_string(i + 1) + " (" + cfg.display_name() + ")";
    if ((cfg.method == FeatureMethod::igr || cfg.method == FeatureMethod::wlh) &&
        (!(cfg.fraction > 0.0) || cfg.fraction > 1.0))
      problems.push_back(where + ": fraction must be in (0,1]");
    if (cfg.method == FeatureMethod::lexicons) {
      if (cfg.lexicon_params.p < 1) problems.push_back(where + ": lexicon p must be >= 1");
      if (!(cfg.lexicon_params.h > 0.0)) problems.push_back(where + ": lexicon h must be > 0");
      if (cfg.lexicon_params.t < 1) problems.push_back(where + ": lexicon t must be >= 1");
    }
    if (cfg.classifier == ClassifierKind::nb && !(cfg.alpha > 0.0))
      problems.push_back(where + ": alpha must be > 0");
    if (cfg.classifier == ClassifierKind::linear) {
      if (cfg.hyper.epochs < 1) problems.push_back(where + ": epochs must be >= 1");
      if (!(cfg.hyper.lr > 0.0)) problems.push_back(where + ": learning rate must be > 0");
      if (cfg.hyper.l2 < 0.0) problems.push_back(where + ": l2 must be >= 0");
      if (cfg.hyper.tol < 0.0) problems.push_back(where + ": tol must be >= 0");
    }
    if (cfg.min_users < 1) problems.push_back(where + ": min_users must be >= 1");
  }
  if (!problems.empty()) {
    std::string joined = "invalid experiment grid: " + problems[0];
    for (std::size_t i = 1; i < problems.size(); ++i) joined += "; " + problems[i];
    throw Error(joined);
  }
}

struct TrainCache {
  CountsTable counts;
  std::map<int, Vocabulary> vocabs;                      // by min_users
  std::map<std::pair<int, int>, FeatureSet> ranked;      // (method, min_users) -> full ranking
};

TrainCache build_cache(const Corpus& train, std::span<const ExperimentConfig> grid) {
  TrainCache cache;
  cache.counts = CountsTable::build(train);
  for (const auto& cfg : grid) {
    if (!cache.vocabs.count(cfg.min_users))
      cache.vocabs.emplace(cfg.min_users, prefilter(cache.counts, cfg.min_users));
  }
  for (const auto& cfg : grid) {
    if (cfg.method != FeatureMethod::igr && cfg.method != FeatureMethod::wlh) continue;
    const auto key = std::make_pair(static_cast<int>(cfg.method), cfg.min_users);
    if (cache.ranked.count(key)) continue;
    const WeightMethod method =
        cfg.method == FeatureMethod::igr ? WeightMethod::igr : WeightMethod::wlh;
    cache.ranked.emplace(key, rank_and_select(cache.vocabs.at(cfg.min_users), cache.counts,
                                              method, 1.0));
  }
  return cache;
}

// A fraction cut of the full ranking; mirrors the selection arithmetic so
// the result is identical to ranking at that fraction directly.
FeatureSet feature_prefix(const FeatureSet& full, double fraction) {
  if (fraction == 1.0) return full;
  const auto n = static_cast<double>(full.words.size());
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * n - 1e-9));
  FeatureSet set;
  set.origin = full.origin;
  set.fraction = fraction;
  set.source_media = full.source_media;
  set.min_users = full.min_users;
  set.words.assign(full.words.begin(), full.words.begin() + static_cast<std::ptrdiff_t>(keep));
  set.scores.assign(full.scores.begin(), full.scores.begin() + static_cast<std::ptrdiff_t>(keep));
  for (std::size_t i = 0; i < set.words.size(); ++i)
    set.index.emplace(set.words[i], static_cast<int>(i));
  return set;
}

FeatureSet features_for(const ExperimentConfig& cfg, const TrainCache& cache) {
  const Vocabulary& vocab = cache.vocabs.at(cfg.min_users);
  switch (cfg.method) {
    case FeatureMethod::all_words: return all_words_features(vocab);
    case FeatureMethod::igr:
    case FeatureMethod::wlh:
      return feature_prefix(
          cache.ranked.at({static_cast<int>(cfg.method), cfg.min_users}), cfg.fraction);
    case FeatureMethod::lexicons: {
      const LexiconSet lex = build_lexicons(vocab, cache.counts, cfg.lexicon_params);
      FeatureSet set = lexicon_feature_set(lex);
      set.source_media = std::string(to_string(cache.counts.media()));
      set.min_users = vocab.min_users();
      return set;
    }
  }
  throw Error("unknown feature method");
}

// Uncached path used where the feature-building cost itself is measured.
FeatureSet features_direct(const ExperimentConfig& cfg, const Vocabulary& vocab,
                           const CountsTable& counts) {
  switch (cfg.method) {
    case FeatureMethod::all_words: return all_words_features(vocab);
    case FeatureMethod::igr: return rank_and_select(vocab, counts, WeightMethod::igr, cfg.fraction);
    case FeatureMethod::wlh: return rank_and_select(vocab, counts, WeightMethod::wlh, cfg.fraction);
    case FeatureMethod::lexicons: {
      const LexiconSet lex = build_lexicons(vocab, counts, cfg.lexicon_params);
      FeatureSet set = lexicon_feature_set(lex);
      set.source_media = std::string(to_string(counts.media()));
      set.min_users = vocab.min_users();
      return set;
    }
  }
  throw Error("unknown feature method");
}

Model fit_model(const ExperimentConfig& cfg, const Corpus& train, const FeatureSet& features) {
  if (cfg.classifier == ClassifierKind::nb) return Model(train_nb(train, features, cfg.alpha));
  return Model(train_linear(train, features, cfg.hyper));
}

struct FittedGrid {
  TrainCache cache;
  std::vector<Model> models;
};

FittedGrid fit_grid(const Corpus& train, std::span<const ExperimentConfig> grid, int workers) {
  validate_grid(grid);
  if (train.users.empty()) throw Error("run_experiment: training corpus is empty");
  FittedGrid fitted;
  fitted.cache = build_cache(train, grid);
  fitted.models.resize(grid.size());
  run_parallel(grid.size(), workers, [&](std::size_t i) {
    const FeatureSet features = features_for(grid[i], fitted.cache);
    fitted.models[i] = fit_model(grid[i], train, features);
  });
  return fitted;
}

EvalReport eval_model(const Model& model, const ExperimentConfig& cfg, const Corpus& corpus,
                      const AdjacencyGraph& adjacency, std::string split, std::string train_media,
                      std::string dev_media, std::string test_media) {
  RunProvenance prov;
  prov.config_name = cfg.display_name();
  prov.features = cfg.feature_label();
  prov.classifier = std::string(to_string(cfg.classifier));
  prov.split = std::move(split);
  prov.train_media = std::move(train_media);
  prov.dev_media = std::move(dev_media);
  prov.test_media = std::move(test_media);
  return evaluate_predictions(predict_all(model, corpus), corpus, adjacency, std::move(prov));
}

}  // namespace

Model fit_config(const ExperimentConfig& config, const Corpus& train) {
  const std::span<const ExperimentConfig> grid(&config, 1);
  validate_grid(grid);
  if (train.users.empty()) throw Error("fit_config: training corpus is empty");
  const CountsTable counts = CountsTable::build(train);
  const Vocabulary vocab = prefilter(counts, config.min_users);
  const FeatureSet features = features_direct(config, vocab, counts);
  return fit_model(config, train, features);
}

std::vector<ExperimentResult> run_experiment(const Corpus& train, const Corpus& dev,
                                             const Corpus& test,
                                             std::span<const ExperimentConfig> grid,
                                             const AdjacencyGraph& adjacency, int workers) {
  if (dev.users.empty()) throw Error("run_experiment: dev corpus is empty");
  if (test.users.empty()) throw Error("run_experiment: test corpus is empty");
  const FittedGrid fitted = fit_grid(train, grid, workers);

  const std::string train_media(to_string(train.media));
  const std::string dev_media(to_string(dev.media));
  const std::string test_media(to_string(test.media));

  std::vector<ExperimentResult> results(grid.size());
  run_parallel(grid.size(), workers, [&](std::size_t i) {
    results[i].config = grid[i];
    results[i].dev_report = eval_model(fitted.models[i], grid[i], dev, adjacency, "dev",
                                       train_media, dev_media, test_media);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].dev_report.accuracy > results[best].dev_report.accuracy) best = i;
  results[best].selected = true;
  results[best].test_report = eval_model(fitted.models[best], grid[best], test, adjacency, "test",
                                         train_media, dev_media, test_media);
  return results;
}

std::vector<CrossCell> cross_media_matrix(std::span<const MediaSplits> media,
                                          std::span<const ExperimentConfig> grid,
                                          const AdjacencyGraph& adjacency, int workers) {
  if (media.size() < 2) throw Error("cross_media_matrix: needs at least two media");
  {
    std::set<std::string> names;
    for (const auto& m : media)
      if (!names.insert(m.media_name).second)
        throw Error("cross_media_matrix: duplicate media name: " + m.media_name);
  }
  validate_grid(grid);

  std::vector<CrossCell> cells;

  for (const auto& source : media) {
    const FittedGrid fitted = fit_grid(source.train, grid, workers);
    for (const auto& selector : media) {
      if (selector.dev.users.empty())
        throw Error("cross_media_matrix: dev corpus is empty: " + selector.media_name);
      std::vector<double> dev_acc(grid.size());
      run_parallel(grid.size(), workers, [&](std::size_t i) {
        dev_acc[i] = eval_model(fitted.models[i], grid[i], selector.dev, adjacency, "dev",
                                source.media_name, selector.media_name, "")
                         .accuracy;
      });
      std::size_t best = 0;
      for (std::size_t i = 1; i < grid.size(); ++i)
        if (dev_acc[i] > dev_acc[best]) best = i;
      for (const auto& target : media) {
        if (target.test.users.empty())
          throw Error("cross_media_matrix: test corpus is empty: " + target.media_name);
        CrossCell cell;
        cell.train_media = source.media_name;
        cell.dev_media = selector.media_name;
        cell.test_media = target.media_name;
        cell.selected_config = grid[best].display_name();
        cell.report = eval_model(fitted.models[best], grid[best], target.test, adjacency, "test",
                                 source.media_name, selector.media_name, target.media_name);
        cells.push_back(std::move(cell));
      }
    }
  }

  // Pooled-training rows: all media concatenated, selection and scoring
  // inside each medium.
  Corpus pooled;
  pooled.media = Media::mixed;
  {
    std::string tag = "mixed:";
    std::unordered_set<std::string> ids;
    for (const auto& m : media) {
      tag += m.media_name + "+";
      for (const auto& user : m.train.users) {
        if (!ids.insert(user.user_id).second)
          throw Error("cross_media_matrix: duplicate user id across training media: " +
                      user.user_id);
        pooled.users.push_back(user);
      }
    }
    tag.pop_back();
    pooled.provenance = std::move(tag);
  }
  const FittedGrid pooled_fit = fit_grid(pooled, grid, workers);
  for (const auto& target : media) {
    std::vector<double> dev_acc(grid.size());
    run_parallel(grid.size(), workers, [&](std::size_t i) {
      dev_acc[i] = eval_model(pooled_fit.models[i], grid[i], target.dev, adjacency, "dev", "mixed",
                              target.media_name, "")
                       .accuracy;
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (dev_acc[i] > dev_acc[best]) best = i;
    CrossCell cell;
    cell.train_media = "mixed";
    cell.dev_media = target.media_name;
    cell.test_media = target.media_name;
    cell.mixed_training = true;
    cell.selected_config = grid[best].display_name();
    cell.report = eval_model(pooled_fit.models[best], grid[best], target.test, adjacency, "test",
                             "mixed", target.media_name, target.media_name);
    cells.push_back(std::move(cell));
  }
  return cells;
}

TimingReport benchmark(std::span<const ExperimentConfig> configs, const Corpus& train,
                       const Corpus& test, int repetitions) {
  validate_grid(configs);
  if (train.users.empty()) throw Error("benchmark: training corpus is empty");
  if (test.users.empty()) throw Error("benchmark: test corpus is empty");
  const int reps = std::max(repetitions, 3);

  TimingReport report;
  report.repetitions = reps;
  {
    std::string env = "compiler " __VERSION__ " single-thread";
    std::replace(env.begin(), env.end(), ',', ' ');
    report.environment = std::move(env);
  }

  const CountsTable counts = CountsTable::build(train);
  std::map<int, Vocabulary> vocabs;
  for (const auto& cfg : configs)
    if (!vocabs.count(cfg.min_users)) vocabs.emplace(cfg.min_users, prefilter(counts, cfg.min_users));

  const auto gold = gold_labels(test);
  using clock = std::chrono::steady_clock;
  for (const auto& cfg : configs) {
    const Vocabulary& vocab = vocabs.at(cfg.min_users);
    std::vector<double> train_ms, test_ms;
    double acc = 0;
    for (int r = 0; r < reps; ++r) {
      const auto t0 = clock::now();
      const FeatureSet features = features_direct(cfg, vocab, counts);
      const Model model = fit_model(cfg, train, features);
      const auto t1 = clock::now();
      const std::vector<Prediction> preds = predict_all(model, test);
      const auto t2 = clock::now();
      train_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      test_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
      if (r + 1 == reps) acc = accuracy(preds, gold);
    }
    TimingRow row;
    row.config_name = cfg.display_name();
    row.train_ms_median = median_of(train_ms);
    row.test_ms_median = median_of(test_ms);
    row.accuracy = acc;
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_eval_csv(std::span<const ExperimentResult> results, std::ostream& out) {
  out << "config,features,classifier,split,accuracy,near_miss,n_test,selected\n";
  const auto row = [&](const ExperimentResult& r, const EvalReport& rep, const char* split) {
    out << csv_field(r.config.display_name()) << ',' << csv_field(r.config.feature_label()) << ','
        << to_string(r.config.classifier) << ',' << split << ',' << format_double(rep.accuracy)
        << ',' << format_double(rep.near_miss) << ',' << rep.n_test << ',' << (r.selected ? 1 : 0)
        << '\n';
  };
  for (const auto& r : results) {
    row(r, r.dev_report, "dev");
    if (r.test_report) row(r, *r.test_report, "test");
  }
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
  out << "metric,value\n";
  out << "accuracy," << format_double(report.accuracy) << '\n';
  out << "near_miss," << format_double(report.near_miss) << '\n';
  out << "n_test," << report.n_test << '\n';
}

void write_per_state_csv(const EvalReport& report, std::ostream& out) {
  out << "state,value\n";
  for (const auto& [state, acc] : report.per_state_accuracy)
    out << state.code() << ',' << format_double(acc) << '\n';
}

void write_confusion_csv(const EvalReport& report, std::ostream& out) {
  out << "gold,predicted,count\n";
  for (const auto& [key, count] : report.confusion)
    out << key.first.code() << ',' << key.second.code() << ',' << count << '\n';
}

void write_slice_csv(const SliceReport& report, std::ostream& out) {
  out << "field,value,accuracy,support,low_support\n";
  for (const auto& row : report.rows)
    out << to_string(report.field) << ',' << csv_field(row.value) << ','
        << format_double(row.accuracy) << ',' << row.support << ',' << (row.low_support ? 1 : 0)
        << '\n';
}

void write_slice_map_csv(const SliceReport& report, std::ostream& out) {
  if (report.field != SliceField::state)
    throw Error("write_slice_map_csv: only state slices map to states");
  out << "state,value\n";
  for (const auto& row : report.rows) out << row.value << ',' << format_double(row.accuracy) << '\n';
}

void write_cross_csv(std::span<const CrossCell> cells, std::ostream& out) {
  out << "train_media,dev_media,test_media,mixed,config,accuracy,near_miss,n_test\n";
  for (const auto& cell : cells) {
    out << csv_field(cell.train_media) << ',' << csv_field(cell.dev_media) << ','
        << csv_field(cell.test_media) << ',' << (cell.mixed_training ? 1 : 0) << ','
        << csv_field(cell.selected_config) << ',' << format_double(cell.report.accuracy) << ','
        << format_double(cell.report.near_miss) << ',' << cell.report.n_test << '\n';
  }
}

void write_timing_csv(const TimingReport& report, std::ostream& out) {
  out << "config,train_ms_median,test_ms_median,accuracy,repetitions,environment\n";
  for (const auto& row : report.rows) {
    out << csv_field(row.config_name) << ',' << format_double(row.train_ms_median) << ','
        << format_double(row.test_ms_median) << ',' << format_double(row.accuracy) << ','
        << report.repetitions << ',' << csv_field(report.environment) << '\n';
  }
}

void write_stats_csv(const CorpusStats& stats, std::ostream& out) {
  out << "measure,max,mean,stddev,median\n";
  const auto row = [&](const char* name, const Summary& s) {
    out << name << ',' << format_double(s.max) << ',' << format_double(s.mean) << ','
        << format_double(s.stddev) << ',' << format_double(s.median) << '\n';
  };
  row("docs_per_user", stats.docs_per_user);
  row("chars_per_doc", stats.chars_per_doc);
  row("chars_per_user", stats.chars_per_user);
}

void write_map_csv(const std::map<StateLabel, double>& values, std::ostream& out) {
  out << "state,value\n";
  for (const auto& [state, value] : values) out << state.code() << ',' << format_double(value) << '\n';
}

}  // namespace geostate
