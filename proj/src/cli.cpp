#include "geostate/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geostate/adjacency.hpp"
#include "geostate/corpus.hpp"
#include "geostate/counts.hpp"
#include "geostate/error.hpp"
#include "geostate/evaluate.hpp"
#include "geostate/io.hpp"
#include "geostate/lexicon.hpp"
#include "geostate/model.hpp"
#include "geostate/weighting.hpp"

namespace fs = std::filesystem;

namespace geostate {
namespace {

// ---------------------------------------------------------------- utilities

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t hash = 0xcbf29ce484222325ull) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string hex64(std::uint64_t v) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::string digest_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read input: " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    hash = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), hash);
  return "fnv1a:" + hex64(hash);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool parse_value(const std::string& text, std::string& out) {
  out = text;
  return true;
}

template <class T>
  requires std::is_integral_v<T>
bool parse_value(const std::string& text, T& out) {
  const std::string t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc{} && ptr == t.data() + t.size();
}

bool parse_value(const std::string& text, double& out) {
  const std::string t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc{} && ptr == t.data() + t.size();
}

bool parse_value(const std::string& text, bool& out) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") {
    out = true;
    return true;
  }
  if (t == "0" || t == "false" || t == "no" || t == "off") {
    out = false;
    return true;
  }
  return false;
}

std::string stringify(const std::string& v) { return v; }
std::string stringify(double v) { return format_double(v); }
std::string stringify(bool v) { return v ? "1" : "0"; }
template <class T>
  requires std::is_integral_v<T>
std::string stringify(T v) {
  return std::to_string(v);
}
std::string stringify(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += v[i];
  }
  return out;
}

// ---------------------------------------------------------------- config file

const std::set<std::string>& known_config_sections() {
  static const std::set<std::string> sections = {
      "ingest", "stats", "split",  "vocab", "weigh",      "lexicon", "train",
      "eval",   "cross", "slices", "bench", "export-map", "synth"};
  return sections;
}

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      // global
      "output_dir", "workers",
      // corpora and artifacts
      "input", "corpus", "train", "dev", "test", "model", "media", "out", "prefix",
      // ingest / split
      "min_chars", "seed", "train_frac", "dev_frac", "test_frac", "stratify",
      // features and classifiers
      "method", "fraction", "fractions", "min_users", "classifier", "alpha", "l2", "epochs",
      "lr", "lr_decay", "tol", "p", "h", "t",
      // evaluation
      "adjacency", "corner_borders", "cross_media", "field", "min_support", "reps", "word",
      // synth
      "states", "state_codes", "users_per_state", "tokens_per_user", "background_vocab",
      "background_prefix", "planted", "noise_vocab", "noise_words_per_user", "noise_token_rate",
      "noise_prefix", "demographics", "id_prefix", "provenance"};
  return keys;
}

struct ConfigFile {
  std::map<std::string, std::string> values;  // "key" or "section.key"

  static ConfigFile load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config file: " + path.string());
    ConfigFile cfg;
    std::string line, section;
    std::vector<std::string> problems;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']') {
          problems.push_back("line " + std::to_string(lineno) + ": unterminated section header");
          continue;
        }
        section = trim(t.substr(1, t.size() - 2));
        if (!known_config_sections().count(section))
          problems.push_back("line " + std::to_string(lineno) + ": unknown section [" + section +
                             "]");
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        problems.push_back("line " + std::to_string(lineno) + ": expected key=value");
        continue;
      }
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) {
        problems.push_back("line " + std::to_string(lineno) + ": empty key");
        continue;
      }
      if (!known_config_keys().count(key))
        problems.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      const std::string full = section.empty() ? key : section + "." + key;
      if (!cfg.values.emplace(full, value).second)
        problems.push_back("line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
    }
    if (!problems.empty()) {
      std::string joined = "invalid config file " + path.string() + ": " + problems[0];
      for (std::size_t i = 1; i < problems.size(); ++i) joined += "; " + problems[i];
      throw Error(joined);
    }
    return cfg;
  }

  std::optional<std::string> lookup(const std::string& section, const std::string& key) const {
    auto it = values.find(section + "." + key);
    if (it != values.end()) return it->second;
    it = values.find(key);
    if (it != values.end()) return it->second;
    return std::nullopt;
  }
};

// ------------------------------------------------------------- resolution

// One option's value comes from, in order: command-line flag, environment
// (two whitelisted variables), config file, built-in default. Every
// resolved value is recorded for the run's config hash.
struct Resolver {
  const ConfigFile* cfg = nullptr;
  std::string section;
  std::map<std::string, std::string>* effective = nullptr;
  std::vector<std::string>* problems = nullptr;

  template <class T>
  void resolve(const CLI::Option* opt, T& var, const std::string& key,
               const char* env_name = nullptr) {
    if (!opt || opt->count() == 0) {
      bool set = false;
      if (env_name) {
        if (const char* env = std::getenv(env_name)) {
          if (!parse_value(env, var))
            problems->push_back(std::string(env_name) + ": cannot parse '" + env + "'");
          set = true;
        }
      }
      if (!set && cfg) {
        if (const auto value = cfg->lookup(section, key)) {
          if (!parse_value(*value, var))
            problems->push_back(key + ": cannot parse config value '" + *value + "'");
        }
      }
    }
    (*effective)[section + "." + key] = stringify(var);
  }

  void resolve_list(const CLI::Option* opt, std::vector<std::string>& var, const std::string& key) {
    if ((!opt || opt->count() == 0) && cfg) {
      if (const auto value = cfg->lookup(section, key)) {
        var.clear();
        for (auto& part : split_on(*value, ';'))
          if (!trim(part).empty()) var.push_back(trim(part));
      }
    }
    (*effective)[section + "." + key] = stringify(var);
  }
};

// ------------------------------------------------------------- run context

struct Ctx {
  std::string command;
  std::vector<std::string> argv;
  fs::path output_dir;
  int workers = 1;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> effective;  // resolved key=value pairs
  std::map<std::string, std::string> inputs;     // path -> digest
  std::vector<std::string> artifacts;
  std::vector<std::string> problems;

  void note_input(const fs::path& path) { inputs[path.string()] = digest_file(path); }

  fs::path artifact(const std::string& name) {
    fs::create_directories(output_dir);
    artifacts.push_back(name);
    return output_dir / name;
  }

  void fail_if_invalid() const {
    if (problems.empty()) return;
    std::string joined = "invalid options: " + problems[0];
    for (std::size_t i = 1; i < problems.size(); ++i) joined += "; " + problems[i];
    throw Error(joined);
  }

  std::string config_hash() const {
    std::string canon = "command=" + command + "\n";
    for (const auto& [key, value] : effective) canon += key + "=" + value + "\n";
    return "fnv1a:" + hex64(fnv1a64(canon.data(), canon.size()));
  }

  // The only artifact carrying a timestamp.
  void write_manifest() {
    nlohmann::json doc;
    doc["command"] = command;
    doc["argv"] = argv;
    doc["config_hash"] = config_hash();
    doc["seed"] = seed;
    doc["inputs"] = inputs;
    doc["artifacts"] = artifacts;
    doc["generated_at"] = utc_timestamp();
    fs::create_directories(output_dir);
    std::ofstream out(output_dir / "manifest.json", std::ios::binary);
    if (!out) throw Error("cannot write manifest: " + (output_dir / "manifest.json").string());
    out << doc.dump(2) << '\n';
  }
};

std::ofstream open_artifact(Ctx& ctx, const std::string& name) {
  const fs::path path = ctx.artifact(name);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write artifact: " + path.string());
  return out;
}

Corpus load_required_corpus(Ctx& ctx, const std::string& path, const std::string& key) {
  if (path.empty()) throw Error("invalid options: " + key + ": required");
  ctx.note_input(path);
  return load_tokenized_corpus(path);
}

// ------------------------------------------------------------- shared flags

struct GridFlags {
  std::string method = "wlh";
  double fraction = 1.0;
  std::string fractions;  // comma-separated sweep for igr / wlh
  std::string classifier = "nb";
  double alpha = 1.0;
  double l2 = 1e-4;
  int epochs = 200;
  double lr = 1.0;
  double lr_decay = 0.0;
  double tol = 1e-8;
  std::uint64_t p = 1;
  double h = 1.0;
  std::uint64_t t = 1;
  int min_users = 3;

  struct Opts {
    CLI::Option *method = nullptr, *fraction = nullptr, *fractions = nullptr,
                *classifier = nullptr, *alpha = nullptr, *l2 = nullptr, *epochs = nullptr,
                *lr = nullptr, *lr_decay = nullptr, *tol = nullptr, *p = nullptr, *h = nullptr,
                *t = nullptr, *min_users = nullptr;
  };

  Opts add(CLI::App* sub, bool with_sweep) {
    Opts o;
    o.method = sub->add_option("--method", method,
                               "feature selection: all_words | igr | wlh | lexicons");
    o.fraction = sub->add_option("--fraction", fraction, "kept fraction of the ranked vocabulary");
    if (with_sweep)
      o.fractions =
          sub->add_option("--fractions", fractions, "comma-separated fraction sweep (igr/wlh)");
    o.classifier = sub->add_option("--classifier", classifier, "nb | linear");
    o.alpha = sub->add_option("--alpha", alpha, "additive smoothing");
    o.l2 = sub->add_option("--l2", l2, "L2 penalty (linear)");
    o.epochs = sub->add_option("--epochs", epochs, "max epochs (linear)");
    o.lr = sub->add_option("--lr", lr, "base learning rate (linear)");
    o.lr_decay = sub->add_option("--lr-decay", lr_decay, "learning-rate decay (linear)");
    o.tol = sub->add_option("--tol", tol, "convergence tolerance (linear)");
    o.p = sub->add_option("--p", p, "lexicon user floor");
    o.h = sub->add_option("--h", h, "lexicon score threshold");
    o.t = sub->add_option("--t", t, "lexicon size floor");
    o.min_users = sub->add_option("--min-users", min_users, "vocabulary user floor");
    return o;
  }

  void resolve(Resolver& r, const Opts& o) {
    r.resolve(o.method, method, "method");
    r.resolve(o.fraction, fraction, "fraction");
    if (o.fractions) r.resolve(o.fractions, fractions, "fractions");
    r.resolve(o.classifier, classifier, "classifier");
    r.resolve(o.alpha, alpha, "alpha");
    r.resolve(o.l2, l2, "l2");
    r.resolve(o.epochs, epochs, "epochs");
    r.resolve(o.lr, lr, "lr");
    r.resolve(o.lr_decay, lr_decay, "lr_decay");
    r.resolve(o.tol, tol, "tol");
    r.resolve(o.p, p, "p");
    r.resolve(o.h, h, "h");
    r.resolve(o.t, t, "t");
    r.resolve(o.min_users, min_users, "min_users");
  }

  std::vector<ExperimentConfig> build(std::vector<std::string>& problems,
                                      std::uint64_t seed) const {
    ExperimentConfig base;
    if (method == "all_words") base.method = FeatureMethod::all_words;
    else if (method == "igr") base.method = FeatureMethod::igr;
    else if (method == "wlh") base.method = FeatureMethod::wlh;
    else if (method == "lexicons") base.method = FeatureMethod::lexicons;
    else problems.push_back("method: unknown value '" + method + "'");

    if (classifier == "nb") base.classifier = ClassifierKind::nb;
    else if (classifier == "linear") base.classifier = ClassifierKind::linear;
    else problems.push_back("classifier: unknown value '" + classifier + "'");

    base.fraction = fraction;
    base.alpha = alpha;
    base.hyper = LinearHyper{l2, epochs, lr, lr_decay, tol, seed};
    base.min_users = min_users;
    if (p > std::numeric_limits<std::uint32_t>::max()) problems.push_back("p: out of range");
    if (t > std::numeric_limits<std::uint32_t>::max()) problems.push_back("t: out of range");
    base.lexicon_params = LexiconParams{static_cast<std::uint32_t>(p), h,
                                        static_cast<std::uint32_t>(t)};

    std::vector<ExperimentConfig> grid;
    if (!fractions.empty()) {
      if (base.method != FeatureMethod::igr && base.method != FeatureMethod::wlh) {
        problems.push_back("fractions: only applies to igr and wlh");
        return grid;
      }
      for (const auto& part : split_on(fractions, ',')) {
        double f = 0;
        if (!parse_value(part, f)) {
          problems.push_back("fractions: cannot parse '" + part + "'");
          continue;
        }
        ExperimentConfig cfg = base;
        cfg.fraction = f;
        grid.push_back(std::move(cfg));
      }
      if (grid.empty()) problems.push_back("fractions: empty sweep");
    } else {
      grid.push_back(base);
    }
    return grid;
  }
};

AdjacencyGraph resolve_adjacency(Ctx& ctx, const std::string& path, bool corner_borders) {
  if (!path.empty()) {
    ctx.note_input(path);
    return AdjacencyGraph::from_file(path);
  }
  return AdjacencyGraph::us_land_borders(corner_borders);
}

void write_selected_reports(Ctx& ctx, const EvalReport& report) {
  {
    auto out = open_artifact(ctx, "report.csv");
    write_report_csv(report, out);
  }
  {
    auto out = open_artifact(ctx, "per_state.csv");
    write_per_state_csv(report, out);
  }
  {
    auto out = open_artifact(ctx, "confusion.csv");
    write_confusion_csv(report, out);
  }
}

std::string classifier_name(const Model& model) {
  return std::holds_alternative<NBModel>(model) ? "nb" : "linear";
}

// Media agreement guard for model-vs-corpus commands.
void check_media(const Model& model, const Corpus& test, bool cross_media_ok) {
  const std::string trained = model_provenance(model).source_media;
  const std::string testing(to_string(test.media));
  if (trained == testing || cross_media_ok) return;
  throw Error("model was trained on '" + trained + "' but the test corpus is '" + testing +
              "'; pass --cross-media to evaluate across media");
}

// ------------------------------------------------------------- subcommands

struct IngestCmd {
  std::string input, media, out = "corpus.jsonl";
  std::uint64_t min_chars = 600;
  CLI::Option *o_input, *o_media, *o_min_chars, *o_out;

  void add(CLI::App* sub) {
    o_input = sub->add_option("--input", input, "raw JSONL corpus");
    o_media = sub->add_option("--media", media, "blog | tweet | other | mixed");
    o_min_chars = sub->add_option("--min-chars", min_chars, "minimum characters per user");
    o_out = sub->add_option("--out", out, "artifact name");
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_input, input, "input");
    r.resolve(o_media, media, "media");
    r.resolve(o_min_chars, min_chars, "min_chars");
    r.resolve(o_out, out, "out");
    if (input.empty()) ctx.problems.push_back("input: required");
    if (media.empty()) ctx.problems.push_back("media: required");
    std::optional<Media> m;
    if (!media.empty()) {
      m = parse_media(media);
      if (!m) ctx.problems.push_back("media: unknown value '" + media + "'");
    }
    if (out.empty()) ctx.problems.push_back("out: must not be empty");
    ctx.fail_if_invalid();

    ctx.note_input(input);
    const LoadResult result = load_corpus(input, *m, min_chars);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    save_corpus(result.corpus, ctx.artifact(out));
    std::cout << "ingested " << result.corpus.users.size() << " users from " << result.lines_read
              << " lines (rejected_short=" << result.rejected_short
              << ", rejected_no_documents=" << result.rejected_no_documents << ")\n";
  }
};

struct StatsCmd {
  std::string corpus;
  CLI::Option* o_corpus;

  void add(CLI::App* sub) { o_corpus = sub->add_option("--corpus", corpus, "tokenized corpus"); }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_corpus, corpus, "corpus");
    if (corpus.empty()) ctx.problems.push_back("corpus: required");
    ctx.fail_if_invalid();

    const Corpus c = load_required_corpus(ctx, corpus, "corpus");
    const CorpusStats stats = compute_stats(c);
    {
      auto out = open_artifact(ctx, "stats.csv");
      write_stats_csv(stats, out);
    }
    write_stats_csv(stats, std::cout);
  }
};

struct SplitCmd {
  std::string corpus, prefix;
  std::uint64_t seed = 0;
  double train_frac = 0.8, dev_frac = 0.1, test_frac = 0.1;
  bool no_stratify = false;
  CLI::Option *o_corpus, *o_seed, *o_train, *o_dev, *o_test, *o_no_strat, *o_prefix;

  void add(CLI::App* sub) {
    o_corpus = sub->add_option("--corpus", corpus, "tokenized corpus");
    o_seed = sub->add_option("--seed", seed, "shuffle seed");
    o_train = sub->add_option("--train-frac", train_frac, "train fraction");
    o_dev = sub->add_option("--dev-frac", dev_frac, "dev fraction");
    o_test = sub->add_option("--test-frac", test_frac, "test fraction");
    o_no_strat = sub->add_flag("--no-stratify", no_stratify, "split without per-state strata");
    o_prefix = sub->add_option("--prefix", prefix, "artifact name prefix");
  }

  void run(Ctx& ctx, Resolver& r) {
    bool stratify = !no_stratify;
    r.resolve(o_corpus, corpus, "corpus");
    r.resolve(o_seed, seed, "seed");
    r.resolve(o_train, train_frac, "train_frac");
    r.resolve(o_dev, dev_frac, "dev_frac");
    r.resolve(o_test, test_frac, "test_frac");
    if (o_no_strat->count() > 0) stratify = !no_stratify;
    else r.resolve(nullptr, stratify, "stratify");
    ctx.effective[r.section + ".stratify"] = stringify(stratify);
    r.resolve(o_prefix, prefix, "prefix");
    if (corpus.empty()) ctx.problems.push_back("corpus: required");
    if (!(train_frac > 0)) ctx.problems.push_back("train_frac: must be > 0");
    if (!(dev_frac > 0)) ctx.problems.push_back("dev_frac: must be > 0");
    if (!(test_frac > 0)) ctx.problems.push_back("test_frac: must be > 0");
    ctx.fail_if_invalid();
    ctx.seed = seed;

    const Corpus c = load_required_corpus(ctx, corpus, "corpus");
    SplitSpec spec;
    spec.seed = seed;
    spec.train_frac = train_frac;
    spec.dev_frac = dev_frac;
    spec.test_frac = test_frac;
    spec.stratify_by_state = stratify;
    const SplitResult result = split(c, spec);
    save_corpus(result.train, ctx.artifact(prefix + "train.jsonl"));
    save_corpus(result.dev, ctx.artifact(prefix + "dev.jsonl"));
    save_corpus(result.test, ctx.artifact(prefix + "test.jsonl"));
    std::cout << "split: train=" << result.train.users.size() << " dev=" << result.dev.users.size()
              << " test=" << result.test.users.size() << '\n';
  }
};

struct VocabCmd {
  std::string corpus;
  int min_users = 3;
  CLI::Option *o_corpus, *o_min_users;

  void add(CLI::App* sub) {
    o_corpus = sub->add_option("--corpus", corpus, "tokenized corpus");
    o_min_users = sub->add_option("--min-users", min_users, "vocabulary user floor");
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_corpus, corpus, "corpus");
    r.resolve(o_min_users, min_users, "min_users");
    if (corpus.empty()) ctx.problems.push_back("corpus: required");
    if (min_users < 1) ctx.problems.push_back("min_users: must be >= 1");
    ctx.fail_if_invalid();

    const Corpus c = load_required_corpus(ctx, corpus, "corpus");
    const CountsTable counts = CountsTable::build(c);
    const Vocabulary vocab = prefilter(counts, min_users);
    {
      auto out = open_artifact(ctx, "counts.tsv");
      counts.dump_tsv(out);
    }
    {
      auto out = open_artifact(ctx, "vocab.txt");
      for (const auto& word : vocab.words()) out << word << '\n';
    }
    std::cout << "vocabulary: " << vocab.size() << " words kept (min_users=" << min_users
              << ", dropped=" << vocab.dropped() << ")\n";
  }
};

struct WeighCmd {
  std::string corpus, method = "wlh";
  double fraction = 1.0;
  int min_users = 3;
  CLI::Option *o_corpus, *o_method, *o_fraction, *o_min_users;

  void add(CLI::App* sub) {
    o_corpus = sub->add_option("--corpus", corpus, "tokenized corpus");
    o_method = sub->add_option("--method", method, "igr | wlh");
    o_fraction = sub->add_option("--fraction", fraction, "kept fraction");
    o_min_users = sub->add_option("--min-users", min_users, "vocabulary user floor");
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_corpus, corpus, "corpus");
    r.resolve(o_method, method, "method");
    r.resolve(o_fraction, fraction, "fraction");
    r.resolve(o_min_users, min_users, "min_users");
    if (corpus.empty()) ctx.problems.push_back("corpus: required");
    if (method != "igr" && method != "wlh")
      ctx.problems.push_back("method: unknown value '" + method + "'");
    if (!(fraction > 0.0) || fraction > 1.0)
      ctx.problems.push_back("fraction: must be in (0,1]");
    if (min_users < 1) ctx.problems.push_back("min_users: must be >= 1");
    ctx.fail_if_invalid();

    const Corpus c = load_required_corpus(ctx, corpus, "corpus");
    const CountsTable counts = CountsTable::build(c);
    const Vocabulary vocab = prefilter(counts, min_users);
    const WeightMethod wm = method == "igr" ? WeightMethod::igr : WeightMethod::wlh;
    const FeatureSet features = rank_and_select(vocab, counts, wm, fraction);
    {
      auto out = open_artifact(ctx, "features.tsv");
      save_feature_set(features, out);
    }
    std::cout << "features: " << features.words.size() << " selected from " << vocab.size()
              << " words (" << method << ", fraction=" << format_double(fraction) << ")\n";
  }
};

struct LexiconCmd {
  std::string corpus;
  std::uint64_t p = 1, t = 1;
  double h = 1.0;
  int min_users = 3;
  CLI::Option *o_corpus, *o_p, *o_h, *o_t, *o_min_users;

  void add(CLI::App* sub) {
    o_corpus = sub->add_option("--corpus", corpus, "tokenized corpus");
    o_p = sub->add_option("--p", p, "user floor");
    o_h = sub->add_option("--h", h, "score threshold");
    o_t = sub->add_option("--t", t, "size floor");
    o_min_users = sub->add_option("--min-users", min_users, "vocabulary user floor");
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_corpus, corpus, "corpus");
    r.resolve(o_p, p, "p");
    r.resolve(o_h, h, "h");
    r.resolve(o_t, t, "t");
    r.resolve(o_min_users, min_users, "min_users");
    if (corpus.empty()) ctx.problems.push_back("corpus: required");
    if (p < 1 || p > std::numeric_limits<std::uint32_t>::max())
      ctx.problems.push_back("p: must be >= 1");
    if (!(h > 0.0)) ctx.problems.push_back("h: must be > 0");
    if (t < 1 || t > std::numeric_limits<std::uint32_t>::max())
      ctx.problems.push_back("t: must be >= 1");
    if (min_users < 1) ctx.problems.push_back("min_users: must be >= 1");
    ctx.fail_if_invalid();

    const Corpus c = load_required_corpus(ctx, corpus, "corpus");
    const CountsTable counts = CountsTable::build(c);
    const Vocabulary vocab = prefilter(counts, min_users);
    const LexiconParams params{static_cast<std::uint32_t>(p), h, static_cast<std::uint32_t>(t)};
    const LexiconSet lexicons = build_lexicons(vocab, counts, params);
    std::size_t relaxed = 0, deficient = 0, words = 0;
    for (const auto& lex : lexicons.states) {
      relaxed += lex.relaxed ? 1 : 0;
      deficient += lex.deficient ? 1 : 0;
      words += lex.entries.size();
    }
    {
      auto out = open_artifact(ctx, "lexicons.tsv");
      save_lexicons(lexicons, out);
    }
    std::cout << "lexicons: " << lexicons.states.size() << " states, relaxed=" << relaxed
              << ", deficient=" << deficient << ", words=" << words << '\n';
  }
};

struct TrainCmd {
  std::string train;
  std::uint64_t seed = 0;
  GridFlags grid;
  GridFlags::Opts grid_opts;
  CLI::Option *o_train, *o_seed;

  void add(CLI::App* sub) {
    o_train = sub->add_option("--train", train, "training corpus");
    o_seed = sub->add_option("--seed", seed, "classifier seed");
    grid_opts = grid.add(sub, /*with_sweep=*/false);
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_train, train, "train");
    r.resolve(o_seed, seed, "seed");
    grid.resolve(r, grid_opts);
    if (train.empty()) ctx.problems.push_back("train: required");
    const auto configs = grid.build(ctx.problems, seed);
    ctx.fail_if_invalid();
    ctx.seed = seed;

    const Corpus c = load_required_corpus(ctx, train, "train");
    const Model model = fit_config(configs.front(), c);
    save_model(model, ctx.artifact("model.json"));
    const auto& prov = model_provenance(model);
    std::string converged = "n/a";
    if (const auto* linear = std::get_if<LinearModel>(&model))
      converged = linear->converged ? "yes" : "no";
    std::cout << "model: " << classifier_name(model) << ", features=" << prov.origin << "@"
              << format_double(prov.fraction) << ", states=" << model_states(model).size()
              << ", converged=" << converged << '\n';
  }
};

struct EvalCmd {
  std::string model, test, train, dev, adjacency;
  bool cross_media = false, corner_borders = false;
  std::uint64_t seed = 0;
  GridFlags grid;
  GridFlags::Opts grid_opts;
  CLI::Option *o_model, *o_test, *o_train, *o_dev, *o_adjacency, *o_cross, *o_corners, *o_seed;

  void add(CLI::App* sub) {
    o_model = sub->add_option("--model", model, "trained model (model mode)");
    o_test = sub->add_option("--test", test, "test corpus");
    o_train = sub->add_option("--train", train, "training corpus (grid mode)");
    o_dev = sub->add_option("--dev", dev, "dev corpus (grid mode)");
    o_adjacency = sub->add_option("--adjacency", adjacency, "adjacency file");
    o_cross = sub->add_flag("--cross-media", cross_media, "allow media mismatch");
    o_corners = sub->add_flag("--corner-borders", corner_borders,
                              "count corner-touching states as neighbours");
    o_seed = sub->add_option("--seed", seed, "classifier seed");
    grid_opts = grid.add(sub, /*with_sweep=*/true);
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_model, model, "model");
    r.resolve(o_test, test, "test");
    r.resolve(o_train, train, "train");
    r.resolve(o_dev, dev, "dev");
    r.resolve(o_adjacency, adjacency, "adjacency");
    r.resolve(o_cross, cross_media, "cross_media");
    r.resolve(o_corners, corner_borders, "corner_borders");
    r.resolve(o_seed, seed, "seed");
    grid.resolve(r, grid_opts);

    const bool model_mode = !model.empty();
    const bool grid_mode = !train.empty();
    if (model_mode == grid_mode)
      ctx.problems.push_back("either --model or --train is required (not both)");
    if (test.empty()) ctx.problems.push_back("test: required");
    if (grid_mode && dev.empty()) ctx.problems.push_back("dev: required in grid mode");
    if (model_mode && !dev.empty()) ctx.problems.push_back("dev: only applies to grid mode");
    std::vector<ExperimentConfig> configs;
    if (grid_mode || !model_mode) configs = grid.build(ctx.problems, seed);
    ctx.fail_if_invalid();
    ctx.seed = seed;

    const AdjacencyGraph adj = resolve_adjacency(ctx, adjacency, corner_borders);
    const Corpus test_corpus = load_required_corpus(ctx, test, "test");

    if (model_mode) {
      ctx.note_input(model);
      const Model m = load_model(model);
      check_media(m, test_corpus, cross_media);
      const auto& prov = model_provenance(m);
      RunProvenance run_prov;
      run_prov.config_name = fs::path(model).filename().string();
      run_prov.features = prov.origin + "@" + format_double(prov.fraction);
      run_prov.classifier = classifier_name(m);
      run_prov.split = "test";
      run_prov.train_media = prov.source_media;
      run_prov.test_media = std::string(to_string(test_corpus.media));
      const EvalReport report =
          evaluate_predictions(predict_all(m, test_corpus), test_corpus, adj, run_prov);
      write_selected_reports(ctx, report);
      std::cout << "accuracy=" << format_double(report.accuracy)
                << " near_miss=" << format_double(report.near_miss) << " n=" << report.n_test
                << '\n';
      return;
    }

    const Corpus train_corpus = load_required_corpus(ctx, train, "train");
    const Corpus dev_corpus = load_required_corpus(ctx, dev, "dev");
    const auto results =
        run_experiment(train_corpus, dev_corpus, test_corpus, configs, adj, ctx.workers);
    {
      auto out = open_artifact(ctx, "eval_sweep.csv");
      write_eval_csv(results, out);
    }
    for (const auto& result : results) {
      if (!result.selected) continue;
      write_selected_reports(ctx, *result.test_report);
      std::cout << "selected " << result.config.display_name()
                << ": dev_accuracy=" << format_double(result.dev_report.accuracy)
                << ", test_accuracy=" << format_double(result.test_report->accuracy)
                << ", near_miss=" << format_double(result.test_report->near_miss) << '\n';
    }
  }
};

struct CrossCmd {
  std::vector<std::string> media;
  std::string adjacency;
  bool corner_borders = false;
  std::uint64_t seed = 0;
  GridFlags grid;
  GridFlags::Opts grid_opts;
  CLI::Option *o_media, *o_adjacency, *o_corners, *o_seed;

  void add(CLI::App* sub) {
    o_media = sub->add_option("--media", media,
                              "media split as name:train:dev:test (repeat per medium)");
    o_adjacency = sub->add_option("--adjacency", adjacency, "adjacency file");
    o_corners = sub->add_flag("--corner-borders", corner_borders,
                              "count corner-touching states as neighbours");
    o_seed = sub->add_option("--seed", seed, "classifier seed");
    grid_opts = grid.add(sub, /*with_sweep=*/true);
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve_list(o_media, media, "media");
    r.resolve(o_adjacency, adjacency, "adjacency");
    r.resolve(o_corners, corner_borders, "corner_borders");
    r.resolve(o_seed, seed, "seed");
    grid.resolve(r, grid_opts);

    std::vector<MediaSplits> splits;
    if (media.size() < 2) ctx.problems.push_back("media: needs at least two media");
    std::vector<std::array<std::string, 4>> specs;
    for (const auto& spec : media) {
      const auto parts = split_on(spec, ':');
      if (parts.size() != 4 ||
          std::any_of(parts.begin(), parts.end(), [](const std::string& s) { return s.empty(); })) {
        ctx.problems.push_back("media: expected name:train:dev:test, got '" + spec + "'");
        continue;
      }
      specs.push_back({parts[0], parts[1], parts[2], parts[3]});
    }
    const auto configs = grid.build(ctx.problems, seed);
    ctx.fail_if_invalid();
    ctx.seed = seed;

    for (const auto& spec : specs) {
      MediaSplits ms;
      ms.media_name = spec[0];
      ms.train = load_required_corpus(ctx, spec[1], "media train");
      ms.dev = load_required_corpus(ctx, spec[2], "media dev");
      ms.test = load_required_corpus(ctx, spec[3], "media test");
      splits.push_back(std::move(ms));
    }
    const AdjacencyGraph adj = resolve_adjacency(ctx, adjacency, corner_borders);
    const auto cells = cross_media_matrix(splits, configs, adj, ctx.workers);
    {
      auto out = open_artifact(ctx, "cross_matrix.csv");
      write_cross_csv(cells, out);
    }
    std::cout << "cross-media cells: " << cells.size() << '\n';
  }
};

struct SlicesCmd {
  std::string model, test, field = "state";
  std::uint64_t min_support = 5;
  bool cross_media = false;
  CLI::Option *o_model, *o_test, *o_field, *o_min_support, *o_cross;

  void add(CLI::App* sub) {
    o_model = sub->add_option("--model", model, "trained model");
    o_test = sub->add_option("--test", test, "test corpus");
    o_field = sub->add_option("--field", field, "state | gender | industry");
    o_min_support = sub->add_option("--min-support", min_support, "low-support flag threshold");
    o_cross = sub->add_flag("--cross-media", cross_media, "allow media mismatch");
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_model, model, "model");
    r.resolve(o_test, test, "test");
    r.resolve(o_field, field, "field");
    r.resolve(o_min_support, min_support, "min_support");
    r.resolve(o_cross, cross_media, "cross_media");
    if (model.empty()) ctx.problems.push_back("model: required");
    if (test.empty()) ctx.problems.push_back("test: required");
    std::optional<SliceField> sf;
    if (field == "state") sf = SliceField::state;
    else if (field == "gender") sf = SliceField::gender;
    else if (field == "industry") sf = SliceField::industry;
    else ctx.problems.push_back("field: unknown value '" + field + "'");
    ctx.fail_if_invalid();

    const Corpus test_corpus = load_required_corpus(ctx, test, "test");
    ctx.note_input(model);
    const Model m = load_model(model);
    check_media(m, test_corpus, cross_media);
    const SliceReport report =
        slice_accuracy(predict_all(m, test_corpus), test_corpus, *sf, min_support);
    {
      auto out = open_artifact(ctx, "slices.csv");
      write_slice_csv(report, out);
    }
    if (*sf == SliceField::state) {
      auto out = open_artifact(ctx, "slices_map.csv");
      write_slice_map_csv(report, out);
    }
    std::cout << "slices: " << report.rows.size() << " rows (field=" << field << ")\n";
  }
};

struct BenchCmd {
  std::string train, test;
  int reps = 5;
  std::uint64_t seed = 0;
  GridFlags grid;
  GridFlags::Opts grid_opts;
  CLI::Option *o_train, *o_test, *o_reps, *o_seed;

  void add(CLI::App* sub) {
    o_train = sub->add_option("--train", train, "training corpus");
    o_test = sub->add_option("--test", test, "test corpus");
    o_reps = sub->add_option("--reps", reps, "timing repetitions (>= 3)");
    o_seed = sub->add_option("--seed", seed, "classifier seed");
    grid_opts = grid.add(sub, /*with_sweep=*/true);
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_train, train, "train");
    r.resolve(o_test, test, "test");
    r.resolve(o_reps, reps, "reps");
    r.resolve(o_seed, seed, "seed");
    grid.resolve(r, grid_opts);
    if (train.empty()) ctx.problems.push_back("train: required");
    if (test.empty()) ctx.problems.push_back("test: required");
    if (reps < 1) ctx.problems.push_back("reps: must be >= 1");
    const auto configs = grid.build(ctx.problems, seed);
    ctx.fail_if_invalid();
    ctx.seed = seed;

    const Corpus train_corpus = load_required_corpus(ctx, train, "train");
    const Corpus test_corpus = load_required_corpus(ctx, test, "test");
    const TimingReport report = benchmark(configs, train_corpus, test_corpus, reps);
    {
      auto out = open_artifact(ctx, "timing.csv");
      write_timing_csv(report, out);
    }
    std::cout << "benchmark: " << report.rows.size() << " configs, reps=" << report.repetitions
              << '\n';
  }
};

struct ExportMapCmd {
  std::string input, corpus, word;
  CLI::Option *o_input, *o_corpus, *o_word;

  void add(CLI::App* sub) {
    o_input = sub->add_option("--input", input, "state,value rows (may be partial)");
    o_corpus = sub->add_option("--corpus", corpus, "tokenized corpus (word mode)");
    o_word = sub->add_option("--word", word, "map a word's relative frequency per state");
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_input, input, "input");
    r.resolve(o_corpus, corpus, "corpus");
    r.resolve(o_word, word, "word");
    const bool word_mode = !word.empty() || !corpus.empty();
    if (word_mode) {
      if (!input.empty()) ctx.problems.push_back("input: conflicts with --word/--corpus");
      if (word.empty()) ctx.problems.push_back("word: required with --corpus");
      if (corpus.empty()) ctx.problems.push_back("corpus: required with --word");
    } else if (input.empty()) {
      ctx.problems.push_back("either --input or --corpus with --word is required");
    }
    ctx.fail_if_invalid();

    if (word_mode) {
      const Corpus c = load_required_corpus(ctx, corpus, "corpus");
      const CountsTable counts = CountsTable::build(c);
      const auto fractions = relative_state_frequency(word, counts);
      std::map<StateLabel, double> values;
      for (const auto& state : StateLabel::all()) values[state] = 0.0;
      for (std::size_t i = 0; i < counts.states().size(); ++i)
        values[counts.states()[i]] = fractions[i];
      {
        auto out = open_artifact(ctx, "map.csv");
        write_map_csv(values, out);
      }
      std::cout << "map: " << values.size() << " states\n";
      return;
    }

    ctx.note_input(input);
    std::ifstream in(input);
    if (!in) throw Error("cannot read input: " + input);
    std::map<StateLabel, double> values;
    for (const auto& state : StateLabel::all()) values[state] = 0.0;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (lineno == 1 && t == "state,value") continue;  // optional header
      const auto comma = t.find(',');
      if (comma == std::string::npos)
        throw Error("line " + std::to_string(lineno) + ": expected state,value");
      const std::string code = trim(t.substr(0, comma));
      const auto state = StateLabel::parse(code);
      if (!state) throw Error("line " + std::to_string(lineno) + ": unknown state '" + code + "'");
      if (!seen.insert(std::string(state->code())).second)
        throw Error("line " + std::to_string(lineno) + ": duplicate state '" + code + "'");
      double value = 0;
      if (!parse_value(t.substr(comma + 1), value))
        throw Error("line " + std::to_string(lineno) + ": cannot parse value '" +
                    t.substr(comma + 1) + "'");
      values[*state] = value;
    }
    {
      auto out = open_artifact(ctx, "map.csv");
      write_map_csv(values, out);
    }
    std::cout << "map: " << values.size() << " states\n";
  }
};

struct SynthCmd {
  std::uint64_t seed = 0;
  int states = 50, users_per_state = 20, tokens_per_user = 200, background_vocab = 500;
  int noise_vocab = 0, noise_words_per_user = 3;
  double noise_token_rate = 0.0;
  std::string state_codes, background_prefix = "bg", noise_prefix = "nz", media = "other";
  std::string id_prefix = "u", provenance = "synth", out = "corpus.jsonl";
  std::vector<std::string> planted;
  bool demographics = false;
  CLI::Option *o_seed, *o_states, *o_state_codes, *o_users, *o_tokens, *o_bg_vocab, *o_bg_prefix,
      *o_planted, *o_noise_vocab, *o_noise_words, *o_noise_rate, *o_noise_prefix, *o_demo,
      *o_media, *o_id_prefix, *o_provenance, *o_out;

  void add(CLI::App* sub) {
    o_seed = sub->add_option("--seed", seed, "generator seed");
    o_states = sub->add_option("--states", states, "number of states (first n in code order)");
    o_state_codes = sub->add_option("--state-codes", state_codes, "explicit comma-separated codes");
    o_users = sub->add_option("--users-per-state", users_per_state, "users per state");
    o_tokens = sub->add_option("--tokens-per-user", tokens_per_user, "tokens per user");
    o_bg_vocab = sub->add_option("--background-vocab", background_vocab, "background vocabulary");
    o_bg_prefix = sub->add_option("--background-prefix", background_prefix, "background prefix");
    o_planted = sub->add_option("--planted", planted,
                                "planted family as prefix:words:rate:locality (repeatable)");
    o_noise_vocab = sub->add_option("--noise-vocab", noise_vocab, "idiosyncratic noise pool");
    o_noise_words = sub->add_option("--noise-words-per-user", noise_words_per_user,
                                    "noise words per user");
    o_noise_rate = sub->add_option("--noise-token-rate", noise_token_rate, "noise token rate");
    o_noise_prefix = sub->add_option("--noise-prefix", noise_prefix, "noise prefix");
    o_demo = sub->add_flag("--demographics", demographics, "assign gender and industry");
    o_media = sub->add_option("--media", media, "corpus media tag");
    o_id_prefix = sub->add_option("--id-prefix", id_prefix, "user id prefix");
    o_provenance = sub->add_option("--provenance", provenance, "corpus provenance tag");
    o_out = sub->add_option("--out", out, "artifact name");
  }

  void run(Ctx& ctx, Resolver& r) {
    r.resolve(o_seed, seed, "seed");
    r.resolve(o_states, states, "states");
    r.resolve(o_state_codes, state_codes, "state_codes");
    r.resolve(o_users, users_per_state, "users_per_state");
    r.resolve(o_tokens, tokens_per_user, "tokens_per_user");
    r.resolve(o_bg_vocab, background_vocab, "background_vocab");
    r.resolve(o_bg_prefix, background_prefix, "background_prefix");
    r.resolve_list(o_planted, planted, "planted");
    r.resolve(o_noise_vocab, noise_vocab, "noise_vocab");
    r.resolve(o_noise_words, noise_words_per_user, "noise_words_per_user");
    r.resolve(o_noise_rate, noise_token_rate, "noise_token_rate");
    r.resolve(o_noise_prefix, noise_prefix, "noise_prefix");
    r.resolve(o_demo, demographics, "demographics");
    r.resolve(o_media, media, "media");
    r.resolve(o_id_prefix, id_prefix, "id_prefix");
    r.resolve(o_provenance, provenance, "provenance");
    r.resolve(o_out, out, "out");

    SynthSpec spec;
    spec.num_states = states;
    if (!state_codes.empty()) {
      for (const auto& part : split_on(state_codes, ',')) {
        const auto state = StateLabel::parse(trim(part));
        if (!state) ctx.problems.push_back("state_codes: unknown state '" + trim(part) + "'");
        else spec.states.push_back(*state);
      }
    }
    spec.users_per_state = users_per_state;
    spec.tokens_per_user = tokens_per_user;
    spec.background_vocab = background_vocab;
    spec.background_prefix = background_prefix;
    if (o_planted->count() > 0 || !planted.empty()) {
      spec.planted.clear();
      for (const auto& part : planted) {
        const auto fields = split_on(part, ':');
        if (fields.size() != 4) {
          ctx.problems.push_back("planted: expected prefix:words:rate:locality, got '" + part +
                                 "'");
          continue;
        }
        PlantedFamily family;
        family.prefix = fields[0];
        if (!parse_value(fields[1], family.words_per_state))
          ctx.problems.push_back("planted: cannot parse words '" + fields[1] + "'");
        if (!parse_value(fields[2], family.token_rate))
          ctx.problems.push_back("planted: cannot parse rate '" + fields[2] + "'");
        if (!parse_value(fields[3], family.locality))
          ctx.problems.push_back("planted: cannot parse locality '" + fields[3] + "'");
        spec.planted.push_back(std::move(family));
      }
    }
    spec.noise_vocab = noise_vocab;
    spec.noise_words_per_user = noise_words_per_user;
    spec.noise_token_rate = noise_token_rate;
    spec.noise_prefix = noise_prefix;
    spec.assign_demographics = demographics;
    const auto m = parse_media(media);
    if (!m) ctx.problems.push_back("media: unknown value '" + media + "'");
    else spec.media = *m;
    spec.id_prefix = id_prefix;
    spec.provenance = provenance;
    if (out.empty()) ctx.problems.push_back("out: must not be empty");
    ctx.fail_if_invalid();
    ctx.seed = seed;

    const Corpus corpus = synth_corpus(spec, seed);
    save_corpus(corpus, ctx.artifact(out));
    std::cout << "synthesized " << corpus.users.size() << " users ("
              << spec.effective_states().size() << " states, seed=" << seed << ")\n";
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("geostate");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& arg : full) argv.push_back(arg.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"content-based user geolocation at state granularity"};
  app.require_subcommand(1);
  app.fallthrough();
  // "--h" is a real option below, so help keeps only its long form.
  app.set_help_flag("--help", "print help");

  std::string config_path, output_dir = ".";
  int workers = 1;
  auto* o_config = app.add_option("--config", config_path, "INI config file");
  auto* o_output = app.add_option("--output-dir", output_dir, "artifact directory");
  auto* o_workers = app.add_option("--workers", workers, "parallel workers");

  IngestCmd ingest;
  StatsCmd stats;
  SplitCmd split_cmd;
  VocabCmd vocab;
  WeighCmd weigh;
  LexiconCmd lexicon;
  TrainCmd train;
  EvalCmd eval;
  CrossCmd cross;
  SlicesCmd slices;
  BenchCmd bench;
  ExportMapCmd export_map;
  SynthCmd synth;

  auto* sub_ingest = app.add_subcommand("ingest", "tokenize a raw JSONL corpus");
  sub_ingest->set_help_flag("--help", "print help");
  ingest.add(sub_ingest);
  auto* sub_stats = app.add_subcommand("stats", "corpus size and length statistics");
  sub_stats->set_help_flag("--help", "print help");
  stats.add(sub_stats);
  auto* sub_split = app.add_subcommand("split", "deterministic train/dev/test partition");
  sub_split->set_help_flag("--help", "print help");
  split_cmd.add(sub_split);
  auto* sub_vocab = app.add_subcommand("vocab", "counts table and filtered vocabulary");
  sub_vocab->set_help_flag("--help", "print help");
  vocab.add(sub_vocab);
  auto* sub_weigh = app.add_subcommand("weigh", "rank words and keep a fraction");
  sub_weigh->set_help_flag("--help", "print help");
  weigh.add(sub_weigh);
  auto* sub_lexicon = app.add_subcommand("lexicon", "per-state word lists");
  sub_lexicon->set_help_flag("--help", "print help");
  lexicon.add(sub_lexicon);
  auto* sub_train = app.add_subcommand("train", "fit a classifier");
  sub_train->set_help_flag("--help", "print help");
  train.add(sub_train);
  auto* sub_eval = app.add_subcommand("eval", "score a model or sweep a config grid");
  sub_eval->set_help_flag("--help", "print help");
  eval.add(sub_eval);
  auto* sub_cross = app.add_subcommand("cross", "train x dev x test media matrix");
  sub_cross->set_help_flag("--help", "print help");
  cross.add(sub_cross);
  auto* sub_slices = app.add_subcommand("slices", "accuracy by state or demographic");
  sub_slices->set_help_flag("--help", "print help");
  slices.add(sub_slices);
  auto* sub_bench = app.add_subcommand("bench", "training and scoring wall-clock medians");
  sub_bench->set_help_flag("--help", "print help");
  bench.add(sub_bench);
  auto* sub_export = app.add_subcommand("export-map", "complete state,value choropleth table");
  sub_export->set_help_flag("--help", "print help");
  export_map.add(sub_export);
  auto* sub_synth = app.add_subcommand("synth", "deterministic synthetic corpus");
  sub_synth->set_help_flag("--help", "print help");
  synth.add(sub_synth);

  std::string active;
  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      throw Error(std::string("argument error: ") + e.what());
    }

    Ctx ctx;
    for (int i = 1; i < argc; ++i) ctx.argv.push_back(argv[i]);

    ConfigFile cfg;
    const bool has_cfg = o_config->count() > 0;
    if (has_cfg) cfg = ConfigFile::load(config_path);

    CLI::App* selected = app.get_subcommands().front();
    active = selected->get_name();
    ctx.command = active;

    Resolver resolver;
    resolver.cfg = has_cfg ? &cfg : nullptr;
    resolver.section = active;
    resolver.effective = &ctx.effective;
    resolver.problems = &ctx.problems;

    resolver.resolve(o_output, output_dir, "output_dir", "GEOSTATE_OUTPUT_DIR");
    resolver.resolve(o_workers, workers, "workers", "GEOSTATE_WORKERS");
    if (workers < 1) ctx.problems.push_back("workers: must be >= 1");
    ctx.output_dir = output_dir;
    ctx.workers = workers;

    if (selected == sub_ingest) ingest.run(ctx, resolver);
    else if (selected == sub_stats) stats.run(ctx, resolver);
    else if (selected == sub_split) split_cmd.run(ctx, resolver);
    else if (selected == sub_vocab) vocab.run(ctx, resolver);
    else if (selected == sub_weigh) weigh.run(ctx, resolver);
    else if (selected == sub_lexicon) lexicon.run(ctx, resolver);
    else if (selected == sub_train) train.run(ctx, resolver);
    else if (selected == sub_eval) eval.run(ctx, resolver);
    else if (selected == sub_cross) cross.run(ctx, resolver);
    else if (selected == sub_slices) slices.run(ctx, resolver);
    else if (selected == sub_bench) bench.run(ctx, resolver);
    else if (selected == sub_export) export_map.run(ctx, resolver);
    else if (selected == sub_synth) synth.run(ctx, resolver);
    else throw Error("unknown subcommand");

    ctx.write_manifest();
    return 0;
  } catch (const std::exception& e) {
    nlohmann::json record;
    record["command"] = active;
    record["error"] = e.what();
    std::cerr << record.dump() << '\n';
    return 1;
  }
}

}  // namespace geostate
