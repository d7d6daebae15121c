#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geostate/adjacency.hpp"
#include "geostate/lexicon.hpp"
#include "geostate/model.hpp"

namespace geostate {

std::map<std::string, StateLabel> gold_labels(const Corpus& corpus);

// Fraction of predictions naming the gold state. Prediction ids must match
// the gold key set exactly.
double accuracy(const std::vector<Prediction>& preds,
                const std::map<std::string, StateLabel>& gold);

// Fraction of predictions naming the gold state or one of its neighbours.
double near_miss_accuracy(const std::vector<Prediction>& preds,
                          const std::map<std::string, StateLabel>& gold,
                          const AdjacencyGraph& adjacency);

struct RunProvenance {
  std::string config_name;
  std::string features;  // origin plus fraction or params
  std::string classifier;
  std::string split;  // "dev" | "test"
  std::string train_media, dev_media, test_media;
};

struct EvalReport {
  double accuracy = 0;
  double near_miss = 0;
  std::size_t n_test = 0;
  std::map<StateLabel, double> per_state_accuracy;
  std::map<StateLabel, std::size_t> per_state_total;
  std::map<std::pair<StateLabel, StateLabel>, std::size_t> confusion;  // (gold, predicted)
  RunProvenance provenance;
};

EvalReport evaluate_predictions(const std::vector<Prediction>& preds, const Corpus& test,
                                const AdjacencyGraph& adjacency,
                                RunProvenance provenance = {});

enum class SliceField { state, gender, industry };
std::string_view to_string(SliceField f);

struct SliceRow {
  std::string value;
  double accuracy = 0;
  std::size_t support = 0;
  bool low_support = false;
};

struct SliceReport {
  SliceField field = SliceField::state;
  std::size_t min_support = 5;
  std::vector<SliceRow> rows;  // sorted by value
};

// Accuracy within each value of a demographic or state field. Users not
// carrying the field are skipped; rows under min_support are flagged, not
// dropped.
SliceReport slice_accuracy(const std::vector<Prediction>& preds, const Corpus& test,
                           SliceField field, std::size_t min_support = 5);

// Spearman rank correlation with average ranks for ties; two-sided p-value
// from the t approximation. Needs at least 3 points and non-constant input.
struct SpearmanResult {
  double rho = 0;
  double p_value = 1;
};
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);
SpearmanResult spearman(const std::map<std::string, double>& x,
                        const std::map<std::string, double>& y);

// Two-sided two-proportion z-test on k1/n1 vs k2/n2 with a pooled standard
// error. A pooled rate of exactly 0 or 1 has no sampling variance; the
// p-value is 1 by convention and flagged.
struct ProportionTestResult {
  double p_value = 1;
  double z = 0;
  bool degenerate = false;
};
ProportionTestResult proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2,
                                     std::uint64_t n2);

enum class FeatureMethod { all_words, igr, wlh, lexicons };
std::string_view to_string(FeatureMethod m);

enum class ClassifierKind { nb, linear };
std::string_view to_string(ClassifierKind c);

struct ExperimentConfig {
  std::string name;  // derived from the fields when empty
  FeatureMethod method = FeatureMethod::all_words;
  double fraction = 1.0;  // for igr / wlh
  LexiconParams lexicon_params;
  ClassifierKind classifier = ClassifierKind::nb;
  double alpha = 1.0;
  LinearHyper hyper;
  int min_users = 3;

  std::string display_name() const;
  std::string feature_label() const;
};

struct ExperimentResult {
  ExperimentConfig config;
  EvalReport dev_report;
  std::optional<EvalReport> test_report;  // set on the dev-selected config
  bool selected = false;
};

// Feature selection plus classifier fit for one config on one corpus.
Model fit_config(const ExperimentConfig& config, const Corpus& train);

// Fits every grid config on train, scores it on dev, then scores the
// dev-best config (ties to grid order) once on test. All dev reports are
// returned for sweep curves.
std::vector<ExperimentResult> run_experiment(const Corpus& train, const Corpus& dev,
                                             const Corpus& test,
                                             std::span<const ExperimentConfig> grid,
                                             const AdjacencyGraph& adjacency, int workers = 1);

struct MediaSplits {
  std::string media_name;
  Corpus train, dev, test;
};

struct CrossCell {
  std::string train_media, dev_media, test_media;
  bool mixed_training = false;
  std::string selected_config;
  EvalReport report;
};

// Full train x dev x test media matrix, plus one concatenated-training row
// per medium (dev and test from that same medium). Two media yield 8
// matrix rows and 2 mixed rows.
std::vector<CrossCell> cross_media_matrix(std::span<const MediaSplits> media,
                                          std::span<const ExperimentConfig> grid,
                                          const AdjacencyGraph& adjacency, int workers = 1);

struct TimingRow {
  std::string config_name;
  double train_ms_median = 0;
  double test_ms_median = 0;
  double accuracy = 0;
};

struct TimingReport {
  std::vector<TimingRow> rows;
  int repetitions = 0;
  std::string environment;
};

// Median wall-clock cost of feature building + fit (train) and of scoring
// the test corpus (test), per config, over at least 3 repetitions. Runs
// strictly sequentially.
TimingReport benchmark(std::span<const ExperimentConfig> configs, const Corpus& train,
                       const Corpus& test, int repetitions = 5);

// CSV writers. Reports hold no timestamps, so identical inputs produce
// byte-identical files.
void write_eval_csv(std::span<const ExperimentResult> results, std::ostream& out);
void write_report_csv(const EvalReport& report, std::ostream& out);
void write_per_state_csv(const EvalReport& report, std::ostream& out);  // "state,value"
void write_confusion_csv(const EvalReport& report, std::ostream& out);
void write_slice_csv(const SliceReport& report, std::ostream& out);
void write_slice_map_csv(const SliceReport& report, std::ostream& out);  // "state,value"
void write_cross_csv(std::span<const CrossCell> cells, std::ostream& out);
void write_timing_csv(const TimingReport& report, std::ostream& out);
void write_stats_csv(const CorpusStats& stats, std::ostream& out);
void write_map_csv(const std::map<StateLabel, double>& values, std::ostream& out);

}  // namespace geostate
