#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "geostate/corpus.hpp"
#include "geostate/weighting.hpp"

namespace geostate {

struct FeatureProvenance {
  std::string origin;  // "igr" | "wlh" | "all_words" | "lexicons"
  double fraction = 1.0;
  std::string source_media;
  int min_users = 0;
};

struct Prediction {
  std::string user_id;
  StateLabel state;
  std::vector<double> scores;  // aligned with the model's state list
};

// Multinomial model with additive smoothing: per-state word likelihoods
// from training token counts, priors from training user counts. Tokens
// outside the feature set are ignored at prediction time; a user with no
// in-feature tokens falls back to the prior. Argmax ties break to the
// first state in code order.
struct NBModel {
  std::vector<StateLabel> states;
  std::vector<double> log_prior;
  std::vector<std::string> feature_words;
  std::unordered_map<std::string, int> feature_index;
  std::vector<std::vector<double>> log_likelihood;  // [feature][state]
  double alpha = 1.0;
  FeatureProvenance provenance;
};

NBModel train_nb(const Corpus& train, const FeatureSet& features, double alpha = 1.0,
                 std::vector<StateLabel> states = {});

Prediction predict(const NBModel& model, const TokenizedUser& user);

struct LinearHyper {
  double l2 = 1e-4;
  int epochs = 200;
  double lr = 1.0;
  double lr_decay = 0.0;  // step for epoch e is lr / (1 + lr_decay * e)
  double tol = 1e-8;      // relative objective improvement treated as converged
  std::uint64_t seed = 0;
};

// One-vs-rest L2-regularised logistic regression over unit-normalised
// count vectors, fit by deterministic full-batch gradient descent.
struct LinearModel {
  std::vector<StateLabel> states;
  std::vector<std::string> feature_words;
  std::unordered_map<std::string, int> feature_index;
  std::vector<std::vector<double>> weights;  // [state][feature]
  std::vector<double> bias;
  LinearHyper hyper;
  bool converged = false;  // the model is returned either way
  double final_objective = 0;
  FeatureProvenance provenance;
};

LinearModel train_linear(const Corpus& train, const FeatureSet& features,
                         const LinearHyper& hyper, std::vector<StateLabel> states = {});

Prediction predict(const LinearModel& model, const TokenizedUser& user);

// The regression data, objective and gradient are exposed so the fit can be
// checked against finite differences.
struct LinearProblem {
  int n_states = 0;
  int n_features = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;  // unit-normalised sparse vectors
  std::vector<int> labels;                                // state slot per row
};

LinearProblem make_linear_problem(const Corpus& train, const FeatureSet& features,
                                  const std::vector<StateLabel>& states);

double linear_objective(const LinearProblem& problem, const std::vector<std::vector<double>>& w,
                        const std::vector<double>& bias, double l2);

void linear_gradient(const LinearProblem& problem, const std::vector<std::vector<double>>& w,
                     const std::vector<double>& bias, double l2,
                     std::vector<std::vector<double>>& grad_w, std::vector<double>& grad_b);

using Model = std::variant<NBModel, LinearModel>;

Prediction predict(const Model& model, const TokenizedUser& user);
std::vector<Prediction> predict_all(const Model& model, const Corpus& corpus);
const std::vector<StateLabel>& model_states(const Model& model);
const FeatureProvenance& model_provenance(const Model& model);

// Versioned JSON serialization; numbers round-trip exactly.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace geostate
