#include "geostate/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "geostate/error.hpp"

namespace geostate {
namespace {

using nlohmann::json;

std::vector<StateLabel> resolve_states(const Corpus& train, std::vector<StateLabel> states) {
  if (states.empty()) {
    std::set<StateLabel> present;
    for (const auto& u : train.users) present.insert(u.state);
    states.assign(present.begin(), present.end());
  } else {
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
  }
  if (states.empty()) throw Error("train: no states");

  std::vector<std::size_t> users_per_state(StateLabel::kCount, 0);
  for (const auto& u : train.users) ++users_per_state[u.state.index()];
  std::string missing;
  for (const auto& s : states) {
    if (users_per_state[s.index()] == 0) {
      missing += missing.empty() ? "" : ", ";
      missing += s.code();
    }
  }
  if (!missing.empty()) throw Error("train: states with no training users: " + missing);
  return states;
}

FeatureProvenance provenance_of(const FeatureSet& features) {
  return {features.origin, features.fraction, features.source_media, features.min_users};
}

int argmax_first(const std::vector<double>& scores) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

}  // namespace

NBModel train_nb(const Corpus& train, const FeatureSet& features, double alpha,
                 std::vector<StateLabel> states) {
  if (train.users.empty()) throw Error("train_nb: empty training corpus");
  if (features.words.empty()) throw Error("train_nb: empty feature set");
  if (!(alpha > 0)) throw Error("train_nb: alpha must be positive");

  NBModel model;
  model.states = resolve_states(train, std::move(states));
  model.alpha = alpha;
  model.provenance = provenance_of(features);
  model.feature_words = features.words;
  model.feature_index.reserve(features.words.size());
  for (std::size_t i = 0; i < features.words.size(); ++i)
    model.feature_index.emplace(features.words[i], static_cast<int>(i));

  const std::size_t n_states = model.states.size();
  const std::size_t n_features = model.feature_words.size();
  std::vector<int> slot_of(StateLabel::kCount, -1);
  for (std::size_t i = 0; i < n_states; ++i) slot_of[model.states[i].index()] = static_cast<int>(i);

  std::vector<std::vector<std::uint64_t>> counts(n_features,
                                                 std::vector<std::uint64_t>(n_states, 0));
  std::vector<std::uint64_t> state_tokens(n_states, 0);
  std::vector<std::uint64_t> state_users(n_states, 0);
  for (const auto& u : train.users) {
    const int slot = slot_of[u.state.index()];
    if (slot < 0) continue;  // user outside the requested state list
    ++state_users[slot];
    for (const auto& [word, count] : u.tokens) {
      const auto it = model.feature_index.find(word);
      if (it == model.feature_index.end()) continue;
      counts[it->second][slot] += count;
      state_tokens[slot] += count;
    }
  }

  std::uint64_t total_users = 0;
  for (std::uint64_t n : state_users) total_users += n;
  model.log_prior.resize(n_states);
  for (std::size_t s = 0; s < n_states; ++s)
    model.log_prior[s] =
        std::log(static_cast<double>(state_users[s]) / static_cast<double>(total_users));

  model.log_likelihood.assign(n_features, std::vector<double>(n_states, 0.0));
  const double f = static_cast<double>(n_features);
  for (std::size_t w = 0; w < n_features; ++w)
    for (std::size_t s = 0; s < n_states; ++s)
      model.log_likelihood[w][s] =
          std::log((static_cast<double>(counts[w][s]) + alpha) /
                   (static_cast<double>(state_tokens[s]) + alpha * f));
  return model;
}

Prediction predict(const NBModel& model, const TokenizedUser& user) {
  Prediction out;
  out.user_id = user.user_id;
  out.scores = model.log_prior;
  for (const auto& [word, count] : user.tokens) {
    const auto it = model.feature_index.find(word);
    if (it == model.feature_index.end()) continue;
    const auto& row = model.log_likelihood[it->second];
    const double c = static_cast<double>(count);
    for (std::size_t s = 0; s < out.scores.size(); ++s) out.scores[s] += c * row[s];
  }
  out.state = model.states[argmax_first(out.scores)];
  return out;
}

LinearProblem make_linear_problem(const Corpus& train, const FeatureSet& features,
                                  const std::vector<StateLabel>& states) {
  LinearProblem problem;
  problem.n_states = static_cast<int>(states.size());
  problem.n_features = static_cast<int>(features.words.size());

  std::vector<int> slot_of(StateLabel::kCount, -1);
  for (std::size_t i = 0; i < states.size(); ++i) slot_of[states[i].index()] = static_cast<int>(i);

  for (const auto& u : train.users) {
    const int slot = slot_of[u.state.index()];
    if (slot < 0) continue;
    std::vector<std::pair<int, double>> row;
    double norm_sq = 0;
    for (const auto& [word, count] : u.tokens) {
      const int fid = features.index_of(word);
      if (fid < 0) continue;
      const double c = static_cast<double>(count);
      row.emplace_back(fid, c);
      norm_sq += c * c;
    }
    if (norm_sq > 0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& [fid, value] : row) value *= inv;
    }
    std::sort(row.begin(), row.end());
    problem.rows.push_back(std::move(row));
    problem.labels.push_back(slot);
  }
  return problem;
}

namespace {

double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  return z > 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

double linear_objective(const LinearProblem& problem, const std::vector<std::vector<double>>& w,
                        const std::vector<double>& bias, double l2) {
  const double n = static_cast<double>(problem.rows.size());
  double loss = 0;
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    for (int s = 0; s < problem.n_states; ++s) {
      double z = bias[s];
      for (const auto& [fid, value] : problem.rows[i]) z += w[s][fid] * value;
      const double y = problem.labels[i] == s ? 1.0 : -1.0;
      loss += softplus(-y * z);
    }
  }
  loss /= n;
  double reg = 0;
  for (int s = 0; s < problem.n_states; ++s)
    for (double v : w[s]) reg += v * v;
  return loss + 0.5 * l2 * reg;
}

void linear_gradient(const LinearProblem& problem, const std::vector<std::vector<double>>& w,
                     const std::vector<double>& bias, double l2,
                     std::vector<std::vector<double>>& grad_w, std::vector<double>& grad_b) {
  grad_w.assign(problem.n_states, std::vector<double>(problem.n_features, 0.0));
  grad_b.assign(problem.n_states, 0.0);
  const double inv_n = 1.0 / static_cast<double>(problem.rows.size());
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    for (int s = 0; s < problem.n_states; ++s) {
      double z = bias[s];
      for (const auto& [fid, value] : problem.rows[i]) z += w[s][fid] * value;
      const double y = problem.labels[i] == s ? 1.0 : -1.0;
      const double coeff = -y * sigmoid(-y * z) * inv_n;
      grad_b[s] += coeff;
      for (const auto& [fid, value] : problem.rows[i]) grad_w[s][fid] += coeff * value;
    }
  }
  for (int s = 0; s < problem.n_states; ++s)
    for (int f = 0; f < problem.n_features; ++f) grad_w[s][f] += l2 * w[s][f];
}

LinearModel train_linear(const Corpus& train, const FeatureSet& features, const LinearHyper& hyper,
                         std::vector<StateLabel> states) {
  if (train.users.empty()) throw Error("train_linear: empty training corpus");
  if (features.words.empty()) throw Error("train_linear: empty feature set");
  if (hyper.epochs < 1) throw Error("train_linear: epochs must be at least 1");
  if (hyper.l2 < 0) throw Error("train_linear: l2 must be non-negative");
  if (!(hyper.lr > 0)) throw Error("train_linear: lr must be positive");

  LinearModel model;
  model.states = resolve_states(train, std::move(states));
  model.hyper = hyper;
  model.provenance = provenance_of(features);
  model.feature_words = features.words;
  for (std::size_t i = 0; i < features.words.size(); ++i)
    model.feature_index.emplace(features.words[i], static_cast<int>(i));

  const LinearProblem problem = make_linear_problem(train, features, model.states);
  model.weights.assign(problem.n_states, std::vector<double>(problem.n_features, 0.0));
  model.bias.assign(problem.n_states, 0.0);

  std::vector<std::vector<double>> grad_w;
  std::vector<double> grad_b;
  double objective = linear_objective(problem, model.weights, model.bias, hyper.l2);
  double base_lr = hyper.lr;
  model.converged = false;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    linear_gradient(problem, model.weights, model.bias, hyper.l2, grad_w, grad_b);
    const double step0 = base_lr / (1.0 + hyper.lr_decay * epoch);

    // Deterministic backtracking: halve the step until the objective drops.
    double accepted = objective;
    bool stepped = false;
    for (double step = step0; step > step0 * 0x1p-60; step *= 0.5) {
      std::vector<std::vector<double>> cand_w = model.weights;
      std::vector<double> cand_b = model.bias;
      for (int s = 0; s < problem.n_states; ++s) {
        for (int f = 0; f < problem.n_features; ++f) cand_w[s][f] -= step * grad_w[s][f];
        cand_b[s] -= step * grad_b[s];
      }
      const double cand_obj = linear_objective(problem, cand_w, cand_b, hyper.l2);
      if (cand_obj <= objective) {
        model.weights = std::move(cand_w);
        model.bias = std::move(cand_b);
        accepted = cand_obj;
        base_lr = step * (1.0 + hyper.lr_decay * epoch);  // keep the shrink
        stepped = true;
        break;
      }
    }
    const double improvement = objective - accepted;
    objective = accepted;
    if (!stepped || improvement <= hyper.tol * std::max(1.0, std::abs(objective))) {
      model.converged = true;
      break;
    }
  }
  model.final_objective = objective;
  return model;
}

Prediction predict(const LinearModel& model, const TokenizedUser& user) {
  Prediction out;
  out.user_id = user.user_id;
  out.scores.assign(model.states.size(), 0.0);

  std::vector<std::pair<int, double>> row;
  double norm_sq = 0;
  for (const auto& [word, count] : user.tokens) {
    const auto it = model.feature_index.find(word);
    if (it == model.feature_index.end()) continue;
    const double c = static_cast<double>(count);
    row.emplace_back(it->second, c);
    norm_sq += c * c;
  }
  const double inv = norm_sq > 0 ? 1.0 / std::sqrt(norm_sq) : 0.0;
  for (std::size_t s = 0; s < model.states.size(); ++s) {
    double z = model.bias[s];
    for (const auto& [fid, value] : row) z += model.weights[s][fid] * value * inv;
    out.scores[s] = z;
  }
  out.state = model.states[argmax_first(out.scores)];
  return out;
}

Prediction predict(const Model& model, const TokenizedUser& user) {
  return std::visit([&](const auto& m) { return predict(m, user); }, model);
}

std::vector<Prediction> predict_all(const Model& model, const Corpus& corpus) {
  std::vector<Prediction> out;
  out.reserve(corpus.users.size());
  for (const auto& u : corpus.users) out.push_back(predict(model, u));
  return out;
}

const std::vector<StateLabel>& model_states(const Model& model) {
  return std::visit([](const auto& m) -> const std::vector<StateLabel>& { return m.states; },
                    model);
}

const FeatureProvenance& model_provenance(const Model& model) {
  return std::visit([](const auto& m) -> const FeatureProvenance& { return m.provenance; }, model);
}

namespace {

json provenance_to_json(const FeatureProvenance& p) {
  json j;
  j["origin"] = p.origin;
  j["fraction"] = p.fraction;
  j["source_media"] = p.source_media;
  j["min_users"] = p.min_users;
  return j;
}

FeatureProvenance provenance_from_json(const json& j) {
  FeatureProvenance p;
  p.origin = j.at("origin").get<std::string>();
  p.fraction = j.at("fraction").get<double>();
  p.source_media = j.at("source_media").get<std::string>();
  p.min_users = j.at("min_users").get<int>();
  return p;
}

std::vector<std::string> states_to_codes(const std::vector<StateLabel>& states) {
  std::vector<std::string> out;
  out.reserve(states.size());
  for (const auto& s : states) out.emplace_back(s.code());
  return out;
}

std::vector<StateLabel> states_from_codes(const std::vector<std::string>& codes) {
  std::vector<StateLabel> out;
  out.reserve(codes.size());
  for (const auto& c : codes) {
    const auto s = StateLabel::parse(c);
    if (!s) throw Error("model file: unknown state: " + c);
    out.push_back(*s);
  }
  return out;
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
  json j;
  j["format"] = "geostate-model";
  j["version"] = 1;
  if (const auto* nb = std::get_if<NBModel>(&model)) {
    j["type"] = "nb";
    j["states"] = states_to_codes(nb->states);
    j["alpha"] = nb->alpha;
    j["log_prior"] = nb->log_prior;
    j["features"] = nb->feature_words;
    j["log_likelihood"] = nb->log_likelihood;
    j["provenance"] = provenance_to_json(nb->provenance);
  } else {
    const auto& lin = std::get<LinearModel>(model);
    j["type"] = "linear";
    j["states"] = states_to_codes(lin.states);
    j["features"] = lin.feature_words;
    j["weights"] = lin.weights;
    j["bias"] = lin.bias;
    j["converged"] = lin.converged;
    j["final_objective"] = lin.final_objective;
    json hyper;
    hyper["l2"] = lin.hyper.l2;
    hyper["epochs"] = lin.hyper.epochs;
    hyper["lr"] = lin.hyper.lr;
    hyper["lr_decay"] = lin.hyper.lr_decay;
    hyper["tol"] = lin.hyper.tol;
    hyper["seed"] = lin.hyper.seed;
    j["hyper"] = std::move(hyper);
    j["provenance"] = provenance_to_json(lin.provenance);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("malformed model file: " + std::string(e.what()));
  }
  if (j.value("format", "") != "geostate-model") throw Error(path.string() + ": not a model file");
  if (j.value("version", 0) != 1) throw Error(path.string() + ": unsupported model version");

  const std::string type = j.value("type", "");
  if (type == "nb") {
    NBModel nb;
    nb.states = states_from_codes(j.at("states").get<std::vector<std::string>>());
    nb.alpha = j.at("alpha").get<double>();
    nb.log_prior = j.at("log_prior").get<std::vector<double>>();
    nb.feature_words = j.at("features").get<std::vector<std::string>>();
    nb.log_likelihood = j.at("log_likelihood").get<std::vector<std::vector<double>>>();
    nb.provenance = provenance_from_json(j.at("provenance"));
    for (std::size_t i = 0; i < nb.feature_words.size(); ++i)
      nb.feature_index.emplace(nb.feature_words[i], static_cast<int>(i));
    return nb;
  }
  if (type == "linear") {
    LinearModel lin;
    lin.states = states_from_codes(j.at("states").get<std::vector<std::string>>());
    lin.feature_words = j.at("features").get<std::vector<std::string>>();
    lin.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    lin.bias = j.at("bias").get<std::vector<double>>();
    lin.converged = j.at("converged").get<bool>();
    lin.final_objective = j.value("final_objective", 0.0);
    const auto& hyper = j.at("hyper");
    lin.hyper.l2 = hyper.at("l2").get<double>();
    lin.hyper.epochs = hyper.at("epochs").get<int>();
    lin.hyper.lr = hyper.at("lr").get<double>();
    lin.hyper.lr_decay = hyper.at("lr_decay").get<double>();
    lin.hyper.tol = hyper.at("tol").get<double>();
    lin.hyper.seed = hyper.at("seed").get<std::uint64_t>();
    lin.provenance = provenance_from_json(j.at("provenance"));
    for (std::size_t i = 0; i < lin.feature_words.size(); ++i)
      lin.feature_index.emplace(lin.feature_words[i], static_cast<int>(i));
    return lin;
  }
  throw Error(path.string() + ": unknown model type: " + type);
}

}  // namespace geostate
