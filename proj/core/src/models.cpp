#include "osintphish/models.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <algorithm>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "osintphish/error.hpp"
#include "osintphish/rng.hpp"

namespace osintphish {
namespace {

constexpr double kProbClip = 1e-12;

std::vector<int> label_ints(const FeatureMatrix& m) {
  std::vector<int> y;
  y.reserve(m.rows());
  for (Label l : m.labels) y.push_back(static_cast<int>(l));
  return y;
}

void require_rows(const FeatureMatrix& m) {
  m.validate();
  if (m.rows() == 0) throw DataError("cannot train on an empty matrix");
}

TrainedModel wrap(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed) {
  TrainedModel model;
  model.hyperparams = hp;
  model.seed = seed;
  model.columns = m.column_names;
  return model;
}

Criterion criterion_of(const Hyperparams& hp) {
  return hp.text("criterion") == "gini" ? Criterion::Gini : Criterion::Entropy;
}

double sigmoid(double f) { return 1.0 / (1.0 + std::exp(-f)); }

double logloss(const std::vector<int>& y, const std::vector<double>& margin) {
  double total = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p = std::clamp(sigmoid(margin[i]), kProbClip, 1.0 - kProbClip);
    total -= y[i] ? std::log(p) : std::log(1.0 - p);
  }
  return total / static_cast<double>(y.size());
}

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  if (failure) std::rethrow_exception(failure);
}

void check_columns(const TrainedModel& model, const FeatureMatrix& m) {
  if (m.cols != model.columns.size()) {
    throw DataError("column mismatch: model expects " + std::to_string(model.columns.size()) +
                    " columns, matrix has " + std::to_string(m.cols));
  }
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }
double from_finite_or_null(const nlohmann::json& j) {
  return j.is_null() ? -std::numeric_limits<double>::infinity() : j.get<double>();
}

std::vector<std::vector<double>> scaled_support(const SvmModel& svm) {
  std::vector<std::vector<double>> out;
  for (const auto& sv : svm.support) {
    std::vector<double> x(svm.mean.size());
    for (std::size_t c = 0; c < x.size(); ++c) x[c] = -svm.mean[c] / svm.scale[c];
    for (std::size_t k = 0; k < sv.indices.size(); ++k) {
      const auto c = sv.indices[k];
      x[c] = (sv.values[k] - svm.mean[c]) / svm.scale[c];
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

TrainedModel train_decision_tree(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed) {
  if (hp.kind() != ModelKind::DT) throw ConfigError("train_decision_tree needs DT hyperparameters");
  require_rows(m);
  if (m.rows() < hp.count("min_samples_split")) {
    throw DataError("decision tree needs at least min_samples_split=" + hp.text("min_samples_split") + " rows");
  }
  ClassTreeParams params;
  params.criterion = criterion_of(hp);
  params.max_depth = hp.depth("max_depth");
  params.min_samples_split = hp.count("min_samples_split");
  params.min_samples_leaf = hp.count("min_samples_leaf");

  const auto columns = m.dense_columns();
  const auto y = label_ints(m);
  std::vector<std::size_t> samples(m.rows());
  std::iota(samples.begin(), samples.end(), 0);

  TrainedModel model = wrap(m, hp, seed);
  model.state = DecisionTreeModel{build_class_tree(columns, y, std::move(samples), params, nullptr)};
  return model;
}

TrainedModel train_random_forest(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed) {
  if (hp.kind() != ModelKind::RF) throw ConfigError("train_random_forest needs RF hyperparameters");
  require_rows(m);
  ClassTreeParams params;
  params.criterion = criterion_of(hp);
  params.max_depth = hp.depth("max_depth");
  params.min_samples_split = hp.count("min_samples_split");
  params.min_samples_leaf = hp.count("min_samples_leaf");
  params.max_features = hp.text("max_features") == "sqrt"
                            ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m.cols))))
                            : 0;
  const bool bootstrap = hp.flag("bootstrap");

  const auto columns = m.dense_columns();
  const auto y = label_ints(m);
  const std::size_t n = m.rows();
  ForestModel forest;
  forest.trees.resize(hp.count("n_estimators"));
  parallel_for(forest.trees.size(), [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> samples(n);
    if (bootstrap) {
      for (auto& s : samples) s = rng.below(n);
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    forest.trees[t] = build_class_tree(columns, y, std::move(samples), params, &rng);
  });

  TrainedModel model = wrap(m, hp, seed);
  model.state = std::move(forest);
  return model;
}

TrainedModel train_gbt(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed) {
  if (hp.kind() != ModelKind::GBT) throw ConfigError("train_gbt needs GBT hyperparameters");
  require_rows(m);
  const auto columns = m.dense_columns();
  const auto y = label_ints(m);
  const std::size_t n = m.rows();

  BoostedModel boosted;
  boosted.learning_rate = hp.number("learning_rate");
  const double base_rate = std::clamp(
      static_cast<double>(std::accumulate(y.begin(), y.end(), 0)) / static_cast<double>(n), kProbClip,
      1.0 - kProbClip);
  boosted.base_score = std::log(base_rate / (1.0 - base_rate));

  const BoostTreeParams params{hp.count("max_depth"), hp.number("lambda")};
  std::vector<double> margin(n, boosted.base_score), g(n), h(n);
  boosted.train_logloss.push_back(logloss(y, margin));
  const std::size_t rounds = hp.count("n_estimators");
  for (std::size_t round = 0; round < rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      g[i] = p - y[i];
      h[i] = p * (1.0 - p);
    }
    Tree tree = build_boost_tree(columns, g, h, params);
    for (auto& node : tree.nodes) {
      if (node.feature < 0) node.value *= boosted.learning_rate;
    }
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += tree.evaluate([&](int f) { return columns[f][i]; });
    }
    boosted.trees.push_back(std::move(tree));
    boosted.train_logloss.push_back(logloss(y, margin));
  }

  TrainedModel model = wrap(m, hp, seed);
  model.state = std::move(boosted);
  return model;
}

TrainedModel train_mnb(const FeatureMatrix& m, const Hyperparams& hp) {
  if (hp.kind() != ModelKind::MNB) throw ConfigError("train_mnb needs MNB hyperparameters");
  for (double v : m.values) {
    if (v < 0) throw DataError("multinomial naive Bayes requires non-negative entries");
  }
  require_rows(m);
  const double alpha = hp.number("alpha");
  NaiveBayesModel nb;
  std::vector<double> counts[2] = {std::vector<double>(m.cols, 0.0), std::vector<double>(m.cols, 0.0)};
  double docs[2] = {0, 0};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const int c = static_cast<int>(m.labels[r]);
    docs[c] += 1;
    const auto view = m.row(r);
    for (std::size_t k = 0; k < view.indices.size(); ++k) counts[c][view.indices[k]] += view.values[k];
  }
  const double width = static_cast<double>(m.cols);
  for (int c = 0; c < 2; ++c) {
    nb.log_prior[c] = docs[c] > 0 ? std::log(docs[c] / static_cast<double>(m.rows()))
                                  : -std::numeric_limits<double>::infinity();
    const double total = std::accumulate(counts[c].begin(), counts[c].end(), 0.0);
    const double denom = std::log(total + alpha * width);
    nb.log_likelihood[c].resize(m.cols);
    for (std::size_t j = 0; j < m.cols; ++j) nb.log_likelihood[c][j] = std::log(counts[c][j] + alpha) - denom;
  }
  TrainedModel model = wrap(m, hp, 0);
  model.state = std::move(nb);
  return model;
}

TrainedModel train(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed) {
  switch (hp.kind()) {
    case ModelKind::DT: return train_decision_tree(m, hp, seed);
    case ModelKind::RF: return train_random_forest(m, hp, seed);
    case ModelKind::SVM: return train_svm(m, hp, seed);
    case ModelKind::GBT: return train_gbt(m, hp, seed);
    case ModelKind::MNB: {
      TrainedModel model = train_mnb(m, hp);
      model.seed = seed;
      return model;
    }
  }
  throw ConfigError("unknown model kind");
}

std::array<double, 2> mnb_scores(const NaiveBayesModel& nb, const FeatureMatrix::RowView& row) {
  std::array<double, 2> score = {nb.log_prior[0], nb.log_prior[1]};
  for (int c = 0; c < 2; ++c) {
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
      score[c] += row.values[k] * nb.log_likelihood[c][row.indices[k]];
    }
  }
  return score;
}

double gbt_margin(const BoostedModel& model, std::span<const double> dense_row) {
  double f = model.base_score;
  for (const auto& tree : model.trees) f += tree.evaluate([&](int j) { return dense_row[j]; });
  return f;
}

std::vector<Label> predict(const TrainedModel& model, const FeatureMatrix& m) {
  check_columns(model, m);
  std::vector<Label> out;
  out.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const bool phishing = std::visit(
        [&](const auto& state) -> bool {
          using T = std::decay_t<decltype(state)>;
          if constexpr (std::is_same_v<T, DecisionTreeModel>) {
            const auto x = m.dense_row(r);
            return state.tree.evaluate([&](int j) { return x[j]; }) > 0.5;
          } else if constexpr (std::is_same_v<T, ForestModel>) {
            const auto x = m.dense_row(r);
            std::size_t votes = 0;
            for (const auto& tree : state.trees) votes += tree.evaluate([&](int j) { return x[j]; }) > 0.5;
            return 2 * votes > state.trees.size();
          } else if constexpr (std::is_same_v<T, SvmModel>) {
            return svm_decision(state, m.row(r)) > 0.0;
          } else if constexpr (std::is_same_v<T, BoostedModel>) {
            return gbt_margin(state, m.dense_row(r)) > 0.0;
          } else {
            const auto s = mnb_scores(state, m.row(r));
            return s[1] > s[0];
          }
        },
        model.state);
    out.push_back(phishing ? Label::Phishing : Label::Safe);
  }
  return out;
}

nlohmann::json model_to_json(const TrainedModel& model) {
  nlohmann::json body = std::visit(
      [](const auto& state) -> nlohmann::json {
        using T = std::decay_t<decltype(state)>;
        if constexpr (std::is_same_v<T, DecisionTreeModel>) {
          return {{"tree", tree_to_json(state.tree)}};
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          nlohmann::json trees = nlohmann::json::array();
          for (const auto& t : state.trees) trees.push_back(tree_to_json(t));
          return {{"trees", trees}};
        } else if constexpr (std::is_same_v<T, SvmModel>) {
          nlohmann::json support = nlohmann::json::array();
          for (const auto& sv : state.support) support.push_back({{"indices", sv.indices}, {"values", sv.values}});
          return {{"standardize", state.standardize}, {"gamma", state.gamma},   {"C", state.C},
                  {"mean", state.mean},               {"scale", state.scale},   {"bias", state.bias},
                  {"support", support},               {"alpha", state.alpha},   {"y", state.y},
                  {"iterations", state.iterations},   {"converged", state.converged}};
        } else if constexpr (std::is_same_v<T, BoostedModel>) {
          nlohmann::json trees = nlohmann::json::array();
          for (const auto& t : state.trees) trees.push_back(tree_to_json(t));
          return {{"base_score", state.base_score},
                  {"learning_rate", state.learning_rate},
                  {"trees", trees},
                  {"train_logloss", state.train_logloss}};
        } else {
          return {{"log_prior", {finite_or_null(state.log_prior[0]), finite_or_null(state.log_prior[1])}},
                  {"log_likelihood", {state.log_likelihood[0], state.log_likelihood[1]}}};
        }
      },
      model.state);
  return {{"format", "osintphish-model"},
          {"version", 1},
          {"kind", std::string(model_name(model.kind()))},
          {"hyperparams", model.hyperparams.values()},
          {"seed", model.seed},
          {"columns", model.columns},
          {"model", std::move(body)}};
}

TrainedModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "osintphish-model") throw SchemaError("not a model file");
    if (j.value("version", 0) != 1) throw SchemaError("unsupported model version");
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    TrainedModel model;
    model.hyperparams = Hyperparams::defaults(kind);
    for (const auto& [k, v] : j.at("hyperparams").items()) model.hyperparams.set(k, v.get<std::string>());
    model.seed = j.at("seed").get<std::uint64_t>();
    model.columns = j.at("columns").get<std::vector<std::string>>();
    const auto& body = j.at("model");
    switch (kind) {
      case ModelKind::DT:
        model.state = DecisionTreeModel{tree_from_json(body.at("tree"))};
        break;
      case ModelKind::RF: {
        ForestModel forest;
        for (const auto& t : body.at("trees")) forest.trees.push_back(tree_from_json(t));
        model.state = std::move(forest);
        break;
      }
      case ModelKind::SVM: {
        SvmModel svm;
        svm.standardize = body.at("standardize").get<bool>();
        svm.gamma = body.at("gamma").get<double>();
        svm.C = body.at("C").get<double>();
        svm.mean = body.at("mean").get<std::vector<double>>();
        svm.scale = body.at("scale").get<std::vector<double>>();
        svm.bias = body.at("bias").get<double>();
        for (const auto& sv : body.at("support")) {
          svm.support.push_back({sv.at("indices").get<std::vector<std::uint32_t>>(),
                                 sv.at("values").get<std::vector<double>>()});
        }
        svm.alpha = body.at("alpha").get<std::vector<double>>();
        svm.y = body.at("y").get<std::vector<int>>();
        svm.iterations = body.value("iterations", std::size_t{0});
        svm.converged = body.value("converged", false);
        svm.support_scaled = scaled_support(svm);
        model.state = std::move(svm);
        break;
      }
      case ModelKind::GBT: {
        BoostedModel boosted;
        boosted.base_score = body.at("base_score").get<double>();
        boosted.learning_rate = body.at("learning_rate").get<double>();
        for (const auto& t : body.at("trees")) boosted.trees.push_back(tree_from_json(t));
        boosted.train_logloss = body.value("train_logloss", std::vector<double>{});
        model.state = std::move(boosted);
        break;
      }
      case ModelKind::MNB: {
        NaiveBayesModel nb;
        for (int c = 0; c < 2; ++c) {
          nb.log_prior[c] = from_finite_or_null(body.at("log_prior").at(c));
          nb.log_likelihood[c] = body.at("log_likelihood").at(c).get<std::vector<double>>();
        }
        model.state = std::move(nb);
        break;
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::string& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << model_to_json(model).dump() << '\n';
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open model '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed model file: ") + e.what());
  }
  return model_from_json(j);
}

std::vector<std::size_t> stratified_folds(const std::vector<Label>& labels, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw ConfigError("need at least 2 folds");
  if (labels.size() < folds) {
    throw DataError("cannot make " + std::to_string(folds) + " folds from " + std::to_string(labels.size()) + " rows");
  }
  std::vector<std::size_t> assignment(labels.size());
  Rng rng(seed);
  std::size_t offset = 0;
  for (Label label : {Label::Safe, Label::Phishing}) {
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) positions.push_back(i);
    }
    rng.shuffle(positions);
    // Continue the round-robin across classes so fold sizes stay even.
    for (std::size_t k = 0; k < positions.size(); ++k) assignment[positions[k]] = (offset + k) % folds;
    offset += positions.size();
  }
  return assignment;
}

GridSearchResult grid_search(ModelKind kind, const ParamGrid& grid, const FeatureMatrix& m,
                             std::size_t folds, std::uint64_t seed, const Hyperparams* base) {
  if (grid.empty()) throw ConfigError("grid search needs a non-empty grid");
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw ConfigError("grid entry '" + key + "' has no candidates");
  }
  if (base && base->kind() != kind) throw ConfigError("base hyperparameters are for another model");
  const auto assignment = stratified_folds(m.labels, folds, seed);

  std::vector<std::vector<std::size_t>> train_rows(folds), test_rows(folds);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    for (std::size_t f = 0; f < folds; ++f) (assignment[i] == f ? test_rows : train_rows)[f].push_back(i);
  }

  std::vector<std::pair<std::string, const std::vector<std::string>*>> axes;
  for (const auto& [key, values] : grid) axes.emplace_back(key, &values);
  std::vector<std::size_t> odometer(axes.size(), 0);

  GridSearchResult result;
  bool first = true;
  while (true) {
    Hyperparams hp = base ? *base : Hyperparams::defaults(kind);
    for (std::size_t a = 0; a < axes.size(); ++a) hp.set(axes[a].first, (*axes[a].second)[odometer[a]]);

    double total = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      const FeatureMatrix fit = m.subset(train_rows[f]);
      const FeatureMatrix held = m.subset(test_rows[f]);
      const auto predicted = predict(train(fit, hp, seed), held);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == held.labels[i];
      total += static_cast<double>(correct) / static_cast<double>(held.rows());
    }
    const double accuracy = total / static_cast<double>(folds);
    result.evaluated.emplace_back(hp, accuracy);
    if (first || accuracy > result.best_accuracy) {
      result.best = hp;
      result.best_accuracy = accuracy;
      first = false;
    }

    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++odometer[a] < axes[a].second->size()) break;
      odometer[a] = 0;
      if (a == 0) return result;
    }
    if (axes.empty()) return result;
  }
}

}  // namespace osintphish
