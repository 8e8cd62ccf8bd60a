/**
 * @file models.hpp
 * @brief The five classifiers (DT, RF, SVM, GBT, MNB), prediction, grid
 *        search and JSON model persistence.
 *
 * Phishing is class 1 and Safe class 0. Every tie resolves to Safe. Training
 * is a deterministic function of (matrix, hyperparameters, seed).
 */
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "osintphish/features.hpp"
#include "osintphish/hyperparams.hpp"
#include "osintphish/tree.hpp"

namespace osintphish {

struct DecisionTreeModel {
  Tree tree;
};

struct ForestModel {
  std::vector<Tree> trees;
};

struct SvmModel {
  bool standardize = true;
  std::vector<double> mean;   ///< per-column training mean
  std::vector<double> scale;  ///< per-column training std (1 for constant columns)
  double gamma = 0.1;
  double C = 100;
  std::vector<SparseVector> support;  ///< support vectors in input space
  std::vector<std::vector<double>> support_scaled;  ///< dense standardized copies, rebuilt on load
  std::vector<double> alpha;          ///< dual variables, in [0, C]
  std::vector<int> y;                 ///< +1 Phishing, -1 Safe
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct BoostedModel {
  double base_score = 0.0;  ///< initial log-odds
  double learning_rate = 0.3;
  std::vector<Tree> trees;
  std::vector<double> train_logloss;  ///< after round 0 (prior) and every tree
};

struct NaiveBayesModel {
  double log_prior[2] = {0.0, 0.0};
  std::vector<double> log_likelihood[2];  ///< per class, per column
};

struct TrainedModel {
  Hyperparams hyperparams = Hyperparams::defaults(ModelKind::MNB);
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::variant<DecisionTreeModel, ForestModel, SvmModel, BoostedModel, NaiveBayesModel> state;

  ModelKind kind() const { return hyperparams.kind(); }
};

TrainedModel train_decision_tree(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed = 0);
TrainedModel train_random_forest(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed);
TrainedModel train_svm(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed = 0);
TrainedModel train_gbt(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed = 0);
TrainedModel train_mnb(const FeatureMatrix& m, const Hyperparams& hp);

/// Dispatches on hp.kind().
TrainedModel train(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed);

/// One label per row. Throws DataError when the column count differs from
/// the training matrix.
std::vector<Label> predict(const TrainedModel& model, const FeatureMatrix& m);

/// MNB joint log-likelihood per class {Safe, Phishing} for one row.
std::array<double, 2> mnb_scores(const NaiveBayesModel& model, const FeatureMatrix::RowView& row);
/// SVM decision value; positive means Phishing.
double svm_decision(const SvmModel& model, const FeatureMatrix::RowView& row);
/// Boosted log-odds for one dense row.
double gbt_margin(const BoostedModel& model, std::span<const double> dense_row);

struct SvmDual {
  std::vector<double> alpha;
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Soft-margin RBF dual by SMO with maximal-violating-pair (second order)
/// working-set selection. Stops when the maximal KKT violation is below
/// `tol` or after max_sweeps * n pair updates.
SvmDual solve_svm_dual(const std::vector<std::vector<double>>& rows, const std::vector<int>& y,
                       double C, double gamma, double tol, std::size_t max_sweeps);

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);
void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

/// Stratified k-fold assignment: fold index per row.
std::vector<std::size_t> stratified_folds(const std::vector<Label>& labels, std::size_t folds,
                                          std::uint64_t seed);

struct GridSearchResult {
  Hyperparams best = Hyperparams::defaults(ModelKind::MNB);
  double best_accuracy = 0.0;
  std::vector<std::pair<Hyperparams, double>> evaluated;  ///< iteration order
};

/// Exhaustive search of the grid's Cartesian product (parameters in name
/// order, the last name varying fastest) by mean stratified k-fold accuracy.
/// Ties keep the earliest grid point.
GridSearchResult grid_search(ModelKind kind, const ParamGrid& grid, const FeatureMatrix& m,
                             std::size_t folds, std::uint64_t seed,
                             const Hyperparams* base = nullptr);

}  // namespace osintphish
