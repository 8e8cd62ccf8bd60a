/**
 * @file eval.hpp
 * @brief Confusion matrices, the four scalar metrics and report rendering.
 *
 * Phishing is the positive class. Matrices are oriented rows = actual
 * {Safe, Phishing}, columns = predicted {Safe, Phishing}.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osintphish/corpus.hpp"
#include "osintphish/features.hpp"
#include "osintphish/hyperparams.hpp"

namespace osintphish {

struct ConfusionMatrix {
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tp = 0;

  std::size_t total() const { return tn + fp + fn + tp; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws DataError on empty input or a length mismatch.
ConfusionMatrix confusion(const std::vector<Label>& actual, const std::vector<Label>& predicted);

/// An exact fraction num/den, rendered as a percentage.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 0;  ///< 0 means the metric is defined as 0

  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  /// Percentage with 2 decimals, rounded half to even on the exact rational.
  std::string percent() const;
};

struct Metrics {
  Ratio accuracy;
  Ratio precision;
  Ratio recall;
  Ratio f1;  ///< 2tp / (2tp + fp + fn), equal to 2PR/(P+R)
};

/// Throws DataError when the matrix is empty.
Metrics metrics(const ConfusionMatrix& cm);

/// Rounds num/den * 100 to 2 decimals, half to even, without floating point.
std::string percent_2dp(std::uint64_t num, std::uint64_t den);

struct EvaluationReport {
  std::string classifier;  ///< model_name(kind)
  std::string dataset;     ///< dataset group, e.g. "English OSINT"
  std::uint64_t seed = 0;
  std::string hyperparams;  ///< Hyperparams::describe()
  std::vector<std::string> columns;
  std::size_t train_rows = 0;
  ConfusionMatrix cm;
  Metrics scores;
};

/// Fits on split.train, predicts split.test and scores the predictions.
EvaluationReport run_experiment(const FeaturizedSplit& split, const Hyperparams& hp, std::uint64_t seed,
                                const std::string& dataset);

/// reports.csv: classifier,dataset,accuracy,f1,precision,recall,tn,fp,fn,tp,seed
std::string render_reports_csv(const std::vector<EvaluationReport>& reports);

/// Per-dataset tables of Accuracy/F1/Precision/Recall followed by the 2x2
/// matrices.
std::string render_report(const std::vector<EvaluationReport>& reports);

}  // namespace osintphish
