#include "osintphish/eval.hpp"

#include <iomanip>
#include <sstream>

#include "osintphish/csv.hpp"
#include "osintphish/error.hpp"
#include "osintphish/models.hpp"

namespace osintphish {

ConfusionMatrix confusion(const std::vector<Label>& actual, const std::vector<Label>& predicted) {
  if (actual.size() != predicted.size()) {
    throw DataError("confusion: " + std::to_string(actual.size()) + " actual labels but " +
                    std::to_string(predicted.size()) + " predictions");
  }
  if (actual.empty()) throw DataError("confusion: no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const bool truth = actual[i] == Label::Phishing;
    const bool guess = predicted[i] == Label::Phishing;
    if (truth) {
      ++(guess ? cm.tp : cm.fn);
    } else {
      ++(guess ? cm.fp : cm.tn);
    }
  }
  return cm;
}

std::string percent_2dp(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return "0.00";
  const unsigned __int128 scaled = static_cast<unsigned __int128>(num) * 10000;
  auto hundredths = static_cast<std::uint64_t>(scaled / den);
  const auto rem = static_cast<std::uint64_t>(scaled % den);
  const unsigned __int128 twice = static_cast<unsigned __int128>(rem) * 2;
  if (twice > den || (twice == den && hundredths % 2 == 1)) ++hundredths;
  std::ostringstream out;
  out << hundredths / 100 << '.' << std::setw(2) << std::setfill('0') << hundredths % 100;
  return out.str();
}

std::string Ratio::percent() const { return percent_2dp(num, den); }

Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw DataError("metrics: empty confusion matrix");
  Metrics m;
  m.accuracy = {cm.tp + cm.tn, cm.total()};
  m.precision = {cm.tp, cm.tp + cm.fp};
  m.recall = {cm.tp, cm.tp + cm.fn};
  m.f1 = cm.tp == 0 ? Ratio{0, 0} : Ratio{2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn};
  return m;
}

EvaluationReport run_experiment(const FeaturizedSplit& split, const Hyperparams& hp, std::uint64_t seed,
                                const std::string& dataset) {
  const TrainedModel model = train(split.train, hp, seed);
  const auto predicted = predict(model, split.test);
  EvaluationReport report;
  report.classifier = std::string(model_name(hp.kind()));
  report.dataset = dataset;
  report.seed = seed;
  report.hyperparams = hp.describe();
  report.columns = split.train.column_names;
  report.train_rows = split.train.rows();
  report.cm = confusion(split.test.labels, predicted);
  report.scores = metrics(report.cm);
  return report;
}

std::string render_reports_csv(const std::vector<EvaluationReport>& reports) {
  csv::Table table;
  table.header = {"classifier", "dataset", "accuracy", "f1", "precision", "recall", "tn", "fp", "fn", "tp", "seed"};
  for (const auto& r : reports) {
    table.rows.push_back({r.classifier, r.dataset, r.scores.accuracy.percent(), r.scores.f1.percent(),
                          r.scores.precision.percent(), r.scores.recall.percent(), std::to_string(r.cm.tn),
                          std::to_string(r.cm.fp), std::to_string(r.cm.fn), std::to_string(r.cm.tp),
                          std::to_string(r.seed)});
  }
  return csv::to_string(table);
}

std::string render_report(const std::vector<EvaluationReport>& reports) {
  std::ostringstream out;
  auto row = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                 const std::string& e, const std::string& f) {
    out << std::left << std::setw(12) << a << std::setw(16) << b << std::right << std::setw(10) << c
        << std::setw(10) << d << std::setw(11) << e << std::setw(10) << f << '\n';
  };
  row("Classifier", "Dataset", "Accuracy", "F1", "Precision", "Recall");
  for (const auto& r : reports) {
    row(r.classifier, r.dataset, r.scores.accuracy.percent(), r.scores.f1.percent(), r.scores.precision.percent(),
        r.scores.recall.percent());
  }
  for (const auto& r : reports) {
    out << '\n' << r.classifier << " / " << r.dataset << " (rows actual, columns predicted)\n";
    out << "             Safe  Phishing\n";
    out << "Safe     " << std::setw(8) << r.cm.tn << std::setw(10) << r.cm.fp << '\n';
    out << "Phishing " << std::setw(8) << r.cm.fn << std::setw(10) << r.cm.tp << '\n';
  }
  return out.str();
}

}  // namespace osintphish
