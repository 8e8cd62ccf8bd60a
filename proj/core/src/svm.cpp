#include <algorithm>
#include <cmath>
#include <limits>

#include "osintphish/error.hpp"
#include "osintphish/models.hpp"

namespace osintphish {
namespace {

double rbf(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    d += diff * diff;
  }
  return std::exp(-gamma * d);
}

constexpr double kTau = 1e-12;

}  // namespace

SvmDual solve_svm_dual(const std::vector<std::vector<double>>& rows, const std::vector<int>& y,
                       double C, double gamma, double tol, std::size_t max_sweeps) {
  const std::size_t n = rows.size();
  if (n != y.size()) throw DataError("SVM rows and labels differ in length");

  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    K[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) K[i * n + j] = K[j * n + i] = rbf(rows[i], rows[j], gamma);
  }
  auto k = [&](std::size_t i, std::size_t j) { return K[i * n + j]; };

  SvmDual out;
  std::vector<double>& a = out.alpha;
  a.assign(n, 0.0);
  std::vector<double> G(n, -1.0);  // gradient of 1/2 a'Qa - e'a

  auto in_up = [&](std::size_t t) { return (y[t] == 1 && a[t] < C) || (y[t] == -1 && a[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] == 1 && a[t] > 0) || (y[t] == -1 && a[t] < C); };

  const std::size_t max_iter = std::max<std::size_t>(1, max_sweeps * n);
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    double g_max = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * G[t] > g_max) {
        g_max = -y[t] * G[t];
        i = t;
      }
    }
    double g_min = std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n && i < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * G[t];
      g_min = std::min(g_min, v);
      if (v < g_max) {
        const double b = g_max - v;
        double quad = k(i, i) + k(t, t) - 2.0 * k(i, t);
        if (quad <= 0) quad = kTau;
        const double obj = -(b * b) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (i == n || j == n || g_max - g_min < tol) {
      out.converged = true;
      break;
    }

    const double old_i = a[i], old_j = a[j];
    double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
    if (quad <= 0) quad = kTau;
    if (y[i] != y[j]) {
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) { a[j] = 0; a[i] = diff; }
      } else {
        if (a[i] < 0) { a[i] = 0; a[j] = -diff; }
      }
      if (diff > 0) {
        if (a[i] > C) { a[i] = C; a[j] = C - diff; }
      } else {
        if (a[j] > C) { a[j] = C; a[i] = C + diff; }
      }
    } else {
      const double delta = (G[i] - G[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > C) {
        if (a[i] > C) { a[i] = C; a[j] = sum - C; }
      } else {
        if (a[j] < 0) { a[j] = 0; a[i] = sum; }
      }
      if (sum > C) {
        if (a[j] > C) { a[j] = C; a[i] = sum - C; }
      } else {
        if (a[i] < 0) { a[i] = 0; a[j] = sum; }
      }
    }
    const double di = a[i] - old_i, dj = a[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      G[t] += y[t] * (y[i] * k(t, i) * di + y[j] * k(t, j) * dj);
    }
  }

  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0;
  std::size_t free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (a[t] >= C) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (a[t] <= 0) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free;
      sum_free += yg;
    }
  }
  const double rho = free > 0 ? sum_free / static_cast<double>(free) : (ub + lb) / 2.0;
  out.bias = std::isfinite(rho) ? -rho : 0.0;
  return out;
}

TrainedModel train_svm(const FeatureMatrix& m, const Hyperparams& hp, std::uint64_t seed) {
  if (hp.kind() != ModelKind::SVM) throw ConfigError("train_svm needs SVM hyperparameters");
  m.validate();
  std::vector<int> y;
  std::size_t positives = 0;
  for (Label l : m.labels) {
    y.push_back(l == Label::Phishing ? 1 : -1);
    positives += l == Label::Phishing;
  }
  if (positives == 0 || positives == m.rows()) throw DataError("SVM training needs both classes present");

  SvmModel model;
  model.standardize = hp.flag("standardize");
  model.gamma = hp.number("gamma");
  model.C = hp.number("C");
  model.mean.assign(m.cols, 0.0);
  model.scale.assign(m.cols, 1.0);
  if (model.standardize) {
    const auto columns = m.dense_columns();
    const double n = static_cast<double>(m.rows());
    for (std::size_t c = 0; c < m.cols; ++c) {
      double mean = 0;
      for (double v : columns[c]) mean += v;
      mean /= n;
      double var = 0;
      for (double v : columns[c]) var += (v - mean) * (v - mean);
      var /= n;
      model.mean[c] = mean;
      model.scale[c] = var > 0 ? std::sqrt(var) : 1.0;
    }
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.dense_row(r);
    for (std::size_t c = 0; c < m.cols; ++c) row[c] = (row[c] - model.mean[c]) / model.scale[c];
    rows.push_back(std::move(row));
  }

  const SvmDual dual = solve_svm_dual(rows, y, model.C, model.gamma, hp.number("tol"), hp.count("max_sweeps"));
  model.bias = dual.bias;
  model.iterations = dual.iterations;
  model.converged = dual.converged;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (dual.alpha[r] <= 0) continue;
    const auto view = m.row(r);
    model.support.push_back({{view.indices.begin(), view.indices.end()}, {view.values.begin(), view.values.end()}});
    model.support_scaled.push_back(std::move(rows[r]));
    model.alpha.push_back(dual.alpha[r]);
    model.y.push_back(y[r]);
  }

  TrainedModel trained;
  trained.hyperparams = hp;
  trained.seed = seed;
  trained.columns = m.column_names;
  trained.state = std::move(model);
  return trained;
}

double svm_decision(const SvmModel& model, const FeatureMatrix::RowView& row) {
  std::vector<double> x(model.mean.size());
  for (std::size_t c = 0; c < x.size(); ++c) x[c] = -model.mean[c] / model.scale[c];
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    const auto c = row.indices[k];
    x[c] = (row.values[k] - model.mean[c]) / model.scale[c];
  }
  double f = model.bias;
  for (std::size_t s = 0; s < model.support_scaled.size(); ++s) {
    f += model.alpha[s] * model.y[s] * rbf(model.support_scaled[s], x, model.gamma);
  }
  return f;
}

}  // namespace osintphish
