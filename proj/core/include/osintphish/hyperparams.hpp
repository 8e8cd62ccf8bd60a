#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace osintphish {

enum class ModelKind { DT, RF, SVM, GBT, MNB };

inline constexpr ModelKind kAllModels[] = {ModelKind::DT, ModelKind::RF, ModelKind::SVM,
                                           ModelKind::GBT, ModelKind::MNB};

std::string_view model_name(ModelKind kind);
/// Case-insensitive; also accepts "xgboost" for GBT and "multinomialnb" for MNB.
ModelKind parse_model_kind(std::string_view name);

/// Keyed parameters of one model kind. Values are stored as canonical text so
/// the map can be persisted, overridden from the command line and grid
/// searched without per-model plumbing.
///
/// Defaults are the tuned values used for every experiment:
///   DT  criterion=entropy max_depth=none min_samples_split=5 min_samples_leaf=1
///   RF  n_estimators=100 max_depth=none min_samples_split=2 min_samples_leaf=1
///   SVM C=100 kernel=rbf gamma=0.1
///   GBT n_estimators=100 eval_metric=logloss
///   MNB alpha=0.1
/// plus implementation parameters (RF criterion, bootstrap and max_features;
/// SVM standardize, tol and max_sweeps; GBT learning_rate, max_depth and
/// lambda).
class Hyperparams {
 public:
  static Hyperparams defaults(ModelKind kind);

  ModelKind kind() const { return kind_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Throws ConfigError for an unknown key or an invalid value.
  void set(const std::string& key, const std::string& value);
  /// Applies "key=value".
  void set(std::string_view assignment);

  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  bool flag(const std::string& key) const;
  /// Depth limit; nullopt for "none".
  std::optional<std::size_t> depth(const std::string& key) const;

  /// "k1=v1 k2=v2" in key order.
  std::string describe() const;

  bool operator==(const Hyperparams&) const = default;

 private:
  explicit Hyperparams(ModelKind kind) : kind_(kind) {}
  ModelKind kind_;
  std::map<std::string, std::string> values_;
};

/// Candidate values per parameter name.
using ParamGrid = std::map<std::string, std::vector<std::string>>;

/// Small grid around the default values, used when grid search is requested
/// without an explicit grid.
ParamGrid default_grid(ModelKind kind);

/// Parses "key=v1,v2,..." into a grid entry.
void add_grid_entry(ParamGrid& grid, std::string_view spec);

}  // namespace osintphish
