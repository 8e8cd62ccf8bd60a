#include "osintphish/hyperparams.hpp"

#include <cmath>

#include "osintphish/error.hpp"
#include "osintphish/format.hpp"

namespace osintphish {
namespace {

enum class Type { Positive, PositiveInt, Depth, Flag, Choice, NonNegative };

struct ParamSpec {
  const char* key;
  const char* default_value;
  Type type;
  std::vector<std::string> choices = {};
};

const std::vector<ParamSpec>& specs(ModelKind kind) {
  static const std::vector<ParamSpec> dt = {
      {"criterion", "entropy", Type::Choice, {"entropy", "gini"}},
      {"max_depth", "none", Type::Depth},
      {"min_samples_split", "5", Type::PositiveInt},
      {"min_samples_leaf", "1", Type::PositiveInt},
  };
  static const std::vector<ParamSpec> rf = {
      {"n_estimators", "100", Type::PositiveInt},
      {"criterion", "gini", Type::Choice, {"entropy", "gini"}},
      {"max_depth", "none", Type::Depth},
      {"min_samples_split", "2", Type::PositiveInt},
      {"min_samples_leaf", "1", Type::PositiveInt},
      {"max_features", "sqrt", Type::Choice, {"sqrt", "all"}},
      {"bootstrap", "true", Type::Flag},
  };
  static const std::vector<ParamSpec> svm = {
      {"C", "100", Type::Positive},
      {"kernel", "rbf", Type::Choice, {"rbf"}},
      {"gamma", "0.1", Type::Positive},
      {"standardize", "true", Type::Flag},
      {"tol", "0.001", Type::Positive},
      {"max_sweeps", "10000", Type::PositiveInt},
  };
  static const std::vector<ParamSpec> gbt = {
      {"n_estimators", "100", Type::PositiveInt},
      {"objective", "binary:logistic", Type::Choice, {"binary:logistic"}},
      {"eval_metric", "logloss", Type::Choice, {"logloss"}},
      {"learning_rate", "0.3", Type::Positive},
      {"max_depth", "6", Type::PositiveInt},
      {"lambda", "1", Type::NonNegative},
  };
  static const std::vector<ParamSpec> mnb = {
      {"alpha", "0.1", Type::Positive},
  };
  switch (kind) {
    case ModelKind::DT: return dt;
    case ModelKind::RF: return rf;
    case ModelKind::SVM: return svm;
    case ModelKind::GBT: return gbt;
    case ModelKind::MNB: return mnb;
  }
  return mnb;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string canonical(const ParamSpec& spec, ModelKind kind, const std::string& value) {
  const std::string where = std::string(model_name(kind)) + "." + spec.key;
  auto fail = [&](const std::string& why) -> std::string {
    throw ConfigError("invalid value '" + value + "' for " + where + ": " + why);
  };
  auto as_number = [&]() {
    try {
      return parse_double(value, where);
    } catch (const DataError&) {
      fail("not a number");
    }
    return 0.0;
  };
  switch (spec.type) {
    case Type::Choice: {
      const std::string v = lower(value);
      for (const auto& c : spec.choices) {
        if (v == c) return c;
      }
      std::string allowed;
      for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : "|") + c;
      return fail("expected one of " + allowed);
    }
    case Type::Flag: {
      const std::string v = lower(value);
      if (v == "true" || v == "1" || v == "yes") return "true";
      if (v == "false" || v == "0" || v == "no") return "false";
      return fail("expected true or false");
    }
    case Type::Depth:
      if (const std::string v = lower(value); v == "none" || v == "inf") return "none";
      [[fallthrough]];
    case Type::PositiveInt: {
      const double d = as_number();
      if (!(d >= 1) || d != std::floor(d) || d > 1e9) fail("expected a positive integer");
      return std::to_string(static_cast<long long>(d));
    }
    case Type::Positive: {
      const double d = as_number();
      if (!(d > 0) || !std::isfinite(d)) fail("expected a positive number");
      return format_double(d);
    }
    case Type::NonNegative: {
      const double d = as_number();
      if (!(d >= 0) || !std::isfinite(d)) fail("expected a non-negative number");
      return format_double(d);
    }
  }
  return value;
}

}  // namespace

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::DT: return "DT";
    case ModelKind::RF: return "RF";
    case ModelKind::SVM: return "SVM";
    case ModelKind::GBT: return "GBT";
    case ModelKind::MNB: return "MNB";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  const std::string n = lower(name);
  if (n == "dt" || n == "decision_tree") return ModelKind::DT;
  if (n == "rf" || n == "random_forest") return ModelKind::RF;
  if (n == "svm") return ModelKind::SVM;
  if (n == "gbt" || n == "xgboost") return ModelKind::GBT;
  if (n == "mnb" || n == "multinomialnb") return ModelKind::MNB;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected DT, RF, SVM, GBT or MNB)");
}

Hyperparams Hyperparams::defaults(ModelKind kind) {
  Hyperparams hp(kind);
  for (const auto& spec : specs(kind)) hp.values_.emplace(spec.key, spec.default_value);
  return hp;
}

void Hyperparams::set(const std::string& key, const std::string& value) {
  for (const auto& spec : specs(kind_)) {
    if (key == spec.key) {
      values_[key] = canonical(spec, kind_, value);
      return;
    }
  }
  throw ConfigError("unknown hyperparameter '" + key + "' for " + std::string(model_name(kind_)));
}

void Hyperparams::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(std::string(assignment.substr(0, eq)), std::string(assignment.substr(eq + 1)));
}

const std::string& Hyperparams::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("hyperparameter '" + key + "' not defined for " + std::string(model_name(kind_)));
  }
  return it->second;
}

double Hyperparams::number(const std::string& key) const { return parse_double(text(key), key); }

std::size_t Hyperparams::count(const std::string& key) const {
  return static_cast<std::size_t>(parse_int(text(key), key));
}

bool Hyperparams::flag(const std::string& key) const { return text(key) == "true"; }

std::optional<std::size_t> Hyperparams::depth(const std::string& key) const {
  if (text(key) == "none") return std::nullopt;
  return count(key);
}

std::string Hyperparams::describe() const {
  std::string out;
  for (const auto& [k, v] : values_) out += (out.empty() ? "" : " ") + k + "=" + v;
  return out;
}

ParamGrid default_grid(ModelKind kind) {
  switch (kind) {
    case ModelKind::DT:
      return {{"criterion", {"entropy", "gini"}}, {"min_samples_split", {"2", "5", "10"}}};
    case ModelKind::RF:
      return {{"n_estimators", {"50", "100"}}, {"min_samples_split", {"2", "5"}}};
    case ModelKind::SVM:
      return {{"C", {"1", "10", "100"}}, {"gamma", {"0.01", "0.1"}}};
    case ModelKind::GBT:
      return {{"n_estimators", {"50", "100"}}, {"learning_rate", {"0.1", "0.3"}}};
    case ModelKind::MNB:
      return {{"alpha", {"0.01", "0.1", "1"}}};
  }
  return {};
}

void add_grid_entry(ParamGrid& grid, std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == spec.size()) {
    throw ConfigError("expected key=v1,v2,... got '" + std::string(spec) + "'");
  }
  auto& values = grid[std::string(spec.substr(0, eq))];
  std::string_view rest = spec.substr(eq + 1);
  while (true) {
    const auto comma = rest.find(',');
    values.emplace_back(rest.substr(0, comma));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
}

}  // namespace osintphish
