/**
 * @file tree.hpp
 * @brief Binary decision trees shared by the DT, RF and GBT learners.
 *
 * Split candidates are midpoints between consecutive distinct sorted values;
 * samples with value <= threshold go left.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "osintphish/rng.hpp"

namespace osintphish {

struct TreeNode {
  int feature = -1;  ///< -1 for a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  ///< class (0/1) or regression output at a leaf
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root

  /// `feature(j)` returns the value of feature j for the sample.
  template <typename FeatureFn>
  double evaluate(FeatureFn&& feature) const {
    int at = 0;
    while (nodes[at].feature >= 0) {
      at = feature(nodes[at].feature) <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
    }
    return nodes[at].value;
  }
  std::size_t depth() const;
  std::size_t leaves() const;
  bool operator==(const Tree&) const = default;
};

/// Nested {"feature","threshold","left","right"} / {"value"} objects.
nlohmann::json tree_to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& j);

enum class Criterion { Entropy, Gini };

/// Impurity of a two-class node with the given counts; entropy in bits.
double impurity(Criterion criterion, double negatives, double positives);

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

struct ClassTreeParams {
  Criterion criterion = Criterion::Entropy;
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  /// Features examined per split; 0 or >= column count means all, in index
  /// order. Otherwise features are visited in random order until this many
  /// non-constant ones were evaluated.
  std::size_t max_features = 0;
};

/// Dense column-major features: columns[j][i] is feature j of sample i.
using Columns = std::vector<std::vector<double>>;

/// Best information-gain split of the given samples (repeats allowed), or
/// feature -1 when no split leaves min_samples_leaf on both sides. Ties keep
/// the first feature visited and the smallest threshold.
SplitChoice best_class_split(const Columns& columns, std::span<const int> labels,
                             std::span<const std::size_t> samples, const ClassTreeParams& params,
                             Rng* rng);

/// CART classification tree. Leaves predict the majority class, ties -> 0.
Tree build_class_tree(const Columns& columns, std::span<const int> labels,
                      std::vector<std::size_t> samples, const ClassTreeParams& params, Rng* rng);

struct BoostTreeParams {
  std::size_t max_depth = 6;
  double lambda = 1.0;
};

/// Regression tree on gradient statistics. Splits maximize the regularized
/// gain G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l) and require it positive;
/// leaves hold the Newton step -G/(H+l).
Tree build_boost_tree(const Columns& columns, std::span<const double> gradients,
                      std::span<const double> hessians, const BoostTreeParams& params);

}  // namespace osintphish
