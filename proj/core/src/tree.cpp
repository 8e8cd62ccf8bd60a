#include "osintphish/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "osintphish/error.hpp"

namespace osintphish {
namespace {

// Gains closer than this count as tied, so rounding noise cannot override
// the first-feature, smallest-threshold rule.
constexpr double kTieTolerance = 1e-12;

double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

/// Midpoint of two distinct values, never rounding up to `hi`.
double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

struct ClassBuilder {
  const Columns& columns;
  std::span<const int> labels;
  const ClassTreeParams& params;
  Rng* rng;
  Tree tree;

  int grow(std::vector<std::size_t>& samples, std::size_t depth) {
    double pos = 0;
    for (std::size_t s : samples) pos += labels[s];
    const double neg = static_cast<double>(samples.size()) - pos;
    const int node = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[node].value = pos > neg ? 1.0 : 0.0;

    const bool pure = pos == 0 || neg == 0;
    const bool depth_reached = params.max_depth && depth >= *params.max_depth;
    if (pure || depth_reached || samples.size() < params.min_samples_split) return node;

    const SplitChoice split = best_class_split(columns, labels, samples, params, rng);
    if (split.feature < 0) return node;

    std::vector<std::size_t> left, right;
    const auto& col = columns[split.feature];
    for (std::size_t s : samples) (col[s] <= split.threshold ? left : right).push_back(s);
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes[node] = {split.feature, split.threshold, -1, -1, 0.0};
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree.nodes[node].left = l;
    tree.nodes[node].right = r;
    return node;
  }
};

struct BoostBuilder {
  const Columns& columns;
  std::span<const double> g;
  std::span<const double> h;
  const BoostTreeParams& params;
  Tree tree;

  double score(double G, double H) const { return G * G / (H + params.lambda); }

  int grow(std::vector<std::size_t>& samples, std::size_t depth) {
    double G = 0, H = 0;
    for (std::size_t s : samples) {
      G += g[s];
      H += h[s];
    }
    const int node = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[node].value = H + params.lambda > 0 ? -G / (H + params.lambda) : 0.0;
    if (depth >= params.max_depth || samples.size() < 2) return node;

    const double parent = score(G, H);
    int best_feature = -1;
    double best_threshold = 0, best_gain = 1e-12;
    std::vector<std::size_t> order(samples);
    for (std::size_t f = 0; f < columns.size(); ++f) {
      const auto& col = columns[f];
      const double first = col[samples.front()];
      if (std::all_of(samples.begin(), samples.end(), [&](std::size_t s) { return col[s] == first; })) continue;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
      double GL = 0, HL = 0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        GL += g[order[k]];
        HL += h[order[k]];
        const double here = col[order[k]], next = col[order[k + 1]];
        if (here == next) continue;
        const double gain = score(GL, HL) + score(G - GL, H - HL) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = midpoint(here, next);
        }
      }
    }
    if (best_feature < 0) return node;

    std::vector<std::size_t> left, right;
    for (std::size_t s : samples) (columns[best_feature][s] <= best_threshold ? left : right).push_back(s);
    tree.nodes[node] = {best_feature, best_threshold, -1, -1, 0.0};
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree.nodes[node].left = l;
    tree.nodes[node].right = r;
    return node;
  }
};

std::size_t depth_from(const Tree& tree, int node) {
  const auto& n = tree.nodes[node];
  if (n.feature < 0) return 0;
  return 1 + std::max(depth_from(tree, n.left), depth_from(tree, n.right));
}

nlohmann::json node_to_json(const Tree& tree, int node) {
  const auto& n = tree.nodes[node];
  if (n.feature < 0) return {{"value", n.value}};
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"left", node_to_json(tree, n.left)},
          {"right", node_to_json(tree, n.right)}};
}

int node_from_json(Tree& tree, const nlohmann::json& j) {
  const int node = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({});
  if (j.contains("value")) {
    tree.nodes[node].value = j.at("value").get<double>();
    return node;
  }
  tree.nodes[node].feature = j.at("feature").get<int>();
  tree.nodes[node].threshold = j.at("threshold").get<double>();
  const int l = node_from_json(tree, j.at("left"));
  const int r = node_from_json(tree, j.at("right"));
  tree.nodes[node].left = l;
  tree.nodes[node].right = r;
  return node;
}

}  // namespace

std::size_t Tree::depth() const { return nodes.empty() ? 0 : depth_from(*this, 0); }

std::size_t Tree::leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

nlohmann::json tree_to_json(const Tree& tree) {
  if (tree.nodes.empty()) return nullptr;
  return node_to_json(tree, 0);
}

Tree tree_from_json(const nlohmann::json& j) {
  Tree tree;
  if (!j.is_null()) node_from_json(tree, j);
  return tree;
}

double impurity(Criterion criterion, double negatives, double positives) {
  const double n = negatives + positives;
  if (n <= 0) return 0.0;
  const double p = positives / n, q = negatives / n;
  if (criterion == Criterion::Gini) return 1.0 - p * p - q * q;
  return entropy_term(p) + entropy_term(q);
}

SplitChoice best_class_split(const Columns& columns, std::span<const int> labels,
                             std::span<const std::size_t> samples, const ClassTreeParams& params,
                             Rng* rng) {
  const std::size_t n_features = columns.size();
  const double n = static_cast<double>(samples.size());
  double total_pos = 0;
  for (std::size_t s : samples) total_pos += labels[s];
  const double parent = impurity(params.criterion, n - total_pos, total_pos);

  const bool subsample = params.max_features > 0 && params.max_features < n_features && rng != nullptr;
  std::vector<std::size_t> visit(n_features);
  std::iota(visit.begin(), visit.end(), 0);

  SplitChoice best;
  best.gain = -1.0;
  std::vector<std::size_t> order(samples.begin(), samples.end());
  std::size_t evaluated = 0;
  for (std::size_t v = 0; v < n_features; ++v) {
    if (subsample) {
      if (evaluated >= params.max_features) break;
      std::swap(visit[v], visit[v + rng->below(n_features - v)]);
    }
    const std::size_t f = visit[v];
    const auto& col = columns[f];
    const double first = col[samples.front()];
    if (std::all_of(samples.begin(), samples.end(), [&](std::size_t s) { return col[s] == first; })) continue;
    ++evaluated;

    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    double left_pos = 0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      left_pos += labels[order[k]];
      const double here = col[order[k]], next = col[order[k + 1]];
      if (here == next) continue;
      const double nl = static_cast<double>(k + 1), nr = n - nl;
      if (nl < static_cast<double>(params.min_samples_leaf) || nr < static_cast<double>(params.min_samples_leaf)) continue;
      const double right_pos = total_pos - left_pos;
      const double gain = parent - (nl / n) * impurity(params.criterion, nl - left_pos, left_pos) -
                          (nr / n) * impurity(params.criterion, nr - right_pos, right_pos);
      if (gain > best.gain + kTieTolerance) {
        best = {static_cast<int>(f), midpoint(here, next), gain};
      }
    }
  }
  if (best.feature < 0) best.gain = 0.0;
  return best;
}

Tree build_class_tree(const Columns& columns, std::span<const int> labels,
                      std::vector<std::size_t> samples, const ClassTreeParams& params, Rng* rng) {
  if (samples.empty()) throw DataError("cannot grow a tree on zero samples");
  ClassBuilder builder{columns, labels, params, rng, {}};
  builder.grow(samples, 0);
  return std::move(builder.tree);
}

Tree build_boost_tree(const Columns& columns, std::span<const double> gradients,
                      std::span<const double> hessians, const BoostTreeParams& params) {
  std::vector<std::size_t> samples(gradients.size());
  std::iota(samples.begin(), samples.end(), 0);
  if (samples.empty()) throw DataError("cannot grow a tree on zero samples");
  BoostBuilder builder{columns, gradients, hessians, params, {}};
  builder.grow(samples, 0);
  return std::move(builder.tree);
}

}  // namespace osintphish
