#include "syncomp/treemetrics.hpp"

#include <algorithm>
#include <vector>

namespace syncomp {

namespace {

bool is_punct(const Token& t) { return t.upos == "PUNCT"; }

// Dependent counts per token index, honoring the structure filter.
std::vector<int> dependent_counts(const DepTree& tree, const MetricOptions& opts) {
  std::vector<int> counts(tree.size(), 0);
  for (const auto& t : tree.tokens) {
    if (t.head == 0) continue;
    if (t.head < 0 || t.head > static_cast<int>(tree.size())) {
      throw InvalidTreeError(validate_tree(tree));
    }
    if (opts.exclude_punct_structure && is_punct(t)) continue;
    ++counts[t.head - 1];
  }
  return counts;
}

// Arc distance from the virtual root for every token, memoized over head links.
std::vector<int> root_distances(const DepTree& tree) {
  const int n = static_cast<int>(tree.size());
  std::vector<int> dist(n, 0);
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    if (dist[i] != 0) continue;
    int v = i;
    while (dist[v] == 0) {
      stack.push_back(v);
      if (static_cast<int>(stack.size()) > n) throw InvalidTreeError(validate_tree(tree));
      const int h = tree.tokens[v].head;
      if (h == 0) break;
      if (h < 0 || h > n) throw InvalidTreeError(validate_tree(tree));
      v = h - 1;
    }
    int base = tree.tokens[stack.back()].head == 0 ? 0 : dist[v];
    while (!stack.empty()) {
      dist[stack.back()] = ++base;
      stack.pop_back();
    }
  }
  return dist;
}

}  // namespace

int sentence_length(const DepTree& tree, const MetricOptions& opts) {
  if (!opts.exclude_punct) return static_cast<int>(tree.size());
  return static_cast<int>(std::count_if(tree.tokens.begin(), tree.tokens.end(),
                                        [](const Token& t) { return !is_punct(t); }));
}

int head_count(const DepTree& tree, const MetricOptions& opts) {
  if (tree.empty()) return 0;
  const auto counts = dependent_counts(tree, opts);
  return 1 + static_cast<int>(std::count_if(counts.begin(), counts.end(),
                                            [](int c) { return c > 0; }));
}

int tree_depth(const DepTree& tree, const MetricOptions& opts) {
  if (tree.empty()) return 0;
  const auto dist = root_distances(tree);
  int depth = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (opts.exclude_punct_structure && is_punct(tree.tokens[i])) continue;
    depth = std::max(depth, dist[i]);
  }
  return depth;
}

double branching_factor(const DepTree& tree, const MetricOptions& opts) {
  if (tree.empty()) throw UndefinedInputError("branching factor of an empty tree");
  const auto counts = dependent_counts(tree, opts);
  int dependents = 0;
  int governors = 0;
  for (int c : counts) {
    dependents += c;
    governors += c > 0 ? 1 : 0;
  }
  return governors == 0 ? 0.0 : static_cast<double>(dependents) / governors;
}

TreeMetrics compute_metrics(const DepTree& tree, const MetricOptions& opts) {
  TreeMetrics m;
  m.node_count = static_cast<int>(tree.size());
  m.length = sentence_length(tree, opts);
  if (tree.empty()) return m;
  m.head_count = head_count(tree, opts);
  m.depth = tree_depth(tree, opts);
  m.branching_factor = branching_factor(tree, opts);
  return m;
}

}  // namespace syncomp
