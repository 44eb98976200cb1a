#pragma once

// Structural quantities of a dependency tree: length, heads, depth,
// branching factor.

#include <stdexcept>

#include "syncomp/deptree.hpp"

namespace syncomp {

struct MetricOptions {
  /// Drop PUNCT tokens from the sentence length.
  bool exclude_punct = true;
  /// Also ignore PUNCT tokens when computing heads, depth and branching.
  /// A PUNCT token is then neither a depth target nor a dependent, though
  /// paths through it still count their arcs.
  bool exclude_punct_structure = false;
};

struct TreeMetrics {
  int length = 0;               // words, after the punctuation filter
  int head_count = 0;           // governing tokens plus the virtual root
  int depth = 0;                // arcs from the virtual root to the deepest token
  double branching_factor = 0;  // mean dependents per governing token
  int node_count = 0;           // all tokens

  bool operator==(const TreeMetrics&) const = default;
};

/// Raised for inputs on which a measure is undefined (e.g. an empty tree).
class UndefinedInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

int sentence_length(const DepTree& tree, const MetricOptions& opts = {});
int head_count(const DepTree& tree, const MetricOptions& opts = {});
int tree_depth(const DepTree& tree, const MetricOptions& opts = {});

/// Throws UndefinedInputError for an empty tree; 0 when no token governs.
double branching_factor(const DepTree& tree, const MetricOptions& opts = {});

/// All of the above in one pass. Empty trees yield all-zero metrics.
/// Requires a valid tree (see validate_tree).
TreeMetrics compute_metrics(const DepTree& tree, const MetricOptions& opts = {});

}  // namespace syncomp
