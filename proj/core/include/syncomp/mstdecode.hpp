#pragma once

// Head-selection probabilities and maximum spanning arborescence decoding
// over a dense arc-score matrix.

#include <string_view>
#include <vector>

#include "syncomp/deptree.hpp"

namespace syncomp {

/// Arc scores for an n-token sentence. at(h, d) scores token d (1..n)
/// taking head h (0..n, 0 = virtual root). Self-arcs (h == d) are never
/// admissible and their stored value is ignored.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  explicit ScoreMatrix(int n, double fill = 0.0);

  int n() const { return n_; }
  double at(int head, int dependent) const;
  void set(int head, int dependent, double score);
  bool admissible(int head, int dependent) const { return head != dependent; }

  /// Parses `{"n": N, "scores": [[...], ...]}`: N+1 rows of N columns,
  /// row 0 the virtual root. Diagonal cells may hold null. Throws
  /// std::invalid_argument on shape errors or non-finite admissible scores.
  static ScoreMatrix from_json(std::string_view text);

 private:
  int n_ = 0;
  std::vector<double> scores_;  // row-major (n+1) x n
};

/// Softmax over admissible heads for each dependent. Same layout as the
/// scores; inadmissible cells hold 0.
ScoreMatrix head_probabilities(const ScoreMatrix& scores);

/// Highest-scoring head assignment in which exactly one token attaches to
/// the virtual root. heads[d - 1] is the head of token d. Ties resolve to
/// the lowest head index.
std::vector<int> mst_decode(const ScoreMatrix& scores);

/// Sum of arc scores of a head assignment.
double tree_score(const ScoreMatrix& scores, const std::vector<int>& heads);

}  // namespace syncomp
