#include "syncomp/mstdecode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace syncomp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Weights = std::vector<std::vector<double>>;  // w[u][v]: arc u -> v

// Chu-Liu/Edmonds on a dense graph rooted at node 0. parent[0] is -1.
std::vector<int> chu_liu_edmonds(const Weights& w) {
  const int m = static_cast<int>(w.size());
  std::vector<int> parent(m, -1);
  for (int v = 1; v < m; ++v) {
    double best = kNegInf;
    for (int u = 0; u < m; ++u) {
      if (u != v && w[u][v] > best) {
        best = w[u][v];
        parent[v] = u;
      }
    }
    if (parent[v] < 0) throw std::logic_error("node without an admissible incoming arc");
  }

  // Look for a cycle among the greedy choices.
  std::vector<int> mark(m, -1);
  std::vector<int> cycle;
  for (int start = 1; start < m && cycle.empty(); ++start) {
    int v = start;
    while (v > 0 && mark[v] < 0) {
      mark[v] = start;
      v = parent[v];
    }
    if (v > 0 && mark[v] == start) {
      int u = v;
      do {
        cycle.push_back(u);
        u = parent[u];
      } while (u != v);
    }
  }
  if (cycle.empty()) return parent;

  std::vector<bool> in_cycle(m, false);
  for (int v : cycle) in_cycle[v] = true;

  // Contract the cycle into a single node `c`.
  std::vector<int> to_new(m, -1);
  std::vector<int> to_old;
  for (int v = 0; v < m; ++v) {
    if (!in_cycle[v]) {
      to_new[v] = static_cast<int>(to_old.size());
      to_old.push_back(v);
    }
  }
  const int c = static_cast<int>(to_old.size());
  const int k = c + 1;
  Weights sub(k, std::vector<double>(k, kNegInf));
  std::vector<int> enter(k, -1);  // for arcs u -> c: the cycle node entered
  std::vector<int> leave(k, -1);  // for arcs c -> v: the cycle node left from

  for (int u = 0; u < m; ++u) {
    for (int v = 1; v < m; ++v) {
      if (u == v) continue;
      if (!in_cycle[u] && !in_cycle[v]) {
        sub[to_new[u]][to_new[v]] = w[u][v];
      } else if (!in_cycle[u] && in_cycle[v]) {
        const double gain = w[u][v] - w[parent[v]][v];
        if (gain > sub[to_new[u]][c]) {
          sub[to_new[u]][c] = gain;
          enter[to_new[u]] = v;
        }
      } else if (in_cycle[u] && !in_cycle[v]) {
        if (w[u][v] > sub[c][to_new[v]]) {
          sub[c][to_new[v]] = w[u][v];
          leave[to_new[v]] = u;
        }
      }
    }
  }

  const auto sub_parent = chu_liu_edmonds(sub);

  std::vector<int> out(parent);
  for (int nv = 1; nv < c; ++nv) {
    const int v = to_old[nv];
    const int p = sub_parent[nv];
    out[v] = p == c ? leave[nv] : to_old[p];
  }
  const int entry_from = sub_parent[c];
  out[enter[entry_from]] = to_old[entry_from];
  return out;
}

Weights to_weights(const ScoreMatrix& s) {
  const int n = s.n();
  Weights w(n + 1, std::vector<double>(n + 1, kNegInf));
  for (int h = 0; h <= n; ++h) {
    for (int d = 1; d <= n; ++d) {
      if (s.admissible(h, d)) w[h][d] = s.at(h, d);
    }
  }
  return w;
}

}  // namespace

ScoreMatrix::ScoreMatrix(int n, double fill) : n_(n) {
  if (n < 0) throw std::invalid_argument("token count must be non-negative");
  scores_.assign(static_cast<std::size_t>(n + 1) * n, fill);
}

double ScoreMatrix::at(int head, int dependent) const {
  if (head < 0 || head > n_ || dependent < 1 || dependent > n_) {
    throw std::out_of_range("score index out of range");
  }
  return scores_[static_cast<std::size_t>(head) * n_ + (dependent - 1)];
}

void ScoreMatrix::set(int head, int dependent, double score) {
  if (head < 0 || head > n_ || dependent < 1 || dependent > n_) {
    throw std::out_of_range("score index out of range");
  }
  scores_[static_cast<std::size_t>(head) * n_ + (dependent - 1)] = score;
}

ScoreMatrix ScoreMatrix::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("score matrix: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer() ||
      !doc.contains("scores") || !doc["scores"].is_array()) {
    throw std::invalid_argument("score matrix: expected {\"n\": N, \"scores\": [[...]]}");
  }
  const int n = doc["n"].get<int>();
  if (n < 1) throw std::invalid_argument("score matrix: n must be >= 1");
  const auto& rows = doc["scores"];
  if (rows.size() != static_cast<std::size_t>(n + 1)) {
    throw std::invalid_argument("score matrix: expected " + std::to_string(n + 1) + " rows");
  }
  ScoreMatrix m(n);
  for (int h = 0; h <= n; ++h) {
    const auto& row = rows[h];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("score matrix: row " + std::to_string(h) + " must have " +
                                  std::to_string(n) + " entries");
    }
    for (int d = 1; d <= n; ++d) {
      const auto& cell = row[d - 1];
      if (!m.admissible(h, d)) continue;
      if (!cell.is_number() || !std::isfinite(cell.get<double>())) {
        throw std::invalid_argument("score matrix: entry (" + std::to_string(h) + ", " +
                                    std::to_string(d) + ") is not a finite number");
      }
      m.set(h, d, cell.get<double>());
    }
  }
  return m;
}

ScoreMatrix head_probabilities(const ScoreMatrix& scores) {
  const int n = scores.n();
  ScoreMatrix probs(n, 0.0);
  for (int d = 1; d <= n; ++d) {
    double max_score = kNegInf;
    for (int h = 0; h <= n; ++h) {
      if (scores.admissible(h, d)) max_score = std::max(max_score, scores.at(h, d));
    }
    double total = 0.0;
    for (int h = 0; h <= n; ++h) {
      if (scores.admissible(h, d)) total += std::exp(scores.at(h, d) - max_score);
    }
    for (int h = 0; h <= n; ++h) {
      if (scores.admissible(h, d)) probs.set(h, d, std::exp(scores.at(h, d) - max_score) / total);
    }
  }
  return probs;
}

double tree_score(const ScoreMatrix& scores, const std::vector<int>& heads) {
  double total = 0.0;
  for (std::size_t i = 0; i < heads.size(); ++i) {
    total += scores.at(heads[i], static_cast<int>(i) + 1);
  }
  return total;
}

std::vector<int> mst_decode(const ScoreMatrix& scores) {
  const int n = scores.n();
  if (n < 1) throw std::invalid_argument("cannot decode an empty sentence");

  const auto weights = to_weights(scores);
  const auto strip_root = [](const std::vector<int>& parent) {
    return std::vector<int>(parent.begin() + 1, parent.end());
  };

  auto heads = strip_root(chu_liu_edmonds(weights));
  int root_children = 0;
  for (int h : heads) root_children += h == 0 ? 1 : 0;
  if (root_children == 1) return heads;

  // Force each token in turn to be the only root child and keep the best.
  std::vector<int> best;
  double best_score = kNegInf;
  for (int r = 1; r <= n; ++r) {
    Weights forced = weights;
    for (int d = 1; d <= n; ++d) {
      if (d != r) forced[0][d] = kNegInf;
    }
    auto candidate = strip_root(chu_liu_edmonds(forced));
    const double total = tree_score(scores, candidate);
    if (best.empty() || total > best_score) {
      best_score = total;
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace syncomp
