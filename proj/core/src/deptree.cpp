#include "syncomp/deptree.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace syncomp {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

Features parse_feats(std::string_view col, std::size_t line_no) {
  Features feats;
  if (col == "_") return feats;
  for (auto item : split(col, '|')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ParseError(line_no, "malformed FEATS entry '" + std::string(item) + "'");
    }
    feats.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
  }
  return feats;
}

std::string format_feats(const Features& feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto& [k, v] : feats) {
    if (!out.empty()) out += '|';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

// A sentence block under construction.
struct Block {
  DepTree tree;
  std::unordered_set<int> seen_ids;
};

void parse_comment(std::string_view line, DepTree& tree) {
  auto body = trim(line.substr(1));
  const auto eq = body.find('=');
  if (eq == std::string_view::npos) return;
  const auto key = trim(body.substr(0, eq));
  if (key.empty() || key.find(' ') != std::string_view::npos) return;
  tree.meta[std::string(key)] = std::string(trim(body.substr(eq + 1)));
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::optional<std::string> DepTree::meta_value(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) return std::nullopt;
  return it->second;
}

std::vector<DepTree> parse_conllu(std::string_view text) {
  std::vector<DepTree> out;
  Block block;

  const auto flush = [&] {
    if (!block.tree.tokens.empty()) out.push_back(std::move(block.tree));
    block = Block{};
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      parse_comment(line, block.tree);
      continue;
    }

    const auto cols = split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(line_no, "expected 10 tab-separated columns, found " +
                                    std::to_string(cols.size()));
    }
    const auto id_col = cols[0];
    if (id_col.find('-') != std::string_view::npos ||
        id_col.find('.') != std::string_view::npos) {
      continue;  // multiword range or empty node
    }
    const auto id = parse_int(id_col);
    if (!id || *id < 1) {
      throw ParseError(line_no, "invalid token id '" + std::string(id_col) + "'");
    }
    const auto head = parse_int(cols[6]);
    if (!head || *head < 0) {
      throw ParseError(line_no, "non-integer head '" + std::string(cols[6]) + "'");
    }
    if (*head == *id) {
      throw ParseError(line_no, "token " + std::to_string(*id) + " is its own head");
    }
    if (!block.seen_ids.insert(*id).second) {
      throw ParseError(line_no, "duplicate token id " + std::to_string(*id));
    }
    if (cols[1].empty() || cols[3].empty()) {
      throw ParseError(line_no, "empty FORM or UPOS column");
    }

    Token tok;
    tok.id = *id;
    tok.form = std::string(cols[1]);
    if (cols[2] != "_") tok.lemma = std::string(cols[2]);
    tok.upos = std::string(cols[3]);
    tok.xpos = std::string(cols[4]);
    tok.feats = parse_feats(cols[5], line_no);
    tok.head = *head;
    tok.deprel = std::string(cols[7]);
    tok.deps = std::string(cols[8]);
    tok.misc = std::string(cols[9]);
    block.tree.tokens.push_back(std::move(tok));
  }
  flush();
  return out;
}

std::string serialize_conllu(const std::vector<DepTree>& trees) {
  std::ostringstream os;
  for (const auto& tree : trees) {
    for (const auto& [key, value] : tree.meta) {
      os << "# " << key << " = " << value << '\n';
    }
    for (const auto& t : tree.tokens) {
      os << t.id << '\t' << t.form << '\t' << (t.lemma ? *t.lemma : "_") << '\t'
         << t.upos << '\t' << t.xpos << '\t' << format_feats(t.feats) << '\t'
         << t.head << '\t' << t.deprel << '\t' << t.deps << '\t' << t.misc << '\n';
    }
    os << '\n';
  }
  return os.str();
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kNoRoot: return "no_root";
    case ViolationKind::kMultipleRoots: return "multiple_roots";
    case ViolationKind::kHeadOutOfRange: return "head_out_of_range";
    case ViolationKind::kCycle: return "cycle";
    case ViolationKind::kIdSequence: return "id_sequence";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::describe() const {
  std::string out;
  for (const auto& v : violations) {
    out += to_string(v.kind);
    out += ": ";
    out += v.message;
    out += '\n';
  }
  return out;
}

namespace {

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out += ',';
    out += std::to_string(id);
  }
  return out;
}

}  // namespace

ValidationReport validate_tree(const DepTree& tree) {
  ValidationReport report;
  const auto& toks = tree.tokens;
  const int n = static_cast<int>(toks.size());

  std::vector<int> misplaced;
  for (int i = 0; i < n; ++i) {
    if (toks[i].id != i + 1) misplaced.push_back(toks[i].id);
  }
  if (!misplaced.empty()) {
    report.violations.push_back({ViolationKind::kIdSequence, misplaced,
                                 "token ids not consecutive from 1: " + join_ids(misplaced)});
  }

  std::unordered_map<int, int> index_of;
  for (int i = 0; i < n; ++i) index_of.emplace(toks[i].id, i);

  std::vector<int> roots;
  std::vector<int> out_of_range;
  std::vector<int> parent(n, -1);  // index of head token, -1 for root/out of range
  for (int i = 0; i < n; ++i) {
    const int h = toks[i].head;
    if (h == 0) {
      roots.push_back(toks[i].id);
    } else if (auto it = index_of.find(h); it == index_of.end()) {
      out_of_range.push_back(toks[i].id);
    } else {
      parent[i] = it->second;
    }
  }
  if (n > 0 && roots.empty()) {
    report.violations.push_back({ViolationKind::kNoRoot, {}, "no token attaches to the root"});
  }
  if (roots.size() > 1) {
    std::sort(roots.begin(), roots.end());
    report.violations.push_back({ViolationKind::kMultipleRoots, roots,
                                 "multiple root tokens: " + join_ids(roots)});
  }
  if (!out_of_range.empty()) {
    std::sort(out_of_range.begin(), out_of_range.end());
    report.violations.push_back({ViolationKind::kHeadOutOfRange, out_of_range,
                                 "heads point outside the utterance for tokens: " +
                                     join_ids(out_of_range)});
  }

  // 0 = unvisited, 1 = on current path, 2 = finished
  std::vector<int> state(n, 0);
  for (int start = 0; start < n; ++start) {
    if (state[start] != 0) continue;
    std::vector<int> path;
    int v = start;
    while (v >= 0 && state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = parent[v];
    }
    if (v >= 0 && state[v] == 1) {
      std::vector<int> cycle;
      for (auto it = std::find(path.begin(), path.end(), v); it != path.end(); ++it) {
        cycle.push_back(toks[*it].id);
      }
      std::sort(cycle.begin(), cycle.end());
      report.violations.push_back({ViolationKind::kCycle, cycle,
                                   "cycle through tokens " + join_ids(cycle)});
    }
    for (int u : path) state[u] = 2;
  }
  return report;
}

InvalidTreeError::InvalidTreeError(ValidationReport report, const std::string& where)
    : std::runtime_error((where.empty() ? std::string{} : where + ": ") +
                         (report.violations.empty()
                              ? std::string("invalid tree")
                              : std::string(to_string(report.violations.front().kind)) + ": " +
                                    report.violations.front().message)),
      report_(std::move(report)) {}

const DepTree& require_valid(const DepTree& tree) {
  auto report = validate_tree(tree);
  if (!report.ok()) throw InvalidTreeError(std::move(report));
  return tree;
}

DepTree tree_from_heads(const std::vector<int>& heads, const std::string& upos,
                        const std::string& deprel) {
  DepTree tree;
  tree.tokens.reserve(heads.size());
  for (std::size_t i = 0; i < heads.size(); ++i) {
    Token t;
    t.id = static_cast<int>(i) + 1;
    t.form = "w" + std::to_string(i + 1);
    t.upos = upos;
    t.head = heads[i];
    t.deprel = deprel;
    tree.tokens.push_back(std::move(t));
  }
  return tree;
}

}  // namespace syncomp
