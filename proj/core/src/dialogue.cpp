#include "syncomp/dialogue.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <sstream>

namespace syncomp {

namespace {

std::optional<long long> as_integer(const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

bool utterance_id_less(const std::string& a, const std::string& b) {
  const auto ia = as_integer(a);
  const auto ib = as_integer(b);
  if (ia && ib) return *ia < *ib;
  return a < b;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::string sentence_label(const std::string& doc, std::size_t index, const DepTree& tree) {
  std::string label = doc + " sentence " + std::to_string(index + 1);
  if (auto sent_id = tree.meta_value("sent_id")) label += " (sent_id " + *sent_id + ")";
  return label;
}

}  // namespace

Manifest read_manifest(std::istream& is) {
  Manifest manifest;
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != "dialogue_id,utterance_id,speaker") {
    throw LoadError("manifest: expected header 'dialogue_id,utterance_id,speaker'");
  }
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(cell);
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty() || cols[2].empty()) {
      throw LoadError("manifest line " + std::to_string(line_no) + ": expected 3 non-empty fields");
    }
    if (!manifest.emplace(std::pair{cols[0], cols[1]}, cols[2]).second) {
      throw LoadError("manifest line " + std::to_string(line_no) + ": duplicate row for " +
                      cols[0] + "/" + cols[1]);
    }
  }
  return manifest;
}

void check_dialogue(const Dialogue& dialogue, bool allow_monologue) {
  if (dialogue.utterances.empty()) throw LoadError("dialogue " + dialogue.id + " is empty");
  std::set<std::string> speakers;
  for (const auto& u : dialogue.utterances) speakers.insert(u.speaker);
  const bool ok = speakers.size() == 2 || (allow_monologue && speakers.size() == 1);
  if (!ok) {
    throw LoadError("dialogue " + dialogue.id + " has " + std::to_string(speakers.size()) +
                    " speaker(s); exactly 2 required");
  }
  if (dialogue.utterances.front().speaker != dialogue.initiator) {
    throw LoadError("dialogue " + dialogue.id + ": initiator is not the first speaker");
  }
}

LoadResult load_corpus(const std::vector<Document>& documents, const Manifest* manifest,
                       const LoadOptions& options) {
  LoadResult result;
  result.corpus.name = options.corpus_name;

  std::map<std::string, Dialogue> by_id;
  std::set<std::pair<std::string, std::string>> seen;

  for (const auto& doc : documents) {
    std::vector<DepTree> trees;
    try {
      trees = parse_conllu(doc.text);
    } catch (const ParseError& e) {
      throw LoadError(doc.name + ": " + e.what());
    }

    std::map<std::string, int> ordinal;  // per-dialogue sentence counter in this document
    for (std::size_t i = 0; i < trees.size(); ++i) {
      auto& tree = trees[i];
      const auto label = sentence_label(doc.name, i, tree);

      if (auto report = validate_tree(tree); !report.ok()) {
        if (!options.lenient) throw InvalidTreeError(std::move(report), label);
        result.warnings.push_back(label + ": dropped invalid tree (" +
                                  to_string(report.violations.front().kind) + ")");
        continue;
      }

      auto dialogue_id = tree.meta_value(meta_keys::kDialogueId);
      if (!dialogue_id && options.layout == Layout::kPerDialogueFile) {
        dialogue_id = std::filesystem::path(doc.name).stem().string();
      }
      if (!dialogue_id) throw LoadError(label + ": no dialogue_id metadata");

      const int ord = ++ordinal[*dialogue_id];
      auto utterance_id = tree.meta_value(meta_keys::kUtteranceId);
      if (!utterance_id) utterance_id = std::to_string(ord);

      std::optional<std::string> speaker;
      if (manifest) {
        if (auto it = manifest->find({*dialogue_id, *utterance_id}); it != manifest->end()) {
          speaker = it->second;
        }
      }
      if (!speaker) speaker = tree.meta_value(meta_keys::kSpeaker);
      if (!speaker || speaker->empty()) {
        throw LoadError(label + ": no speaker in comments or manifest");
      }

      if (!seen.emplace(*dialogue_id, *utterance_id).second) {
        throw LoadError(label + ": duplicate utterance " + *dialogue_id + "/" + *utterance_id);
      }

      auto& dialogue = by_id[*dialogue_id];
      dialogue.id = *dialogue_id;
      dialogue.utterances.push_back({*speaker, *utterance_id, std::move(tree)});
    }
  }

  for (auto& [id, dialogue] : by_id) {
    std::stable_sort(dialogue.utterances.begin(), dialogue.utterances.end(),
                     [](const Utterance& a, const Utterance& b) {
                       return utterance_id_less(a.utterance_id, b.utterance_id);
                     });
    dialogue.initiator = dialogue.utterances.front().speaker;
    try {
      check_dialogue(dialogue, options.allow_monologue);
    } catch (const LoadError& e) {
      if (!options.lenient) throw;
      result.warnings.push_back(std::string(e.what()) + "; dropped");
      continue;
    }
    result.corpus.dialogues.push_back(std::move(dialogue));
  }
  return result;
}

std::map<std::string, Role> assign_roles(const Dialogue& dialogue) {
  check_dialogue(dialogue, true);
  std::map<std::string, Role> roles;
  for (const auto& u : dialogue.utterances) {
    roles.emplace(u.speaker, u.speaker == dialogue.initiator ? Role::kInitiator : Role::kFollower);
  }
  return roles;
}

std::vector<ComplexityRecord> complexity_series(const Corpus& corpus,
                                                const ComplexityConfig& config) {
  config.validate();
  std::vector<ComplexityRecord> records;
  for (const auto& dialogue : corpus.dialogues) {
    const auto roles = assign_roles(dialogue);
    std::map<std::string, int> totals;
    for (const auto& u : dialogue.utterances) ++totals[u.speaker];

    std::map<std::string, int> counter;
    for (const auto& u : dialogue.utterances) {
      ComplexityRecord r;
      r.dialogue_id = dialogue.id;
      r.speaker = u.speaker;
      r.role = roles.at(u.speaker);
      r.position = ++counter[u.speaker];
      r.role_total = totals[u.speaker];
      r.components = compute_metrics(u.tree, config.metrics);
      r.sc = syntactic_complexity(r.components, config);
      r.isc = isc_score(u.tree, config);
      records.push_back(std::move(r));
    }
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const ComplexityRecord& a, const ComplexityRecord& b) {
                     if (a.dialogue_id != b.dialogue_id) return a.dialogue_id < b.dialogue_id;
                     if (a.role != b.role) return a.role < b.role;
                     return a.position < b.position;
                   });
  return records;
}

}  // namespace syncomp
