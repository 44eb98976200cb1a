#pragma once

// Two-party dialogue corpora: assembly from CoNLL-U documents, speaker
// roles, and per-role complexity series.

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "syncomp/complexity.hpp"
#include "syncomp/deptree.hpp"

namespace syncomp {

struct Utterance {
  std::string speaker;
  std::string utterance_id;
  DepTree tree;
};

/// Utterances are in transcript order; the initiator speaks first.
struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;
  std::string initiator;
};

struct Corpus {
  std::string name;
  std::vector<Dialogue> dialogues;  // sorted by id, ids unique
};

/// A named CoNLL-U text, typically one input file.
struct Document {
  std::string name;
  std::string text;
};

/// Speaker overrides keyed by (dialogue_id, utterance_id).
using Manifest = std::map<std::pair<std::string, std::string>, std::string>;

/// Parses `dialogue_id,utterance_id,speaker` CSV (header required).
Manifest read_manifest(std::istream& is);

enum class Layout {
  kConcatenated,       // dialogue ids come from `# dialogue_id` comments
  kPerDialogueFile,    // a missing dialogue id falls back to the file stem
};

struct LoadOptions {
  std::string corpus_name = "corpus";
  Layout layout = Layout::kConcatenated;
  /// Drop invalid trees and non-dyadic dialogues with a warning instead of failing.
  bool lenient = false;
  /// Accept single-speaker dialogues (the speaker becomes the initiator).
  /// Per-utterance scoring needs no interlocutor; the convergence
  /// statistics do.
  bool allow_monologue = false;
};

struct LoadResult {
  Corpus corpus;
  std::vector<std::string> warnings;
};

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Assembles dialogues from parsed documents. Each sentence needs a dialogue
/// id and a speaker, from its comments or from the manifest (the manifest
/// wins). A missing utterance_id defaults to the sentence's ordinal within
/// its dialogue in that document. Utterances are ordered by utterance_id,
/// numerically when both ids are integers.
LoadResult load_corpus(const std::vector<Document>& documents, const Manifest* manifest,
                       const LoadOptions& options = {});

/// Throws LoadError unless the dialogue has exactly two speakers (or one,
/// with `allow_monologue`) and the initiator is the first speaker.
void check_dialogue(const Dialogue& dialogue, bool allow_monologue = false);

/// First speaker is the initiator, the other the follower, for the whole
/// dialogue.
std::map<std::string, Role> assign_roles(const Dialogue& dialogue);

/// One record per utterance, ordered by (dialogue id, role, position).
std::vector<ComplexityRecord> complexity_series(const Corpus& corpus,
                                                const ComplexityConfig& config);

}  // namespace syncomp
