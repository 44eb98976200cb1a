#pragma once

// Dependency-annotated utterances and their CoNLL-U representation.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace syncomp {

/// Morphological features, FEATS column. Keys are unique; values are kept
/// verbatim, so multi-valued features such as "PronType=Int,Rel" keep the
/// comma-joined value.
using Features = std::map<std::string, std::string>;

struct Token {
  int id = 0;                       // 1-based position in the utterance
  std::string form;
  std::optional<std::string> lemma; // nullopt for "_"
  std::string upos;
  std::string xpos = "_";           // opaque
  Features feats;
  int head = 0;                     // 0 is the virtual root
  std::string deprel;
  std::string deps = "_";           // opaque
  std::string misc = "_";           // opaque

  bool operator==(const Token&) const = default;
};

/// One utterance. `meta` holds every `# key = value` comment of the block;
/// the toolkit reads dialogue_id, speaker and utterance_id from it.
struct DepTree {
  std::vector<Token> tokens;
  std::map<std::string, std::string> meta;

  bool empty() const { return tokens.empty(); }
  std::size_t size() const { return tokens.size(); }

  /// Metadata lookup; nullopt when the key is absent.
  std::optional<std::string> meta_value(const std::string& key) const;

  bool operator==(const DepTree&) const = default;
};

namespace meta_keys {
inline constexpr const char* kDialogueId = "dialogue_id";
inline constexpr const char* kSpeaker = "speaker";
inline constexpr const char* kUtteranceId = "utterance_id";
}  // namespace meta_keys

/// Malformed CoNLL-U input. `line()` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses a CoNLL-U document into one DepTree per sentence block.
/// Multiword-token ranges ("3-4") and empty nodes ("5.1") are skipped.
/// Blocks without any token line are dropped.
std::vector<DepTree> parse_conllu(std::string_view text);

/// Canonical CoNLL-U text: meta comments in key order, then token lines,
/// then one blank line per sentence.
std::string serialize_conllu(const std::vector<DepTree>& trees);

enum class ViolationKind {
  kNoRoot,
  kMultipleRoots,
  kHeadOutOfRange,
  kCycle,
  kIdSequence,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<int> token_ids;  // offending tokens, ascending
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  /// One violation per line.
  std::string describe() const;
};

/// Checks the single-root, in-range, acyclic tree invariants.
/// Token ids must also run 1..n in order.
ValidationReport validate_tree(const DepTree& tree);

/// Thrown by require_valid when a tree fails validation.
class InvalidTreeError : public std::runtime_error {
 public:
  explicit InvalidTreeError(ValidationReport report, const std::string& where = {});
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Returns `tree` unchanged when valid, throws InvalidTreeError otherwise.
const DepTree& require_valid(const DepTree& tree);

/// Builds a tree from a head array (heads[i] is the head of token i+1),
/// with forms w1..wn and the given relation label. Used by decoders and tests.
DepTree tree_from_heads(const std::vector<int>& heads,
                        const std::string& upos = "X",
                        const std::string& deprel = "dep");

}  // namespace syncomp
