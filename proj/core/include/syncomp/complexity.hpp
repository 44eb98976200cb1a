#pragma once

// Scalar complexity scores over dependency trees, and the per-utterance
// record that carries them through the pipeline.

#include <iosfwd>
#include <string>
#include <vector>

#include "syncomp/deptree.hpp"
#include "syncomp/treemetrics.hpp"

namespace syncomp {

/// Weights for the four Index of Syntactic Complexity indicators.
struct IscWeights {
  double sconj = 1.0;
  double wh = 1.0;
  double nonfinite = 1.0;
  double nominal = 1.0;

  /// Subordinators and WH-words weighted double, verb forms and nominals single.
  static IscWeights classical() { return {2.0, 2.0, 1.0, 1.0}; }
};

struct ComplexityConfig {
  double lambda = 0.5;
  IscWeights isc_weights;
  MetricOptions metrics;

  /// Throws std::invalid_argument unless 0 <= lambda <= 1 and weights >= 0.
  void validate() const;
};

/// lambda * L / heads + (1 - lambda) * depth; the length term is dropped
/// when there are no heads.
double syntactic_complexity(const TreeMetrics& metrics, const ComplexityConfig& config);

/// Weighted count of SCONJ tokens, interrogative/relative pronouns
/// (PronType Int or Rel), non-finite VERB/AUX forms and nominal tokens
/// (NOUN, PROPN, PRON) as the noun-phrase proxy.
double isc_score(const DepTree& tree, const ComplexityConfig& config);

enum class Role { kInitiator, kFollower };

const char* to_string(Role role);
Role role_from_string(const std::string& s);

struct ComplexityRecord {
  std::string dialogue_id;
  std::string speaker;
  Role role = Role::kInitiator;
  int position = 1;    // 1-based index within this speaker's utterances
  int role_total = 1;  // utterances by this speaker in the dialogue
  double sc = 0.0;
  double isc = 0.0;
  TreeMetrics components;

  /// position / role_total, in (0, 1].
  double normalized_position() const {
    return static_cast<double>(position) / static_cast<double>(role_total);
  }
};

/// Header: dialogue_id,speaker,role,position,sc,length,heads,depth,branching
/// (plus a trailing isc column when requested). Doubles are written in
/// shortest round-trip form.
void write_records_csv(std::ostream& os, const std::vector<ComplexityRecord>& records,
                       bool with_isc = false);

/// Reads a file written by write_records_csv. role_total is reconstructed
/// from the per-(dialogue, speaker) record counts. Throws std::runtime_error
/// on a malformed header or row.
std::vector<ComplexityRecord> read_records_csv(std::istream& is);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace syncomp
