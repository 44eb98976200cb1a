#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "syncomp/complexity.hpp"
#include "syncomp/dialogue.hpp"
#include "syncomp/synth.hpp"

namespace syncomp::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kUsageError = 2,
  kIoError = 3,
  kDegenerateStatistics = 4,
};

/// Seed used when --seed is not given.
inline constexpr std::uint64_t kDefaultSeed = 20240917;

enum class Command { kNone, kValidate, kScore, kAnalyze, kPlotData, kDecode, kSynth };

struct RunConfig {
  Command command = Command::kNone;
  std::vector<std::string> inputs;
  std::string manifest;
  std::string out;          // empty: standard output
  std::string results_csv;  // analyze: optional results table
  std::string corpus_name = "corpus";
  Layout layout = Layout::kConcatenated;
  bool lenient = false;

  ComplexityConfig complexity;
  bool with_isc = false;

  double alpha = 0.05;
  int n_bins = 10;
  int n_resamples = 1000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  bool normalized_position = false;
  bool quadratic = false;

  SynthConfig synth;
};

/// Parses arguments (without the program name) and runs the command.
/// Diagnostics go to `err` as single `syncomp: error: <kind>: <message>` lines.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Executes an already-parsed configuration.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace syncomp::cli
