#pragma once

// Synthetic dialogue corpora with a known linear trend in complexity per
// role. Used to check that the fitting pipeline recovers planted slopes.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "syncomp/deptree.hpp"

namespace syncomp {

struct RoleTrend {
  double slope = 0.0;
  /// Expected complexity at position 0. Defaults to a level that keeps the
  /// trend well above the smallest constructible complexity.
  std::optional<double> intercept;
  int utterances = 30;
};

struct SynthConfig {
  RoleTrend initiator{-0.02, std::nullopt, 30};
  RoleTrend follower{0.005, std::nullopt, 30};
  double sigma_u = 0.3;  // per-dialogue random intercept sd
  double sigma = 0.5;    // residual sd
  int dialogues = 200;
  std::uint64_t seed = 20240917;
};

/// Smallest complexity the generator can build (at lambda 0.5).
inline constexpr double kSynthFloor = 1.5;

/// Default intercept for a role when none is configured.
double default_intercept(const RoleTrend& trend, const SynthConfig& config);

/// A valid tree whose complexity at lambda 0.5 is 1.5 + m/4 for m extra
/// leaves; m is `target` rounded stochastically so that the expected
/// complexity equals max(target, 1.5).
DepTree tree_for_complexity(double target, std::mt19937_64& rng);

/// Dialogues d0001.. with speakers A (initiator) and B, utterances
/// interleaved in proportion to each role's length. Every tree carries
/// dialogue_id, speaker and utterance_id comments.
std::vector<DepTree> synthesize_corpus(const SynthConfig& config);

}  // namespace syncomp
