#include "syncomp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace syncomp {

double default_intercept(const RoleTrend& trend, const SynthConfig& config) {
  if (trend.intercept) return *trend.intercept;
  const double spread = std::sqrt(config.sigma_u * config.sigma_u + config.sigma * config.sigma);
  const double drop = std::max(0.0, -trend.slope * trend.utterances);
  return kSynthFloor + 6.0 * spread + drop;
}

DepTree tree_for_complexity(double target, std::mt19937_64& rng) {
  // Root verb with one chained dependent gives depth 2 and two heads; each
  // extra leaf on the verb adds 1/4 to the complexity.
  const double leaves = std::max(0.0, 4.0 * (target - kSynthFloor));
  const double whole = std::floor(leaves);
  std::bernoulli_distribution round_up(leaves - whole);
  const int m = static_cast<int>(whole) + (round_up(rng) ? 1 : 0);

  std::vector<int> heads(2 + m, 1);
  heads[0] = 0;
  DepTree tree = tree_from_heads(heads, "NOUN", "dep");
  tree.tokens[0].upos = "VERB";
  tree.tokens[0].deprel = "root";
  return tree;
}

std::vector<DepTree> synthesize_corpus(const SynthConfig& config) {
  if (config.dialogues < 1) throw std::invalid_argument("need at least one dialogue");
  if (config.initiator.utterances < 1 || config.follower.utterances < 1) {
    throw std::invalid_argument("each role needs at least one utterance");
  }
  if (config.sigma_u < 0 || config.sigma < 0) {
    throw std::invalid_argument("standard deviations must be non-negative");
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const RoleTrend* trends[2] = {&config.initiator, &config.follower};
  const double intercepts[2] = {default_intercept(config.initiator, config),
                                default_intercept(config.follower, config)};
  const char* speakers[2] = {"A", "B"};

  std::vector<DepTree> out;
  for (int d = 1; d <= config.dialogues; ++d) {
    char id[32];
    std::snprintf(id, sizeof id, "d%04d", d);
    const double offsets[2] = {config.sigma_u * unit(rng), config.sigma_u * unit(rng)};

    int next[2] = {1, 1};
    int utterance_id = 0;
    for (;;) {
      // Pick the role that is least far through its own utterances; the
      // initiator wins ties and therefore opens the dialogue.
      int role = -1;
      double best = 2.0;
      for (int r = 0; r < 2; ++r) {
        if (next[r] > trends[r]->utterances) continue;
        const double progress = static_cast<double>(next[r]) / trends[r]->utterances;
        if (progress < best) {
          best = progress;
          role = r;
        }
      }
      if (role < 0) break;

      const int position = next[role]++;
      const double target = intercepts[role] + trends[role]->slope * position + offsets[role] +
                            config.sigma * unit(rng);
      DepTree tree = tree_for_complexity(target, rng);
      tree.meta[meta_keys::kDialogueId] = id;
      tree.meta[meta_keys::kSpeaker] = speakers[role];
      tree.meta[meta_keys::kUtteranceId] = std::to_string(++utterance_id);
      out.push_back(std::move(tree));
    }
  }
  return out;
}

}  // namespace syncomp
