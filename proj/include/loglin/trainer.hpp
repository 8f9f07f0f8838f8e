#pragma once

#include <functional>
#include <vector>

#include "loglin/selector.hpp"

namespace loglin {

struct TrainerConfig {
  IMConfig im;
  double gain_threshold = 1e-4;
  int max_properties = 50;
  int max_rounds = 50;
};

struct RoundRecord {
  PropertyPattern pattern;
  double alpha_hat;
  double gain;
  double loglik_after;
};

struct InduceResult {
  LogLinearModel model;
  std::vector<RoundRecord> rounds;
  double initial_loglik = 0.0;
};

struct InduceHooks {
  // Called with every scored candidate of a round, gain-descending.
  std::function<void(int round, const std::vector<GainReport>&)> on_candidates;
  // Called after a round's re-estimation with its trace.
  std::function<void(int round, const RoundRecord&, const IMTrace&)> on_round;
};

/// The combined induction loop: starting from the initial distribution with
/// no properties, each round generates candidate patterns from the sample
/// trees, selects the best by approximate gain, appends it (warm-started at
/// its gain weight), and re-estimates all parameters to convergence.
/// Stops when no candidate clears the gain threshold or a round/property
/// cap is hit.
InduceResult induce(const Program& p, const TreeSpace& space, const TrainerConfig& cfg,
                    const InduceHooks& hooks = {});

struct RankedTree {
  ProofTree tree;
  double score;        // lambda . counts(tree)
  double probability;  // conditional over the query's enumerated trees
};

struct RankResult {
  std::vector<RankedTree> items;
  bool no_parse = false;
  bool truncated = false;
};

/// Enumerates the query's proof trees and ranks them by model score with
/// conditional probabilities over the enumerated set. Ties keep enumeration
/// order. Works for queries outside the training sample: only relative
/// weights matter, the initial distribution is uniform within the query.
RankResult rank(const std::vector<PropertyPattern>& patterns, const Eigen::VectorXd& lambda,
                const Program& p, const Goal& g, const EnumLimits& lim = {});

}  // namespace loglin
