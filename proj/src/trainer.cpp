#include "loglin/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "loglin/numerics.hpp"

namespace loglin {

InduceResult induce(const Program& p, const TreeSpace& space, const TrainerConfig& cfg,
                    const InduceHooks& hooks) {
  if (space.queries.empty()) throw ValidationError("induce: the training corpus is empty");

  InduceResult result;
  result.model = make_model(space, {});
  result.initial_loglik = log_likelihood(result.model, space);

  for (int round = 1; round <= cfg.max_rounds; ++round) {
    if (static_cast<int>(result.model.patterns.size()) >= cfg.max_properties) break;

    std::vector<PropertyPattern> candidates =
        generate_candidates(result.model.patterns, space.trees, p);
    std::vector<GainReport> scored = score_candidates(candidates, result.model, space, cfg.im);
    if (hooks.on_candidates) hooks.on_candidates(round, scored);
    if (scored.empty() || scored.front().gain < cfg.gain_threshold) break;
    const GainReport& best = scored.front();

    // Warm start: previous parameters plus the selected property at its
    // gain weight, which cannot lower the likelihood.
    LogLinearModel extended =
        extend_model(result.model, space, best.pattern, best.alpha_hat);
    auto [estimated, trace] = estimate(extended, space, cfg.im);
    result.model = std::move(estimated);

    RoundRecord record{best.pattern, best.alpha_hat, best.gain,
                       trace.iterates.back().loglik};
    if (hooks.on_round) hooks.on_round(round, record, trace);
    result.rounds.push_back(std::move(record));
  }
  return result;
}

RankResult rank(const std::vector<PropertyPattern>& patterns, const Eigen::VectorXd& lambda,
                const Program& p, const Goal& g, const EnumLimits& lim) {
  RankResult result;
  Enumeration en = enumerate_proof_trees(p, g, lim);
  result.truncated = en.truncated;
  if (en.trees.empty()) {
    result.no_parse = true;
    return result;
  }

  const Eigen::Index n = static_cast<Eigen::Index>(en.trees.size());
  Eigen::VectorXd scores(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < patterns.size(); ++i)
      acc += lambda[static_cast<Eigen::Index>(i)] *
             count_occurrences(patterns[i], en.trees[static_cast<std::size_t>(x)]);
    scores[x] = acc;
  }

  double lse = log_sum_exp(scores);
  KahanSum mass;
  Eigen::VectorXd probs(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    probs[x] = std::exp(scores[x] - lse);
    mass.add(probs[x]);
  }
  probs /= mass.value();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index x = 0; x < n; ++x) order[static_cast<std::size_t>(x)] = x;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });

  for (Eigen::Index x : order)
    result.items.push_back(
        {std::move(en.trees[static_cast<std::size_t>(x)]), scores[x], probs[x]});
  return result;
}

}  // namespace loglin
