#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "loglin/estimator.hpp"

namespace loglin {

struct SelectConfig {
  IMConfig root;
  double gain_threshold = 1e-4;
};

struct GainReport {
  PropertyPattern pattern;
  double alpha_hat = 0.0;
  double gain = 0.0;
  bool clamped = false;
};

/// Occurrence counts of a candidate over the space's trees.
Eigen::VectorXd candidate_counts(const PropertyPattern& c, const TreeSpace& s);

/// Best single-parameter weight for extending the model by candidate `c`
/// with all other parameters held fixed: the unique root of
///   sum_y count(y) k[c | y] = sum_y count(y) E_p[c e^{alpha c}].
/// Closed form when c is 0/1-valued.
RootResult gain_alpha(const PropertyPattern& c, const LogLinearModel& m, const TreeSpace& s,
                      const IMConfig& cfg);

/// Conservative estimate of the log-likelihood improvement of adding `c` at
/// its best weight. Zero exactly when the conditional and model
/// expectations of `c` already match.
GainReport gain(const PropertyPattern& c, const LogLinearModel& m, const TreeSpace& s,
                const IMConfig& cfg);

/// All candidates scored, sorted by gain descending (ties: smaller pattern,
/// then lexicographically smaller serialization). Candidates equal to a
/// model pattern or absent from the space are dropped.
std::vector<GainReport> score_candidates(const std::vector<PropertyPattern>& candidates,
                                         const LogLinearModel& m, const TreeSpace& s,
                                         const IMConfig& cfg);

/// The argmax-gain candidate, or nullopt when none clears the threshold.
std::optional<GainReport> select_property(const std::vector<PropertyPattern>& candidates,
                                          const LogLinearModel& m, const TreeSpace& s,
                                          const SelectConfig& cfg);

}  // namespace loglin
