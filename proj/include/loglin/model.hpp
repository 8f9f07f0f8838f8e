#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "loglin/parser.hpp"
#include "loglin/pattern.hpp"

namespace loglin {

/// One training query with its token count and its slice of the enumerated
/// tree space.
struct QueryTrees {
  Goal goal;
  long count;
  Eigen::Index offset;
  Eigen::Index size;
  bool truncated;
  int line;
};

/// The enumerated configuration space: the union of the proof trees of the
/// sample's queries, grouped per query. Doubles as the training sample
/// (queries carry token counts).
struct TreeSpace {
  std::vector<ProofTree> trees;
  std::vector<QueryTrees> queries;
  long total_tokens = 0;

  Eigen::Index tree_count() const { return static_cast<Eigen::Index>(trees.size()); }
};

/// Enumerates every corpus query and assembles the space. Throws
/// ValidationError naming the query when one yields no proof tree.
TreeSpace build_space(const Program& p, const std::vector<CorpusEntry>& corpus,
                      const EnumLimits& lim = {});

/// Log-linear distribution over an enumerated tree space:
///   p(x) = Z^-1 exp(lambda . counts(x)) p0(x)
/// with cached per-tree property counts. Immutable in use; parameter
/// updates produce a new value.
struct LogLinearModel {
  std::vector<PropertyPattern> patterns;
  Eigen::VectorXd lambda;    // one log-parameter per pattern
  Eigen::VectorXd log_p0;    // log initial distribution over the space
  Eigen::MatrixXd counts;    // trees x patterns occurrence counts
  Eigen::VectorXd nu_total;  // counts.rowwise().sum()
  bool unit_total = false;   // nu_total identically 1 over the space
};

LogLinearModel make_model(const TreeSpace& space, std::vector<PropertyPattern> patterns,
                          const Eigen::VectorXd& lambda0 = Eigen::VectorXd());

/// Extends the model by one pattern with initial parameter `lambda_init`.
LogLinearModel extend_model(const LogLinearModel& m, const TreeSpace& space,
                            PropertyPattern pattern, double lambda_init);

/// lambda . counts(x) + log p0(x), per tree.
Eigen::VectorXd log_weights(const LogLinearModel& m);

/// exp(lambda . counts(x)) * p0(x), evaluated in log space.
double unnormalized_weight(const LogLinearModel& m, Eigen::Index x);

double log_normalizer(const LogLinearModel& m);
double normalizer(const LogLinearModel& m);

/// Model probabilities over the whole space; sums to 1 up to rounding.
Eigen::VectorXd model_probs(const LogLinearModel& m);
double prob(const LogLinearModel& m, Eigen::Index x);

/// Conditional probabilities k(x|y) within each query's tree slice.
Eigen::VectorXd conditional_probs(const LogLinearModel& m, const TreeSpace& s);
double conditional_prob(const LogLinearModel& m, const TreeSpace& s, std::size_t query,
                        Eigen::Index x);

/// E_p[f] over the space; compensated, self-normalizing (E[1] is exactly 1).
double expectation_model(const LogLinearModel& m, const Eigen::VectorXd& f);
double expectation_conditional(const LogLinearModel& m, const TreeSpace& s, std::size_t query,
                               const Eigen::VectorXd& f);

/// Incomplete-data log-likelihood: sum over queries of count * log of the
/// query's total model mass.
double log_likelihood(const LogLinearModel& m, const TreeSpace& s);

/// Model file round-trip. Parameters are written with 17 significant
/// digits, which reproduces the doubles bit for bit.
void save_model(const LogLinearModel& m, int depth, std::ostream& out);

struct LoadedModel {
  std::vector<PropertyPattern> patterns;
  Eigen::VectorXd lambda;
  int depth;
};

LoadedModel load_model(std::istream& in, const Program& p);

}  // namespace loglin
