#include "loglin/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "loglin/numerics.hpp"

namespace loglin {

TreeSpace build_space(const Program& p, const std::vector<CorpusEntry>& corpus,
                      const EnumLimits& lim) {
  TreeSpace space;
  for (const CorpusEntry& entry : corpus) {
    Enumeration en = enumerate_proof_trees(p, entry.goal, lim);
    if (en.trees.empty())
      throw ValidationError("query on line " + std::to_string(entry.line) +
                            " has no proof tree within bounds: " + render_goal(entry.goal, p));
    QueryTrees q;
    q.goal = entry.goal;
    q.count = entry.count;
    q.offset = space.tree_count();
    q.size = static_cast<Eigen::Index>(en.trees.size());
    q.truncated = en.truncated;
    q.line = entry.line;
    space.queries.push_back(std::move(q));
    for (ProofTree& t : en.trees) space.trees.push_back(std::move(t));
    space.total_tokens += entry.count;
  }
  return space;
}

LogLinearModel make_model(const TreeSpace& space, std::vector<PropertyPattern> patterns,
                          const Eigen::VectorXd& lambda0) {
  const Eigen::Index n = space.tree_count();
  if (n == 0) throw ValidationError("cannot build a model over an empty tree space");
  const Eigen::Index np = static_cast<Eigen::Index>(patterns.size());

  LogLinearModel m;
  m.patterns = std::move(patterns);
  m.lambda = lambda0.size() == 0 ? Eigen::VectorXd::Zero(np) : lambda0;
  if (m.lambda.size() != np)
    throw ValidationError("initial parameter vector length does not match the pattern count");
  m.log_p0 = Eigen::VectorXd::Constant(n, -std::log(static_cast<double>(n)));
  m.counts.resize(n, np);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index i = 0; i < np; ++i)
      m.counts(x, i) = static_cast<double>(
          count_occurrences(m.patterns[static_cast<std::size_t>(i)],
                            space.trees[static_cast<std::size_t>(x)]));
  m.nu_total = m.counts.rowwise().sum();
  m.unit_total = (m.nu_total.array() == 1.0).all();
  return m;
}

LogLinearModel extend_model(const LogLinearModel& m, const TreeSpace& space,
                            PropertyPattern pattern, double lambda_init) {
  LogLinearModel out;
  const Eigen::Index n = space.tree_count();
  const Eigen::Index np = static_cast<Eigen::Index>(m.patterns.size()) + 1;
  out.patterns = m.patterns;
  out.patterns.push_back(std::move(pattern));
  out.lambda.resize(np);
  out.lambda.head(np - 1) = m.lambda;
  out.lambda[np - 1] = lambda_init;
  out.log_p0 = m.log_p0;
  out.counts.resize(n, np);
  out.counts.leftCols(np - 1) = m.counts;
  for (Eigen::Index x = 0; x < n; ++x)
    out.counts(x, np - 1) = static_cast<double>(
        count_occurrences(out.patterns.back(), space.trees[static_cast<std::size_t>(x)]));
  out.nu_total = out.counts.rowwise().sum();
  out.unit_total = (out.nu_total.array() == 1.0).all();
  return out;
}

Eigen::VectorXd log_weights(const LogLinearModel& m) { return m.counts * m.lambda + m.log_p0; }

double unnormalized_weight(const LogLinearModel& m, Eigen::Index x) {
  return std::exp(m.counts.row(x).dot(m.lambda) + m.log_p0[x]);
}

double log_normalizer(const LogLinearModel& m) { return log_sum_exp(log_weights(m)); }

double normalizer(const LogLinearModel& m) { return std::exp(log_normalizer(m)); }

namespace {

// Weights rescaled by the normalizer; expectations are formed as ratios of
// compensated sums over these, so E[1] is exactly 1.
struct Rescaled {
  Eigen::VectorXd rel;
  double mass;
};

Rescaled rescaled_weights(const LogLinearModel& m) {
  Eigen::VectorXd lw = log_weights(m);
  double lz = log_sum_exp(lw);
  Rescaled r;
  r.rel = (lw.array() - lz).exp();
  r.mass = kahan_total(r.rel);
  return r;
}

}  // namespace

Eigen::VectorXd model_probs(const LogLinearModel& m) {
  Rescaled r = rescaled_weights(m);
  return r.rel / r.mass;
}

double prob(const LogLinearModel& m, Eigen::Index x) { return model_probs(m)[x]; }

Eigen::VectorXd conditional_probs(const LogLinearModel& m, const TreeSpace& s) {
  Eigen::VectorXd lw = log_weights(m);
  Eigen::VectorXd out(lw.size());
  for (const QueryTrees& q : s.queries) {
    double lse = log_sum_exp(lw, q.offset, q.size);
    KahanSum mass;
    for (Eigen::Index i = 0; i < q.size; ++i) {
      out[q.offset + i] = std::exp(lw[q.offset + i] - lse);
      mass.add(out[q.offset + i]);
    }
    out.segment(q.offset, q.size) /= mass.value();
  }
  return out;
}

double conditional_prob(const LogLinearModel& m, const TreeSpace& s, std::size_t query,
                        Eigen::Index x) {
  const QueryTrees& q = s.queries[query];
  Eigen::VectorXd lw = log_weights(m);
  double lse = log_sum_exp(lw, q.offset, q.size);
  KahanSum mass;
  for (Eigen::Index i = 0; i < q.size; ++i) mass.add(std::exp(lw[q.offset + i] - lse));
  return std::exp(lw[x] - lse) / mass.value();
}

double expectation_model(const LogLinearModel& m, const Eigen::VectorXd& f) {
  Rescaled r = rescaled_weights(m);
  return kahan_dot(r.rel, f) / r.mass;
}

double expectation_conditional(const LogLinearModel& m, const TreeSpace& s, std::size_t query,
                               const Eigen::VectorXd& f) {
  const QueryTrees& q = s.queries[query];
  Eigen::VectorXd lw = log_weights(m);
  double lse = log_sum_exp(lw, q.offset, q.size);
  KahanSum num, den;
  for (Eigen::Index i = 0; i < q.size; ++i) {
    double w = std::exp(lw[q.offset + i] - lse);
    num.add(w * f[q.offset + i]);
    den.add(w);
  }
  return num.value() / den.value();
}

double log_likelihood(const LogLinearModel& m, const TreeSpace& s) {
  Eigen::VectorXd lw = log_weights(m);
  double lz = log_sum_exp(lw);
  KahanSum total;
  for (const QueryTrees& q : s.queries)
    total.add(static_cast<double>(q.count) * (log_sum_exp(lw, q.offset, q.size) - lz));
  return total.value();
}

void save_model(const LogLinearModel& m, int depth, std::ostream& out) {
  out << "loglin-clp-model 1\n";
  out << "depth " << depth << "\n";
  out << "p0 uniform\n";
  char buf[64];
  for (std::size_t i = 0; i < m.patterns.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", m.lambda[static_cast<Eigen::Index>(i)]);
    out << "prop " << buf << " " << m.patterns[i].canon << "\n";
  }
}

LoadedModel load_model(std::istream& in, const Program& p) {
  std::string line;
  if (!std::getline(in, line) || line != "loglin-clp-model 1")
    throw ValidationError("model file: bad or missing header");
  LoadedModel loaded;
  if (!std::getline(in, line) || line.rfind("depth ", 0) != 0)
    throw ValidationError("model file: expected 'depth <D>'");
  loaded.depth = std::atoi(line.c_str() + 6);
  if (loaded.depth < 0) throw ValidationError("model file: negative depth");
  if (!std::getline(in, line) || line != "p0 uniform")
    throw ValidationError("model file: expected 'p0 uniform'");

  std::vector<double> lambdas;
  int lineno = 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("prop ", 0) != 0)
      throw ValidationError("model file line " + std::to_string(lineno) +
                            ": expected 'prop <lambda> <pattern>'");
    std::size_t sp = line.find(' ', 5);
    if (sp == std::string::npos)
      throw ValidationError("model file line " + std::to_string(lineno) + ": malformed prop");
    const std::string num = line.substr(5, sp - 5);
    char* end = nullptr;
    double lambda = std::strtod(num.c_str(), &end);
    if (end == num.c_str() || *end != '\0')
      throw ValidationError("model file line " + std::to_string(lineno) +
                            ": bad parameter value '" + num + "'");
    loaded.patterns.push_back(parse_pattern(line.substr(sp + 1), p));
    lambdas.push_back(lambda);
  }
  loaded.lambda = Eigen::Map<Eigen::VectorXd>(lambdas.data(),
                                              static_cast<Eigen::Index>(lambdas.size()));
  return loaded;
}

}  // namespace loglin
