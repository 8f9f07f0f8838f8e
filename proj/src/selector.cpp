#include "loglin/selector.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "loglin/numerics.hpp"

namespace loglin {

Eigen::VectorXd candidate_counts(const PropertyPattern& c, const TreeSpace& s) {
  Eigen::VectorXd counts(s.tree_count());
  for (Eigen::Index x = 0; x < s.tree_count(); ++x)
    counts[x] =
        static_cast<double>(count_occurrences(c, s.trees[static_cast<std::size_t>(x)]));
  return counts;
}

namespace {

struct CandidateStats {
  Eigen::VectorXd counts;   // per tree
  double target;            // sum_y count(y) k[c | y]
  Eigen::VectorXd lw;       // model log weights
  double lz;
  double mass;              // compensated sum of exp(lw - lz)
  double ln_tokens;
};

CandidateStats make_stats(const PropertyPattern& c, const LogLinearModel& m,
                          const TreeSpace& s) {
  CandidateStats st;
  st.counts = candidate_counts(c, s);
  st.lw = log_weights(m);
  st.lz = log_sum_exp(st.lw);
  Eigen::VectorXd rel = (st.lw.array() - st.lz).exp();
  st.mass = kahan_total(rel);
  st.ln_tokens = std::log(static_cast<double>(s.total_tokens));

  KahanSum target;
  for (const QueryTrees& q : s.queries) {
    double lse = log_sum_exp(st.lw, q.offset, q.size);
    KahanSum num, den;
    for (Eigen::Index i = 0; i < q.size; ++i) {
      double w = std::exp(st.lw[q.offset + i] - lse);
      num.add(w * st.counts[q.offset + i]);
      den.add(w);
    }
    target.add(static_cast<double>(q.count) * (num.value() / den.value()));
  }
  st.target = target.value();
  return st;
}

RootResult alpha_from_stats(const CandidateStats& st, const IMConfig& cfg) {
  std::vector<double> log_coeff, expnt;
  for (Eigen::Index x = 0; x < st.counts.size(); ++x) {
    double c = st.counts[x];
    if (c <= 0.0) continue;
    log_coeff.push_back(st.ln_tokens + (st.lw[x] - st.lz) - std::log(st.mass) + std::log(c));
    expnt.push_back(c);
  }
  if (log_coeff.empty()) return {0.0, 0.0, false};
  if (st.target <= 0.0) return {kGammaFloor, 0.0, true};

  bool zero_one = true;
  for (double e : expnt)
    if (e != 1.0) {
      zero_one = false;
      break;
    }
  if (zero_one) {
    // 0/1-valued candidate: the update is linear in e^alpha.
    double ln_model = log_sum_exp(
        Eigen::Map<const Eigen::VectorXd>(log_coeff.data(),
                                          static_cast<Eigen::Index>(log_coeff.size())));
    double alpha = std::log(st.target) - ln_model;
    double residual = std::abs(std::expm1(ln_model + alpha - std::log(st.target)));
    return {alpha, residual, false};
  }
  return solve_monotone_root(log_coeff, expnt, st.target, cfg);
}

// G(alpha) = sum_y count(y) (1 + alpha k[c|y]) - tokens * E_p[e^{alpha c}];
// formed so that G(0) is exactly zero.
double gain_at(const CandidateStats& st, const TreeSpace& s, double alpha) {
  if (alpha == 0.0) return 0.0;
  KahanSum enum_, eden;
  for (Eigen::Index x = 0; x < st.counts.size(); ++x) {
    double w = std::exp(st.lw[x] - st.lz);
    enum_.add(w * std::exp(alpha * st.counts[x]));
    eden.add(w);
  }
  double e_exp = enum_.value() / eden.value();
  return alpha * st.target + static_cast<double>(s.total_tokens) * (1.0 - e_exp);
}

}  // namespace

RootResult gain_alpha(const PropertyPattern& c, const LogLinearModel& m, const TreeSpace& s,
                      const IMConfig& cfg) {
  return alpha_from_stats(make_stats(c, m, s), cfg);
}

GainReport gain(const PropertyPattern& c, const LogLinearModel& m, const TreeSpace& s,
                const IMConfig& cfg) {
  CandidateStats st = make_stats(c, m, s);
  RootResult r = alpha_from_stats(st, cfg);
  GainReport report;
  report.pattern = c;
  report.alpha_hat = r.gamma;
  report.clamped = r.clamped;
  report.gain = std::max(0.0, gain_at(st, s, r.gamma));
  return report;
}

std::vector<GainReport> score_candidates(const std::vector<PropertyPattern>& candidates,
                                         const LogLinearModel& m, const TreeSpace& s,
                                         const IMConfig& cfg) {
  std::set<std::string> in_model;
  for (const PropertyPattern& pat : m.patterns) in_model.insert(pat.canon);

  std::vector<GainReport> reports;
  std::set<std::string> seen;
  for (const PropertyPattern& c : candidates) {
    if (in_model.count(c.canon) || !seen.insert(c.canon).second) continue;
    CandidateStats st = make_stats(c, m, s);
    if (!(st.counts.array() > 0.0).any()) continue;  // absent from the space
    RootResult r = alpha_from_stats(st, cfg);
    GainReport report;
    report.pattern = c;
    report.alpha_hat = r.gamma;
    report.clamped = r.clamped;
    report.gain = std::max(0.0, gain_at(st, s, r.gamma));
    reports.push_back(std::move(report));
  }
  std::sort(reports.begin(), reports.end(), [](const GainReport& a, const GainReport& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.pattern.size() != b.pattern.size()) return a.pattern.size() < b.pattern.size();
    return a.pattern.canon < b.pattern.canon;
  });
  return reports;
}

std::optional<GainReport> select_property(const std::vector<PropertyPattern>& candidates,
                                          const LogLinearModel& m, const TreeSpace& s,
                                          const SelectConfig& cfg) {
  std::vector<GainReport> scored = score_candidates(candidates, m, s, cfg.root);
  if (scored.empty() || scored.front().gain < cfg.gain_threshold) return std::nullopt;
  return scored.front();
}

}  // namespace loglin
