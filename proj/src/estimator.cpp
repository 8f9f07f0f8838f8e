#include "loglin/estimator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "loglin/numerics.hpp"

namespace loglin {

namespace {

// Quantities shared by every coordinate of one update: rescaled model
// weights and the token-weighted conditional expectations of each property.
struct Sweep {
  Eigen::VectorXd lw;      // log weights
  double lz;               // log normalizer
  Eigen::VectorXd rel;     // exp(lw - lz)
  double mass;             // compensated sum of rel
  double ln_tokens;        // ln of the total token count
  Eigen::VectorXd cond_w;  // per tree: count(y) * k(x|y)
  Eigen::VectorXd target;  // per property: sum_x cond_w(x) * counts(x, i)
};

Sweep make_sweep(const LogLinearModel& m, const TreeSpace& s) {
  Sweep sw;
  sw.lw = log_weights(m);
  sw.lz = log_sum_exp(sw.lw);
  sw.rel = (sw.lw.array() - sw.lz).exp();
  sw.mass = kahan_total(sw.rel);
  sw.ln_tokens = std::log(static_cast<double>(s.total_tokens));

  sw.cond_w.resize(sw.lw.size());
  for (const QueryTrees& q : s.queries) {
    double lse = log_sum_exp(sw.lw, q.offset, q.size);
    KahanSum mass;
    for (Eigen::Index i = 0; i < q.size; ++i) {
      sw.cond_w[q.offset + i] = std::exp(sw.lw[q.offset + i] - lse);
      mass.add(sw.cond_w[q.offset + i]);
    }
    double scale = static_cast<double>(q.count) / mass.value();
    sw.cond_w.segment(q.offset, q.size) *= scale;
  }

  const Eigen::Index np = m.lambda.size();
  sw.target.resize(np);
  for (Eigen::Index i = 0; i < np; ++i) {
    KahanSum t;
    for (Eigen::Index x = 0; x < sw.lw.size(); ++x) t.add(sw.cond_w[x] * m.counts(x, i));
    sw.target[i] = t.value();
  }
  return sw;
}

// Model-side terms of one update equation, as sum_k exp(lc_k) beta^{e_k}.
void gather_terms(const Sweep& sw, const Eigen::VectorXd& coef_counts,
                  const Eigen::VectorXd& exponents, std::vector<double>& log_coeff,
                  std::vector<double>& expnt) {
  log_coeff.clear();
  expnt.clear();
  for (Eigen::Index x = 0; x < sw.lw.size(); ++x) {
    double c = coef_counts[x];
    if (c <= 0.0) continue;
    log_coeff.push_back(sw.ln_tokens + (sw.lw[x] - sw.lz) - std::log(sw.mass) + std::log(c));
    expnt.push_back(exponents[x]);
  }
}

RootResult solve_gathered(const Sweep& sw, const Eigen::VectorXd& coef_counts,
                          const Eigen::VectorXd& exponents, double target,
                          const IMConfig& cfg) {
  std::vector<double> log_coeff, expnt;
  gather_terms(sw, coef_counts, exponents, log_coeff, expnt);
  if (log_coeff.empty()) return {0.0, 0.0, false};  // property absent from the space
  if (target <= 0.0) return {kGammaFloor, 0.0, true};
  return solve_monotone_root(log_coeff, expnt, target, cfg);
}

RootResult closed_form_root(const Sweep& sw, const LogLinearModel& m, Eigen::Index i,
                            double target) {
  KahanSum num;
  for (Eigen::Index x = 0; x < sw.lw.size(); ++x) num.add(sw.rel[x] * m.counts(x, i));
  if (num.value() <= 0.0) return {0.0, 0.0, false};
  if (target <= 0.0) return {kGammaFloor, 0.0, true};
  double ln_model = sw.ln_tokens + std::log(num.value()) - std::log(sw.mass);
  double gamma = std::log(target) - ln_model;
  double residual = std::abs(std::expm1(ln_model + gamma - std::log(target)));
  return {gamma, residual, false};
}

}  // namespace

RootResult solve_monotone_root(const std::vector<double>& log_coeff,
                               const std::vector<double>& expnt, double target,
                               const IMConfig& cfg) {
  if (log_coeff.empty() || target <= 0.0)
    throw std::logic_error("solve_monotone_root: empty terms or non-positive target");
  const double ln_target = std::log(target);
  const std::size_t n = log_coeff.size();

  // F(gamma) = ln sum_k exp(lc_k + gamma e_k) - ln target, strictly
  // increasing and convex; F' is the softmax-weighted mean exponent.
  auto eval = [&](double gamma, double& deriv) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) mx = std::max(mx, log_coeff[k] + gamma * expnt[k]);
    KahanSum sum, wsum;
    for (std::size_t k = 0; k < n; ++k) {
      double w = std::exp(log_coeff[k] + gamma * expnt[k] - mx);
      sum.add(w);
      wsum.add(w * expnt[k]);
    }
    deriv = wsum.value() / sum.value();
    return mx + std::log(sum.value()) - ln_target;
  };

  double deriv = 0.0;
  double x = 0.0;
  double f = eval(x, deriv);
  if (std::abs(std::expm1(f)) <= cfg.root_tol) return {0.0, std::abs(std::expm1(f)), false};

  double lo, hi, step = 1.0;
  if (f > 0.0) {
    hi = 0.0;
    lo = -step;
    double d;
    while (eval(lo, d) > 0.0) {
      hi = lo;
      step *= 2.0;
      lo -= step;
      if (step > 1e8) throw std::logic_error("solve_monotone_root: no lower bracket");
    }
  } else {
    lo = 0.0;
    hi = step;
    double d;
    while (eval(hi, d) < 0.0) {
      lo = hi;
      step *= 2.0;
      hi += step;
      if (step > 1e8) throw std::logic_error("solve_monotone_root: no upper bracket");
    }
  }

  for (int it = 0; it < cfg.max_root_steps; ++it) {
    double candidate = x - f / deriv;
    if (!(candidate > lo && candidate < hi)) candidate = 0.5 * (lo + hi);
    x = candidate;
    f = eval(x, deriv);
    double residual = std::abs(std::expm1(f));
    if (residual <= cfg.root_tol) return {x, residual, false};
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) return {x, residual, false};
  }
  throw std::logic_error("solve_monotone_root: no convergence within max_root_steps");
}

double auxiliary(const Eigen::VectorXd& gamma, const LogLinearModel& m, const TreeSpace& s) {
  if (gamma.size() != m.lambda.size())
    throw std::logic_error("auxiliary: direction length does not match the parameter count");
  Eigen::VectorXd lw = log_weights(m);
  double lz = log_sum_exp(lw);
  Eigen::VectorXd rel = (lw.array() - lz).exp();

  // Expectation of sum_i (nu_i / nu_total) e^{gamma_i nu_total}; a tree
  // without any property occurrence keeps its unscaled e^0 mass. Formed as
  // a ratio of identically accumulated sums so the value is exactly 1 at
  // gamma = 0.
  KahanSum hnum, hden;
  for (Eigen::Index x = 0; x < lw.size(); ++x) {
    double total = m.nu_total[x];
    double h;
    if (total == 0.0) {
      h = 1.0;
    } else {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < gamma.size(); ++i)
        acc += m.counts(x, i) * std::exp(gamma[i] * total);
      h = acc / total;
    }
    hnum.add(rel[x] * h);
    hden.add(rel[x]);
  }
  double h_expect = hnum.value() / hden.value();

  KahanSum acc;
  for (const QueryTrees& q : s.queries) {
    double lse = log_sum_exp(lw, q.offset, q.size);
    KahanSum knum, kden;
    for (Eigen::Index i = 0; i < q.size; ++i) {
      double w = std::exp(lw[q.offset + i] - lse);
      knum.add(w * gamma.dot(m.counts.row(q.offset + i)));
      kden.add(w);
    }
    acc.add(static_cast<double>(q.count) * (knum.value() / kden.value()));
  }
  return acc.value() + static_cast<double>(s.total_tokens) * (1.0 - h_expect);
}

RootResult solve_update(Eigen::Index i, const LogLinearModel& m, const TreeSpace& s,
                        const IMConfig& cfg) {
  Sweep sw = make_sweep(m, s);
  return solve_gathered(sw, m.counts.col(i), m.nu_total, sw.target[i], cfg);
}

double closed_form_update(Eigen::Index i, const LogLinearModel& m, const TreeSpace& s) {
  if (!m.unit_total)
    throw std::logic_error("closed_form_update requires nu_total == 1 on every tree");
  Sweep sw = make_sweep(m, s);
  return closed_form_root(sw, m, i, sw.target[i]).gamma;
}

StepResult im_step(const LogLinearModel& m, const TreeSpace& s, const IMConfig& cfg) {
  Sweep sw = make_sweep(m, s);
  const Eigen::Index np = m.lambda.size();
  StepResult st;
  st.gamma.resize(np);
  st.residuals.resize(np);
  for (Eigen::Index i = 0; i < np; ++i) {
    RootResult r = m.unit_total
                       ? closed_form_root(sw, m, i, sw.target[i])
                       : solve_gathered(sw, m.counts.col(i), m.nu_total, sw.target[i], cfg);
    st.gamma[i] = r.gamma;
    st.residuals[i] = r.residual;
    st.clamped = st.clamped || r.clamped;
  }
  return st;
}

std::pair<LogLinearModel, IMTrace> estimate(const LogLinearModel& m, const TreeSpace& s,
                                            const IMConfig& cfg) {
  LogLinearModel cur = m;
  IMTrace trace;
  double loglik = log_likelihood(cur, s);
  trace.iterates.push_back({cur.lambda, loglik, {}, {}, false});

  for (int k = 0; k < cfg.max_iters; ++k) {
    StepResult st = im_step(cur, s, cfg);
    trace.iterates.back().gamma = st.gamma;
    trace.iterates.back().residuals = st.residuals;
    trace.iterates.back().clamped = st.clamped;

    cur.lambda += st.gamma;
    double next = log_likelihood(cur, s);
    if (next < loglik - 1e-12)
      throw std::logic_error("estimate: log-likelihood decreased from " +
                             std::to_string(loglik) + " to " + std::to_string(next) +
                             " at iteration " + std::to_string(k + 1) +
                             "; update solver is defective");
    trace.iterates.push_back({cur.lambda, next, {}, {}, false});
    if (std::abs(next - loglik) < cfg.loglik_tol) {
      trace.converged = true;
      loglik = next;
      break;
    }
    loglik = next;
  }
  return {std::move(cur), std::move(trace)};
}

}  // namespace loglin
