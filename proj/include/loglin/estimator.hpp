#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "loglin/model.hpp"

namespace loglin {

struct IMConfig {
  double loglik_tol = 1e-6;  // stop when |L(t+1) - L(t)| falls below
  double root_tol = 1e-10;   // relative residual bound for update roots
  int max_iters = 1000;
  int max_root_steps = 200;
};

/// Floor applied to an update coordinate whose conditional target mass is
/// zero; keeps the distribution strictly positive.
inline constexpr double kGammaFloor = -20.723265836946414;  // ln 1e-9

struct RootResult {
  double gamma = 0.0;
  double residual = 0.0;  // |g(beta)| / target at the returned root
  bool clamped = false;
};

/// Solves sum_k exp(log_coeff[k]) * beta^expnt[k] = target for beta > 0 and
/// returns gamma = ln beta. Coefficients are positive and exponents >= 1,
/// so the left side is strictly increasing; Newton iteration on ln beta
/// with a bisection safeguard on a bracketing interval.
RootResult solve_monotone_root(const std::vector<double>& log_coeff,
                               const std::vector<double>& expnt, double target,
                               const IMConfig& cfg);

/// Auxiliary lower bound on the log-likelihood improvement of replacing
/// lambda by lambda + gamma. Zero at gamma = 0, exactly.
double auxiliary(const Eigen::VectorXd& gamma, const LogLinearModel& m, const TreeSpace& s);

/// The update equation for coordinate i: the unique gamma_i with
///   sum_y count(y) k[nu_i | y]  =  sum_y count(y) E_p[nu_i e^{gamma_i nu_total}].
RootResult solve_update(Eigen::Index i, const LogLinearModel& m, const TreeSpace& s,
                        const IMConfig& cfg);

/// Closed form ln(conditional total / model total) for the special case
/// nu_total == 1 on every tree of the space.
double closed_form_update(Eigen::Index i, const LogLinearModel& m, const TreeSpace& s);

struct StepResult {
  Eigen::VectorXd gamma;
  Eigen::VectorXd residuals;
  bool clamped = false;
};

/// One iterative-maximization step: per-coordinate update roots (closed
/// form when nu_total == 1 globally), applied jointly.
StepResult im_step(const LogLinearModel& m, const TreeSpace& s, const IMConfig& cfg);

struct IMIterate {
  Eigen::VectorXd lambda;
  double loglik;
  Eigen::VectorXd gamma;      // update applied to leave this iterate (empty on the last)
  Eigen::VectorXd residuals;  // per-coordinate root residuals of that update
  bool clamped = false;
};

struct IMTrace {
  std::vector<IMIterate> iterates;  // iterates[t] is the state after t steps
  bool converged = false;
};

/// Iterates im_step until the log-likelihood gain falls below
/// cfg.loglik_tol or cfg.max_iters steps were taken. The log-likelihood is
/// non-decreasing along the trace; a decrease beyond 1e-12 aborts with a
/// diagnostic, as it indicates a solver defect.
std::pair<LogLinearModel, IMTrace> estimate(const LogLinearModel& m, const TreeSpace& s,
                                            const IMConfig& cfg);

}  // namespace loglin
