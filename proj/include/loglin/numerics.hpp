#pragma once

#include <Eigen/Core>
#include <cmath>

namespace loglin {

/// Kahan compensated accumulator.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline double kahan_total(const Eigen::VectorXd& v) {
  KahanSum k;
  for (Eigen::Index i = 0; i < v.size(); ++i) k.add(v[i]);
  return k.value();
}

inline double kahan_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  KahanSum k;
  for (Eigen::Index i = 0; i < a.size(); ++i) k.add(a[i] * b[i]);
  return k.value();
}

/// log(sum(exp(v[off..off+len)))). Exact for a single element.
inline double log_sum_exp(const Eigen::VectorXd& v, Eigen::Index off, Eigen::Index len) {
  if (len == 1) return v[off];
  double m = v[off];
  for (Eigen::Index i = 1; i < len; ++i) m = std::max(m, v[off + i]);
  KahanSum k;
  for (Eigen::Index i = 0; i < len; ++i) k.add(std::exp(v[off + i] - m));
  return m + std::log(k.value());
}

inline double log_sum_exp(const Eigen::VectorXd& v) { return log_sum_exp(v, 0, v.size()); }

}  // namespace loglin
