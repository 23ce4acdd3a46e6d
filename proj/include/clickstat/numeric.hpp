#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>

namespace clickstat {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Neumaier's variant of Kahan summation.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  Scalar value() const { return sum_ + compensation_; }

 private:
  Scalar sum_{0};
  Scalar compensation_{0};
};

template <typename Scalar>
Scalar log_binomial_coefficient(int n, int k) {
  using std::lgamma;
  return lgamma(Scalar(n + 1)) - lgamma(Scalar(k + 1)) - lgamma(Scalar(n - k + 1));
}

// Exact integer arithmetic up to n = 60, log space above.
template <typename Scalar>
Scalar binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return Scalar(0);
  if (k > n - k) k = n - k;
  if (n <= 60) {
    unsigned __int128 c = 1;
    for (int i = 0; i < k; ++i) c = c * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
    return static_cast<Scalar>(static_cast<std::uint64_t>(c));
  }
  using std::exp;
  return exp(log_binomial_coefficient<Scalar>(n, k));
}

template <typename Scalar>
Vector<Scalar> binomial_pmf(int trials, Scalar p) {
  Vector<Scalar> pmf = Vector<Scalar>::Zero(trials + 1);
  if (p <= Scalar(0)) {
    pmf(0) = Scalar(1);
    return pmf;
  }
  if (p >= Scalar(1)) {
    pmf(trials) = Scalar(1);
    return pmf;
  }
  using std::exp;
  using std::log;
  using std::log1p;
  using std::pow;
  if (trials <= 60) {
    for (int k = 0; k <= trials; ++k)
      pmf(k) = binomial_coefficient<Scalar>(trials, k) * pow(p, k) * pow(Scalar(1) - p, trials - k);
  } else {
    const Scalar log_p = log(p);
    const Scalar log_q = log1p(-p);
    for (int k = 0; k <= trials; ++k)
      pmf(k) = exp(log_binomial_coefficient<Scalar>(trials, k) + k * log_p + (trials - k) * log_q);
  }
  return pmf;
}

template <typename Scalar>
struct Moments {
  Scalar mean;
  Scalar variance;
};

/// Mean and variance of a distribution indexed by count 0, 1, 2, ...
/// Variance within round-off of zero is clamped to zero.
template <typename Derived>
Moments<typename Derived::Scalar> distribution_moments(const Eigen::MatrixBase<Derived>& probs) {
  using Scalar = typename Derived::Scalar;
  CompensatedSum<Scalar> mean_sum;
  for (Eigen::Index k = 0; k < probs.size(); ++k) mean_sum.add(Scalar(k) * probs(k));
  const Scalar mean = mean_sum.value();
  CompensatedSum<Scalar> var_sum;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    const Scalar d = Scalar(k) - mean;
    var_sum.add(d * d * probs(k));
  }
  Scalar variance = var_sum.value();
  if (variance < Scalar(0) && variance >= Scalar(-1e-12)) variance = Scalar(0);
  return {mean, variance};
}

template <typename Derived>
typename Derived::Scalar compensated_total(const Eigen::MatrixBase<Derived>& values) {
  CompensatedSum<typename Derived::Scalar> s;
  for (Eigen::Index i = 0; i < values.size(); ++i) s.add(values(i));
  return s.value();
}

}  // namespace clickstat
