#pragma once

#include <cstdint>

#include "mdiqds/error.hpp"

/// Numerical kernels shared by the analysis stack: entropy, tail bounds
/// and Poisson statistics. All functions are pure.
namespace mdiqds::mathkit {

/// A probability in [0, 1].
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value);
  [[nodiscard]] constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }  // NOLINT(google-explicit-constructor)

 private:
  double value_ = 0.0;
};

/// A security failure probability in (0, 1].
class FailureBudget {
 public:
  explicit FailureBudget(double epsilon);
  [[nodiscard]] constexpr double value() const { return epsilon_; }
  constexpr operator double() const { return epsilon_; }  // NOLINT(google-explicit-constructor)

 private:
  double epsilon_;
};

/// h(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0.
double binary_entropy(double p);

/// Inverse of h on the monotone branch [0, 1/2], by bisection to 1e-9.
double inv_binary_entropy(double y);

/// Additive deviation of the error rate of a random c_sig-sized subset given
/// the rate measured on a disjoint random c_test-sized sample:
///   sqrt[(c_sig+1)(c_sig+c_test) ln(1/eps) / (2 c_test c_sig^2)].
double serfling_deviation(std::uint64_t c_sig, std::uint64_t c_test, double eps);

/// Serfling deviation of the mean of a size-`sample` draw without
/// replacement from a population of size `population`:
///   sqrt[ ln(1/eps) (1 - (sample-1)/population) / (2 sample) ].
double serfling_sample_deviation(std::uint64_t sample, std::uint64_t population, double eps);

/// Hoeffding tail exp(-2 delta^2 n), clamped to [0, 1].
double hoeffding_exponent_bound(double delta, std::uint64_t n);

/// Natural log of the Hoeffding tail, -2 delta^2 n. Stays finite where the
/// clamped value underflows to zero.
double log_hoeffding_exponent_bound(double delta, std::uint64_t n);

/// Poisson probability e^-mu mu^n / n!, evaluated in log space.
double poisson_pmf(double mu, std::uint64_t n);

/// 1 - sum_{k<=n_max} poisson_pmf(mu, k), computed without cancellation.
double poisson_tail(double mu, std::uint64_t n_max);

}  // namespace mdiqds::mathkit
