#include "mdiqds/mathkit.hpp"

#include <cmath>
#include <string>

namespace mdiqds::mathkit {

namespace {

void require_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(x));
  }
}

}  // namespace

Probability::Probability(double value) : value_(value) { require_unit_interval(value, "probability"); }

FailureBudget::FailureBudget(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw DomainError("failure budget must lie in (0,1], got " + std::to_string(epsilon));
  }
}

double binary_entropy(double p) {
  require_unit_interval(p, "binary_entropy argument");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double inv_binary_entropy(double y) {
  require_unit_interval(y, "inv_binary_entropy argument");
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 0.5;
  double lo = 0.0;
  double hi = 0.5;
  // Fixed bracket width well inside the 1e-9 target; the iteration count is
  // input-independent so results are reproducible bit for bit.
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double serfling_deviation(std::uint64_t c_sig, std::uint64_t c_test, double eps) {
  if (c_sig == 0 || c_test == 0) throw DomainError("serfling_deviation needs non-zero sample sizes");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("serfling_deviation needs eps in (0,1]");
  const double k = static_cast<double>(c_sig);
  const double n = static_cast<double>(c_test);
  return std::sqrt((k + 1.0) * (k + n) * std::log(1.0 / eps) / (2.0 * n * k * k));
}

double serfling_sample_deviation(std::uint64_t sample, std::uint64_t population, double eps) {
  if (sample == 0 || population == 0) throw DomainError("serfling_sample_deviation needs non-zero sizes");
  if (sample > population) throw DomainError("sample larger than population");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("serfling_sample_deviation needs eps in (0,1]");
  const double n = static_cast<double>(sample);
  const double finite_correction = 1.0 - (n - 1.0) / static_cast<double>(population);
  return std::sqrt(std::log(1.0 / eps) * finite_correction / (2.0 * n));
}

double log_hoeffding_exponent_bound(double delta, std::uint64_t n) {
  if (!(delta >= 0.0)) throw DomainError("hoeffding bound needs delta >= 0");
  return -2.0 * delta * delta * static_cast<double>(n);
}

double hoeffding_exponent_bound(double delta, std::uint64_t n) {
  const double log_value = log_hoeffding_exponent_bound(delta, n);
  return std::min(1.0, std::exp(log_value));
}

double poisson_pmf(double mu, std::uint64_t n) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("poisson_pmf needs finite mu >= 0");
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  const double k = static_cast<double>(n);
  return std::exp(-mu + k * std::log(mu) - std::lgamma(k + 1.0));
}

double poisson_tail(double mu, std::uint64_t n_max) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("poisson_tail needs finite mu >= 0");
  if (mu == 0.0) return 0.0;
  // Sum the tail terms directly; the series decays geometrically once k > mu.
  double tail = 0.0;
  for (std::uint64_t k = n_max + 1;; ++k) {
    const double term = poisson_pmf(mu, k);
    tail += term;
    if (static_cast<double>(k) > mu && term < 1e-18 * std::max(tail, 1e-300)) break;
    if (term == 0.0 && static_cast<double>(k) > mu) break;
  }
  return tail;
}

}  // namespace mdiqds::mathkit
