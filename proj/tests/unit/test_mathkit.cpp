#include <doctest.h>

#include <cmath>

#include "mdiqds/error.hpp"
#include "mdiqds/mathkit.hpp"

using namespace mdiqds;
using namespace mdiqds::mathkit;

TEST_SUITE("mathkit") {

TEST_CASE("domain types reject out-of-range values") {
  CHECK_NOTHROW(Probability(0.0));
  CHECK_NOTHROW(Probability(1.0));
  CHECK_THROWS_AS(Probability(-1e-12), DomainError);
  CHECK_THROWS_AS(Probability(1.0 + 1e-12), DomainError);
  CHECK_THROWS_AS(Probability(std::nan("")), DomainError);
  CHECK_NOTHROW(FailureBudget(1.0));
  CHECK_THROWS_AS(FailureBudget(0.0), DomainError);
  CHECK_THROWS_AS(FailureBudget(1.5), DomainError);
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(std::abs(binary_entropy(0.053) - 0.2990) < 1e-4);
  for (double p = 0.0; p <= 1.0; p += 0.01) {
    CHECK(binary_entropy(p) == doctest::Approx(binary_entropy(1.0 - p)).epsilon(1e-12));
    CHECK(binary_entropy(p) >= 0.0);
    CHECK(binary_entropy(p) <= 1.0);
  }
  CHECK_THROWS_AS(binary_entropy(-0.1), DomainError);
  CHECK_THROWS_AS(binary_entropy(1.1), DomainError);
}

TEST_CASE("inverse binary entropy") {
  CHECK(inv_binary_entropy(1.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(inv_binary_entropy(0.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(inv_binary_entropy(0.18685) - 0.0286) < 5e-4);
  CHECK_THROWS_AS(inv_binary_entropy(-0.01), DomainError);
  CHECK_THROWS_AS(inv_binary_entropy(1.01), DomainError);
}

TEST_CASE("inverse entropy round trip over a grid") {
  for (int i = 0; i <= 1000; ++i) {
    const double y = i / 1000.0;
    const double p = inv_binary_entropy(y);
    CAPTURE(y);
    CHECK(p >= 0.0);
    CHECK(p <= 0.5);
    CHECK(std::abs(binary_entropy(p) - y) < 1e-8);
  }
}

TEST_CASE("serfling deviation") {
  // Direct evaluation of sqrt((k+1)(k+n) ln(1/eps) / (2 n k^2)).
  auto oracle = [](double k, double n, double eps) {
    return std::sqrt((k + 1) * (k + n) * std::log(1 / eps) / (2 * n * k * k));
  };
  CHECK(std::abs(serfling_deviation(2'500'000, 1'714'426, 2e-11) - 0.00348) < 5e-5);
  CHECK(std::abs(serfling_deviation(150'000, 46'979'354, 2e-11) - 0.00908) < 5e-5);
  CHECK(serfling_deviation(2'500'000, 1'714'426, 2e-11) ==
        doctest::Approx(oracle(2'500'000, 1'714'426, 2e-11)).epsilon(1e-12));
  CHECK(serfling_deviation(7, 3, 1.0) == 0.0);
  CHECK(serfling_deviation(2'500'000, 1'714'426, 1.0) == 0.0);
  CHECK_THROWS_AS(serfling_deviation(0, 10, 0.1), DomainError);
  CHECK_THROWS_AS(serfling_deviation(10, 0, 0.1), DomainError);
}

TEST_CASE("serfling deviation decreases in c_test and eps") {
  double previous = serfling_deviation(1000, 10, 1e-10);
  for (std::uint64_t n = 20; n <= 1'000'000; n *= 2) {
    const double d = serfling_deviation(1000, n, 1e-10);
    CHECK(d < previous);
    previous = d;
  }
  previous = serfling_deviation(1000, 1000, 1e-30);
  for (double eps = 1e-29; eps < 1.0; eps *= 10) {
    const double d = serfling_deviation(1000, 1000, eps);
    CHECK(d < previous);
    previous = d;
  }
}

TEST_CASE("serfling sample deviation") {
  CHECK(serfling_sample_deviation(100, 1000, 1.0) == 0.0);
  const double expected = std::sqrt(std::log(1e10) * (1.0 - 99.0 / 1000.0) / 200.0);
  CHECK(serfling_sample_deviation(100, 1000, 1e-10) == doctest::Approx(expected).epsilon(1e-12));
  // Whole population sampled: the finite-population factor nearly vanishes.
  CHECK(serfling_sample_deviation(1000, 1000, 1e-10) < serfling_sample_deviation(1000, 1'000'000, 1e-10));
}

TEST_CASE("hoeffding tail") {
  CHECK(hoeffding_exponent_bound(0.0, 1000) == 1.0);
  CHECK(hoeffding_exponent_bound(0.1, 0) == 1.0);
  CHECK(log_hoeffding_exponent_bound(0.0067, 2'500'000) == doctest::Approx(-224.45).epsilon(1e-6));
  const double tail = hoeffding_exponent_bound(0.0067, 2'500'000);
  CHECK(tail == doctest::Approx(std::exp(-224.45)).epsilon(1e-9));
  CHECK(tail == doctest::Approx(2.3e-98).epsilon(0.05));
  // Underflows in linear space but the log stays finite.
  CHECK(hoeffding_exponent_bound(1.0, 1'000'000) == 0.0);
  CHECK(log_hoeffding_exponent_bound(1.0, 1'000'000) == doctest::Approx(-2e6));
  CHECK_THROWS_AS(hoeffding_exponent_bound(-0.1, 10), DomainError);
}

TEST_CASE("poisson pmf") {
  CHECK(poisson_pmf(0.0, 0) == 1.0);
  CHECK(poisson_pmf(0.0, 1) == 0.0);
  CHECK(std::abs(poisson_pmf(0.5, 1) - 0.5 * std::exp(-0.5)) < 1e-15);
  CHECK(std::abs(poisson_pmf(0.5, 1) - 0.3033) < 1e-4);
  CHECK(poisson_pmf(1000.0, 1000) == doctest::Approx(0.012614611348721).epsilon(1e-9));
  CHECK_THROWS_AS(poisson_pmf(-0.1, 0), DomainError);
}

TEST_CASE("poisson pmf sums to one") {
  for (double mu : {0.0, 1e-3, 0.02, 0.5, 1.0, 4.0, 30.0, 250.0}) {
    const auto n_max = static_cast<std::uint64_t>(mu + 20.0 * std::sqrt(mu) + 21.0);
    double sum = 0.0;
    for (std::uint64_t n = 0; n <= n_max; ++n) sum += poisson_pmf(mu, n);
    CAPTURE(mu);
    CHECK(std::abs(1.0 - sum) < 1e-12);
    CHECK(poisson_tail(mu, n_max) < 1e-12);
  }
}

TEST_CASE("poisson tail matches direct complement where it is well conditioned") {
  for (double mu : {0.1, 0.5, 0.8}) {
    for (std::uint64_t n_max : {0, 1, 2, 4}) {
      double head = 0.0;
      for (std::uint64_t n = 0; n <= n_max; ++n) head += poisson_pmf(mu, n);
      CHECK(poisson_tail(mu, n_max) == doctest::Approx(1.0 - head).epsilon(1e-9));
    }
  }
  CHECK(poisson_tail(0.8, 12) < 1e-10);
  CHECK(poisson_tail(0.8, 12) > 0.0);
}

}
