#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "mdiqds/error.hpp"
#include "mdiqds/lp.hpp"
#include "mdiqds/rng.hpp"

using namespace mdiqds;
using namespace mdiqds::lp;

namespace {

// Gaussian elimination with partial pivoting; nullopt when singular.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-10) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

// Optimum over all vertices of a bounded polytope: every choice of n
// active hyperplanes among the constraints and the box faces.
std::optional<double> brute_force(const Problem& p) {
  const std::size_t n = p.objective.size();
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (const auto& c : p.constraints) {
    rows.push_back(c.coefficients);
    rhs.push_back(c.rhs);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    rows.push_back(e);
    rhs.push_back(p.bounds[j].lower);
    rows.push_back(e);
    rhs.push_back(p.bounds[j].upper);
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] < p.bounds[j].lower - 1e-9 || x[j] > p.bounds[j].upper + 1e-9) return false;
    for (const auto& c : p.constraints) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += c.coefficients[j] * x[j];
      if (c.relation == Relation::kLessEqual && lhs > c.rhs + 1e-9) return false;
      if (c.relation == Relation::kGreaterEqual && lhs < c.rhs - 1e-9) return false;
      if (c.relation == Relation::kEqual && std::abs(lhs - c.rhs) > 1e-9) return false;
    }
    return true;
  };
  std::optional<double> best;
  const std::size_t m = rows.size();
  std::vector<bool> pick(m, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n), true);
  std::sort(pick.begin(), pick.end());
  do {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < m; ++i)
      if (pick[i]) {
        a.push_back(rows[i]);
        b.push_back(rhs[i]);
      }
    const auto x = solve_square(a, b);
    if (!x || !feasible(*x)) continue;
    double value = 0.0;
    for (std::size_t j = 0; j < n; ++j) value += p.objective[j] * (*x)[j];
    if (!best || (p.sense == Sense::kMinimize ? value < *best : value > *best)) best = value;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("single variable maximum") {
  Problem p;
  p.sense = Sense::kMaximize;
  p.objective = {1.0};
  p.constraints = {{{1.0}, Relation::kLessEqual, 3.0}};
  p.bounds = {{0.0, 10.0}};
  const auto s = solve_bounded_lp(p);
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.optimum == doctest::Approx(3.0));
  CHECK(s.assignment[0] == doctest::Approx(3.0));
}

TEST_CASE("two variable minimum with lexicographic tie break") {
  Problem p;
  p.objective = {1.0, 1.0};
  p.constraints = {{{1.0, 2.0}, Relation::kGreaterEqual, 2.0}};
  p.bounds = {{0.0, 1.0}, {0.0, 1.0}};
  const auto s = solve_bounded_lp(p);
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.optimum == doctest::Approx(1.0));
  CHECK(s.assignment[0] == doctest::Approx(0.0));
  CHECK(s.assignment[1] == doctest::Approx(1.0));
}

TEST_CASE("degenerate optimum face resolves to the smallest assignment") {
  Problem p;
  p.objective = {1.0, 1.0};
  p.constraints = {{{1.0, 1.0}, Relation::kGreaterEqual, 1.0}};
  p.bounds = {{0.0, 1.0}, {0.0, 1.0}};
  const auto s = solve_bounded_lp(p);
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.assignment[0] == doctest::Approx(0.0));
  CHECK(s.assignment[1] == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded") {
  Problem p;
  p.objective = {1.0};
  p.constraints = {{{1.0}, Relation::kGreaterEqual, 2.0}};
  p.bounds = {{0.0, 1.0}};
  CHECK(solve_bounded_lp(p).status == Status::kInfeasible);

  Problem q;
  q.sense = Sense::kMaximize;
  q.objective = {1.0, 0.0};
  q.constraints = {{{0.0, 1.0}, Relation::kLessEqual, 1.0}};
  CHECK(solve_bounded_lp(q).status == Status::kUnbounded);
}

TEST_CASE("malformed problems are rejected") {
  Problem p;
  p.objective = {1.0, 1.0};
  p.constraints = {{{1.0}, Relation::kLessEqual, 1.0}};
  CHECK_THROWS_AS(solve_bounded_lp(p), DomainError);

  Problem q;
  q.objective = {1.0};
  q.bounds = {{2.0, 1.0}};
  CHECK_THROWS_AS(solve_bounded_lp(q), DomainError);

  Problem r;
  r.objective = {1.0};
  r.bounds = {{-std::numeric_limits<double>::infinity(), 1.0}};
  CHECK_THROWS_AS(solve_bounded_lp(r), DomainError);

  Problem big;
  big.objective.assign(kMaxVariables + 1, 1.0);
  CHECK_THROWS_AS(solve_bounded_lp(big), DomainError);
}

TEST_CASE("equality constraints and shifted lower bounds") {
  Problem p;
  p.objective = {2.0, -1.0, 0.5};
  p.constraints = {{{1.0, 1.0, 1.0}, Relation::kEqual, 4.0}, {{1.0, -1.0, 0.0}, Relation::kLessEqual, 1.0}};
  p.bounds = {{1.0, 3.0}, {-1.0, 2.0}, {0.5, 5.0}};
  const auto s = solve_bounded_lp(p);
  REQUIRE(s.status == Status::kOptimal);
  const auto oracle = brute_force(p);
  REQUIRE(oracle);
  CHECK(s.optimum == doctest::Approx(*oracle).epsilon(1e-8));
}

TEST_CASE("matches vertex enumeration on random small instances") {
  Rng rng = make_rng(2024);
  auto coef = [&] { return std::round((uniform_unit(rng) * 8.0 - 4.0) * 4.0) / 4.0; };
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Problem p;
    const std::size_t n = 1 + uniform_below(rng, 4);
    const std::size_t m = uniform_below(rng, 5);
    p.sense = bernoulli(rng, 0.5) ? Sense::kMinimize : Sense::kMaximize;
    for (std::size_t j = 0; j < n; ++j) {
      p.objective.push_back(coef());
      const double lo = std::round(uniform_unit(rng) * 4.0 - 2.0);
      p.bounds.push_back({lo, lo + 1.0 + std::round(uniform_unit(rng) * 4.0)});
    }
    for (std::size_t i = 0; i < m; ++i) {
      Constraint c;
      for (std::size_t j = 0; j < n; ++j) c.coefficients.push_back(coef());
      const auto r = uniform_below(rng, 5);
      c.relation = r < 2 ? Relation::kLessEqual : (r < 4 ? Relation::kGreaterEqual : Relation::kEqual);
      c.rhs = coef() * 2.0;
      p.constraints.push_back(c);
    }
    CAPTURE(trial);
    const auto oracle = brute_force(p);
    const auto s = solve_bounded_lp(p);
    if (!oracle) {
      CHECK(s.status == Status::kInfeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(s.status == Status::kOptimal);
    CHECK(s.optimum == doctest::Approx(*oracle).epsilon(1e-7).scale(1.0));
    ++optimal;
  }
  // Both branches exercised.
  CHECK(optimal > 100);
  CHECK(infeasible > 10);
}

TEST_CASE("repeated solves are bit-identical") {
  Problem p;
  p.objective = {1.0, 2.0, 3.0};
  p.constraints = {{{1.0, 1.0, 1.0}, Relation::kGreaterEqual, 1.5}, {{0.0, 1.0, -1.0}, Relation::kEqual, 0.0}};
  p.bounds = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
  const auto a = solve_bounded_lp(p);
  const auto b = solve_bounded_lp(p);
  CHECK(a.optimum == b.optimum);
  CHECK(a.assignment == b.assignment);
}

}
