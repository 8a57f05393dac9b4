#include "mdiqds/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdiqds/error.hpp"

namespace mdiqds::lp {

namespace {

constexpr double kPivotTolerance = 1e-11;
constexpr double kCostTolerance = 1e-12;
constexpr std::size_t kDegenerateStreak = 50;

// Dense simplex tableau over non-negative variables y >= 0. Row `rows_` is
// the objective row holding reduced costs; column `cols_` holds the rhs.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cells_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return cells_[r * (cols_ + 1) + c]; }
  [[nodiscard]] double at(std::size_t r, std::size_t c) const { return cells_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  [[nodiscard]] double rhs(std::size_t r) const { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }
  [[nodiscard]] const std::vector<std::size_t>& basis() const { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double factor = at(r, pc);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= factor * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Loads `costs` into the objective row and prices out the basic columns.
  void set_objective(const std::vector<double>& costs) {
    for (std::size_t c = 0; c <= cols_; ++c) cost(c) = c < costs.size() ? costs[c] : 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = cost(basis_[r]);
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) cost(c) -= cb * at(r, c);
    }
  }

  // Minimises the loaded objective over columns with allowed[c] true.
  // Dantzig pricing, falling back to Bland's rule after a run of
  // degenerate pivots so cycling cannot occur.
  Status minimise(const std::vector<bool>& allowed) {
    std::size_t degenerate = 0;
    for (;;) {
      const bool bland = degenerate >= kDegenerateStreak;
      std::size_t entering = cols_;
      double best = -kCostTolerance;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (!allowed[c]) continue;
        const double d = cost(c);
        if (d < best) {
          entering = c;
          if (bland) break;
          best = d;
        }
      }
      if (entering == cols_) return Status::kOptimal;

      std::size_t leaving = rows_;
      double ratio = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, entering);
        if (a <= kPivotTolerance) continue;
        const double q = std::max(0.0, rhs(r)) / a;
        if (leaving == rows_ || q < ratio - 1e-15 ||
            (q <= ratio + 1e-15 && basis_[r] < basis_[leaving])) {
          leaving = r;
          ratio = q;
        }
      }
      if (leaving == rows_) return Status::kUnbounded;
      degenerate = ratio <= 1e-15 ? degenerate + 1 : 0;
      pivot(leaving, entering);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> cells_;
  std::vector<std::size_t> basis_;
};

struct Row {
  std::vector<double> coefficients;  // over shifted variables y = x - lower
  Relation relation;
  double rhs;
};

void validate(const Problem& problem) {
  const std::size_t n = problem.objective.size();
  if (n == 0) throw DomainError("LP needs at least one variable");
  if (n > kMaxVariables) throw DomainError("LP has " + std::to_string(n) + " variables, limit is 200");
  if (!problem.bounds.empty() && problem.bounds.size() != n) {
    throw DomainError("LP bounds size does not match objective size");
  }
  for (const auto& b : problem.bounds) {
    if (!std::isfinite(b.lower)) throw DomainError("LP variable lower bounds must be finite");
    if (b.upper < b.lower) throw DomainError("LP variable has upper bound below lower bound");
  }
  for (const auto& c : problem.constraints) {
    if (c.coefficients.size() != n) throw DomainError("LP constraint size does not match objective size");
    if (!std::isfinite(c.rhs)) throw DomainError("LP constraint rhs must be finite");
  }
}

// One solve without lexicographic refinement. Objective is minimised.
Solution solve_once(const std::vector<double>& min_objective, const std::vector<Row>& rows_in,
                    const std::vector<VariableBounds>& bounds) {
  const std::size_t n = min_objective.size();

  std::vector<Row> rows = rows_in;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(bounds[j].upper)) {
      Row r{std::vector<double>(n, 0.0), Relation::kLessEqual, bounds[j].upper - bounds[j].lower};
      r.coefficients[j] = 1.0;
      rows.push_back(std::move(r));
    }
  }
  for (auto& r : rows) {
    double scale = 0.0;
    for (double a : r.coefficients) scale = std::max(scale, std::abs(a));
    if (scale > 0.0) {
      for (double& a : r.coefficients) a /= scale;
      r.rhs /= scale;
    }
    if (r.rhs < 0.0) {
      for (double& a : r.coefficients) a = -a;
      r.rhs = -r.rhs;
      if (r.relation == Relation::kLessEqual) {
        r.relation = Relation::kGreaterEqual;
      } else if (r.relation == Relation::kGreaterEqual) {
        r.relation = Relation::kLessEqual;
      }
    }
  }

  const std::size_t m = rows.size();
  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  for (const auto& r : rows) {
    if (r.relation != Relation::kEqual) ++slack_count;
    if (r.relation != Relation::kLessEqual) ++artificial_count;
  }
  const std::size_t first_slack = n;
  const std::size_t first_artificial = n + slack_count;
  const std::size_t cols = n + slack_count + artificial_count;

  Tableau t(m, cols);
  std::size_t next_slack = first_slack;
  std::size_t next_artificial = first_artificial;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = rows[i].coefficients[j];
    t.rhs(i) = rows[i].rhs;
    switch (rows[i].relation) {
      case Relation::kLessEqual:
        t.at(i, next_slack) = 1.0;
        t.basis()[i] = next_slack++;
        break;
      case Relation::kGreaterEqual:
        t.at(i, next_slack++) = -1.0;
        t.at(i, next_artificial) = 1.0;
        t.basis()[i] = next_artificial++;
        break;
      case Relation::kEqual:
        t.at(i, next_artificial) = 1.0;
        t.basis()[i] = next_artificial++;
        break;
    }
  }

  std::vector<bool> allowed(cols, true);
  if (artificial_count > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t c = first_artificial; c < cols; ++c) phase1[c] = 1.0;
    t.set_objective(phase1);
    t.minimise(allowed);
    double infeasibility = 0.0;
    double rhs_scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      rhs_scale = std::max(rhs_scale, std::abs(rows[i].rhs));
      if (t.basis()[i] >= first_artificial) infeasibility += std::abs(t.rhs(i));
    }
    if (infeasibility > 1e-9 * rhs_scale) return Solution{Status::kInfeasible, 0.0, {}};
    // Drive zero-valued artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] < first_artificial) continue;
      for (std::size_t c = 0; c < first_artificial; ++c) {
        if (std::abs(t.at(i, c)) > 1e-9) {
          t.pivot(i, c);
          break;
        }
      }
    }
    for (std::size_t c = first_artificial; c < cols; ++c) allowed[c] = false;
  }

  t.set_objective(min_objective);
  if (t.minimise(allowed) == Status::kUnbounded) return Solution{Status::kUnbounded, 0.0, {}};

  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis()[i] < n) x[t.basis()[i]] = std::max(0.0, t.rhs(i));
  }
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = std::min(x[j] + bounds[j].lower, bounds[j].upper);
  }
  double value = 0.0;
  for (std::size_t j = 0; j < n; ++j) value += min_objective[j] * x[j];
  return Solution{Status::kOptimal, value, std::move(x)};
}

}  // namespace

Solution solve_bounded_lp(const Problem& problem, const Options& options) {
  validate(problem);
  const std::size_t n = problem.objective.size();
  std::vector<VariableBounds> bounds =
      problem.bounds.empty() ? std::vector<VariableBounds>(n) : problem.bounds;

  const double sign = problem.sense == Sense::kMaximize ? -1.0 : 1.0;
  std::vector<double> min_objective(n);
  for (std::size_t j = 0; j < n; ++j) min_objective[j] = sign * problem.objective[j];

  std::vector<Row> rows;
  rows.reserve(problem.constraints.size() + n);
  for (const auto& c : problem.constraints) {
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) shift += c.coefficients[j] * bounds[j].lower;
    rows.push_back(Row{c.coefficients, c.relation, c.rhs - shift});
  }

  Solution best = solve_once(min_objective, rows, bounds);
  if (best.status != Status::kOptimal) return best;

  if (options.lexicographic_ties) {
    // Pin the objective at its optimum (within tolerance), then minimise
    // each coordinate in turn, freezing it before moving on.
    const double slack = options.tolerance * std::max(1.0, std::abs(best.optimum));
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) shift += min_objective[j] * bounds[j].lower;
    rows.push_back(Row{min_objective, Relation::kLessEqual, best.optimum + slack - shift});
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> unit(n, 0.0);
      unit[k] = 1.0;
      Solution refined = solve_once(unit, rows, bounds);
      if (refined.status != Status::kOptimal) break;
      const double pinned = refined.assignment[k];
      const double pin_slack = 1e-10 * std::max(1.0, std::abs(pinned));
      std::vector<double> pin(n, 0.0);
      pin[k] = 1.0;
      rows.push_back(Row{pin, Relation::kLessEqual, pinned + pin_slack - bounds[k].lower});
      best.assignment = std::move(refined.assignment);
    }
    double value = 0.0;
    for (std::size_t j = 0; j < n; ++j) value += min_objective[j] * best.assignment[j];
    best.optimum = value;
  }

  best.optimum *= sign;
  return best;
}

}  // namespace mdiqds::lp
