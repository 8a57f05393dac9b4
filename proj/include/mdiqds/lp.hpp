#pragma once

#include <cstddef>
#include <limits>
#include <vector>

/// Small dense linear programs with box-bounded variables, solved by a
/// two-phase tableau simplex. Sized for the decoy-state estimation
/// problems (at most a few hundred variables).
namespace mdiqds::lp {

enum class Sense { kMinimize, kMaximize };
enum class Relation { kLessEqual, kGreaterEqual, kEqual };
enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Constraint {
  std::vector<double> coefficients;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

/// Variable box. The lower bound must be finite; the upper may be +inf.
struct VariableBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

struct Problem {
  Sense sense = Sense::kMinimize;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<VariableBounds> bounds;  // empty means all [0, +inf)
};

struct Solution {
  Status status = Status::kInfeasible;
  double optimum = 0.0;
  std::vector<double> assignment;
};

struct Options {
  /// Among optimal vertices, return the lexicographically smallest
  /// assignment (costs one extra solve per variable).
  bool lexicographic_ties = true;
  /// Relative tolerance on the optimum.
  double tolerance = 1e-8;
};

inline constexpr std::size_t kMaxVariables = 200;

/// Solves the problem. Throws DomainError on malformed input (dimension
/// mismatch, too many variables, infinite lower bound, inverted box).
Solution solve_bounded_lp(const Problem& problem, const Options& options = {});

}  // namespace mdiqds::lp
