#pragma once

#include <cstdint>

#include "mdiqds/count_table.hpp"
#include "mdiqds/keyrate.hpp"

/// How many signatures one acquisition supports, with one parameter
/// estimation shared by many signature blocks versus one signature per
/// acquisition.
namespace mdiqds::qds {

struct BlockPlan {
  bool secure = false;
  std::uint64_t z_pool = 0;
  std::uint64_t c_test = 0;
  std::uint64_t c_sig = 0;
  std::uint64_t signatures = 0;
  double p_e = 0.0;
  double e_sig_upper = 0.0;
  std::uint64_t l_sig = 0;
};

struct PlanBudgets {
  double test_fraction = 0.1;
  /// Spent once on decoy estimation for the table.
  double eps_pe = 5e-11;
  /// Sampling budget: split over every signature block (union bound).
  double eps_sampling = 5e-11;
  double p_rep_budget = 0.5e-10;
  decoy::Widening widening = decoy::Widening::kAdditive;
};

/// Smallest secure block size for the table's Z pool, and the number of
/// disjoint blocks it yields.
BlockPlan plan_multi_block(const CountTable& table, const IntensitySet& intensities, const PlanBudgets& budgets);

/// The whole non-test pool as a single signature block.
BlockPlan plan_single_block(const CountTable& table, const IntensitySet& intensities, const PlanBudgets& budgets);

struct ComparisonConfig {
  keyrate::SweepConfig link;  // pulse_budget is the total acquisition
  double distance_km = 25.0;
  double test_fraction = 0.1;
  /// Total failure budget, equal for both strategies.
  double total_budget = 1e-10;
  double p_rep_budget = 0.5e-10;
  std::uint64_t max_acquisitions = 1 << 16;
};

struct Comparison {
  BlockPlan multi;
  std::uint64_t baseline_signatures = 0;  // = number of acquisitions
  double ratio = 0.0;
};

/// Multi-block: one table over the whole budget, half of the failure budget
/// on estimation, half shared by the blocks. Baseline: the budget split into
/// K acquisitions with one signature each and total/K failure budget apiece;
/// reports the largest K that stays secure.
Comparison compare_multi_block(const ComparisonConfig& config);

}  // namespace mdiqds::qds
