#include "mdiqds/multiblock.hpp"

#include <algorithm>
#include <cmath>

#include "mdiqds/decoy.hpp"
#include "mdiqds/error.hpp"
#include "mdiqds/qds.hpp"

namespace mdiqds::qds {

namespace {

struct PoolStats {
  decoy::DecoyBounds bounds;
  std::uint64_t z_pool = 0;
  std::uint64_t c_test = 0;
  double e_test = 0.0;
};

PoolStats pool_stats(const CountTable& table, const IntensitySet& intensities, const PlanBudgets& budgets) {
  PoolStats s;
  const CountRecord& signal = table.at(table.signal_key());
  s.z_pool = signal.detected;
  s.c_test = static_cast<std::uint64_t>(std::llround(budgets.test_fraction * static_cast<double>(s.z_pool)));
  s.c_test = std::max<std::uint64_t>(s.c_test, 1);
  if (s.z_pool > 0) s.e_test = static_cast<double>(signal.errors) / static_cast<double>(s.z_pool);
  if (s.z_pool > s.c_test) s.bounds = decoy::estimate_bounds(table, intensities, budgets.eps_pe, {.widening = budgets.widening});
  return s;
}

// Evaluates one block size with per-block sampling budget eps.
BlockPlan evaluate(const PoolStats& s, std::uint64_t c_sig, double eps, double p_rep_budget) {
  BlockPlan plan;
  plan.z_pool = s.z_pool;
  plan.c_test = s.c_test;
  plan.c_sig = c_sig;
  const auto block = decoy::restrict_to_block(s.bounds, c_sig, s.z_pool, eps / 4.0);
  plan.p_e = eve_error_floor(std::min(block.s1_lower, static_cast<double>(c_sig)), c_sig, block.eph_upper);
  plan.e_sig_upper = qber_upper(s.e_test, s.c_test, c_sig, eps / 2.0);
  if (!(plan.p_e > plan.e_sig_upper)) return plan;
  const auto th = thresholds(plan.e_sig_upper, plan.p_e);
  plan.l_sig = signature_length(th.s_auth, th.s_ver, p_rep_budget);
  plan.secure = plan.l_sig <= c_sig;
  return plan;
}

// Smallest secure block size in [1, available] for a fixed eps, scanning a
// geometric grid and bisecting the first secure cell.
BlockPlan smallest_secure(const PoolStats& s, std::uint64_t available, double eps, double p_rep_budget) {
  std::uint64_t previous = 0;
  std::uint64_t c = 16;
  for (;;) {
    c = std::min(c, available);
    BlockPlan plan = evaluate(s, c, eps, p_rep_budget);
    if (plan.secure) {
      std::uint64_t lo = previous;  // insecure (or zero)
      std::uint64_t hi = c;         // secure
      while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        BlockPlan trial = evaluate(s, mid, eps, p_rep_budget);
        if (trial.secure) {
          hi = mid;
          plan = trial;
        } else {
          lo = mid;
        }
      }
      return plan;
    }
    if (c == available) return plan;
    previous = c;
    c = static_cast<std::uint64_t>(std::ceil(static_cast<double>(c) * 1.25));
  }
}

}  // namespace

BlockPlan plan_multi_block(const CountTable& table, const IntensitySet& intensities, const PlanBudgets& budgets) {
  const PoolStats s = pool_stats(table, intensities, budgets);
  if (s.z_pool <= s.c_test) return BlockPlan{false, s.z_pool, s.c_test};
  const std::uint64_t available = s.z_pool - s.c_test;
  // The sampling budget is shared by all blocks; iterate until the assumed
  // block count covers the one actually produced.
  std::uint64_t assumed = 1;
  BlockPlan plan;
  for (int iteration = 0; iteration < 32; ++iteration) {
    plan = smallest_secure(s, available, budgets.eps_sampling / static_cast<double>(assumed), budgets.p_rep_budget);
    if (!plan.secure) return plan;
    plan.signatures = available / plan.c_sig;
    if (plan.signatures <= assumed) return plan;
    assumed = plan.signatures;
  }
  return plan;
}

BlockPlan plan_single_block(const CountTable& table, const IntensitySet& intensities, const PlanBudgets& budgets) {
  const PoolStats s = pool_stats(table, intensities, budgets);
  if (s.z_pool <= s.c_test) return BlockPlan{false, s.z_pool, s.c_test};
  BlockPlan plan = evaluate(s, s.z_pool - s.c_test, budgets.eps_sampling, budgets.p_rep_budget);
  plan.signatures = plan.secure ? 1 : 0;
  return plan;
}

Comparison compare_multi_block(const ComparisonConfig& config) {
  Comparison out;
  const auto& in = config.link.intensities;

  PlanBudgets multi_budgets{config.test_fraction, config.total_budget / 2.0, config.total_budget / 2.0,
                            config.p_rep_budget, config.link.security.widening};
  const CountTable full = keyrate::synthesize_table(config.link, config.distance_km, config.link.seed);
  out.multi = plan_multi_block(full, in, multi_budgets);

  auto acquisition_secure = [&](std::uint64_t k) {
    keyrate::SweepConfig part = config.link;
    part.pulse_budget = config.link.pulse_budget / static_cast<double>(k);
    const double share = config.total_budget / static_cast<double>(k);
    PlanBudgets budgets{config.test_fraction, share / 2.0, share / 2.0, config.p_rep_budget,
                        config.link.security.widening};
    try {
      const CountTable table = keyrate::synthesize_table(part, config.distance_km, config.link.seed * 7919ULL + k);
      return plan_single_block(table, in, budgets).secure;
    } catch (const InconsistentCountsError&) {
      return false;
    }
  };

  // Largest K whose acquisitions each still yield a secure signature.
  std::uint64_t good = 0;
  std::uint64_t k = 1;
  while (k <= config.max_acquisitions && acquisition_secure(k)) {
    good = k;
    k *= 2;
  }
  if (good > 0) {
    std::uint64_t lo = good;
    std::uint64_t hi = std::min(k, config.max_acquisitions + 1);
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (acquisition_secure(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    good = lo;
  }
  out.baseline_signatures = good;
  const double multi = static_cast<double>(out.multi.secure ? out.multi.signatures : 0);
  out.ratio = good > 0 ? multi / static_cast<double>(good) : (multi > 0 ? INFINITY : 0.0);
  return out;
}

}  // namespace mdiqds::qds
