#include "mdiqds/decoy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "mdiqds/error.hpp"
#include "mdiqds/lp.hpp"
#include "mdiqds/mathkit.hpp"

namespace mdiqds::decoy {

namespace {

constexpr std::array<IntensityLabel, 3> kDecoyLabels{IntensityLabel::kU, IntensityLabel::kV, IntensityLabel::kW};

// One decoy configuration: its photon-number weights over the LP variables,
// the weight mass left outside the cutoff, and widened rates.
struct DecoyRow {
  std::vector<double> weights;
  double tail = 0.0;
  RateInterval gain;
  RateInterval error_gain;
  std::uint64_t sent = 0;
  double single_weight = 0.0;  // weight of the (1) or (1,1) variable
};

// Variable layout: QKD uses Y_n for n <= cutoff; MDI uses Y_{n,m} for
// n + m <= cutoff, enumerated n-major.
struct VariableMap {
  ProtocolMode mode;
  std::size_t cutoff;
  std::vector<std::pair<std::size_t, std::size_t>> photons;
  std::size_t single = 0;

  VariableMap(ProtocolMode m, std::size_t c) : mode(m), cutoff(c) {
    for (std::size_t n = 0; n <= cutoff; ++n) {
      if (mode == ProtocolMode::kQkd) {
        if (n == 1) single = photons.size();
        photons.emplace_back(n, 0);
        continue;
      }
      for (std::size_t k = 0; n + k <= cutoff; ++k) {
        if (n == 1 && k == 1) single = photons.size();
        photons.emplace_back(n, k);
      }
    }
  }
};

double pair_weight(ProtocolMode mode, double mu_a, double mu_b, std::size_t n, std::size_t m) {
  if (mode == ProtocolMode::kQkd) return mathkit::poisson_pmf(mu_a, n);
  return mathkit::poisson_pmf(mu_a, n) * mathkit::poisson_pmf(mu_b, m);
}

lp::Problem bound_problem(const VariableMap& vars, const std::vector<DecoyRow>& rows, bool use_errors) {
  const std::size_t n = vars.photons.size();
  lp::Problem problem;
  problem.objective.assign(n, 0.0);
  problem.objective[vars.single] = 1.0;
  problem.sense = use_errors ? lp::Sense::kMaximize : lp::Sense::kMinimize;
  problem.bounds.assign(n, lp::VariableBounds{0.0, 1.0});
  for (const auto& row : rows) {
    const RateInterval& interval = use_errors ? row.error_gain : row.gain;
    problem.constraints.push_back({row.weights, lp::Relation::kLessEqual, interval.upper});
    // Photon numbers beyond the cutoff can contribute at most their weight.
    const double floor = interval.lower - row.tail;
    if (floor > 0.0) problem.constraints.push_back({row.weights, lp::Relation::kGreaterEqual, floor});
  }
  return problem;
}

}  // namespace

RateInterval widen_rate(std::uint64_t successes, std::uint64_t trials, double eps) {
  if (trials == 0) throw DomainError("cannot widen a rate over zero trials");
  if (successes > trials) throw DomainError("successes exceed trials");
  if (!(eps > 0.0)) throw DomainError("widening needs eps > 0");
  const double estimate = static_cast<double>(successes) / static_cast<double>(trials);
  const double log_term = std::max(0.0, std::log(2.0 / eps));
  const double width = std::sqrt(log_term / (2.0 * static_cast<double>(trials)));
  return {std::clamp(estimate - width, 0.0, 1.0), std::clamp(estimate + width, 0.0, 1.0)};
}

RateInterval widen_rate_relative_entropy(std::uint64_t successes, std::uint64_t trials, double eps) {
  if (trials == 0) throw DomainError("cannot widen a rate over zero trials");
  if (successes > trials) throw DomainError("successes exceed trials");
  if (!(eps > 0.0)) throw DomainError("widening needs eps > 0");
  const double n = static_cast<double>(trials);
  const double q = static_cast<double>(successes) / n;
  const double budget = std::max(0.0, std::log(2.0 / eps)) / n;
  auto kl = [q](double p) {
    double d = 0.0;
    if (q > 0.0) d += q * std::log(q / p);
    if (q < 1.0) d += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
    return d;
  };
  // KL(q||p) grows monotonically as p moves away from q on either side.
  auto edge = [&](double inside, double outside) {
    if (kl(outside) <= budget) return outside;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (inside + outside);
      if (kl(mid) <= budget) {
        inside = mid;
      } else {
        outside = mid;
      }
    }
    return inside;
  };
  const double additive = std::sqrt(budget / 2.0);
  const double lower = q == 0.0 ? 0.0 : edge(q, std::max(0.0, q - additive));
  const double upper = q == 1.0 ? 1.0 : edge(q, std::min(1.0, q + additive));
  return {lower, upper};
}

RateInterval widen_counts(const CountRecord& record, double eps) {
  record.validate();
  return widen_rate(record.detected, record.sent, eps);
}

DecoyBounds estimate_bounds(const CountTable& table, const IntensitySet& intensities, double eps_total,
                            const EstimateOptions& options) {
  intensities.validate();
  if (!(eps_total > 0.0 && eps_total <= 1.0)) throw DomainError("eps_total must lie in (0,1]");
  const ProtocolMode mode = table.mode();
  const VariableMap vars(mode, options.photon_cutoff);

  std::vector<EntryKey> keys;
  for (IntensityLabel a : kDecoyLabels) {
    if (mode == ProtocolMode::kQkd) {
      keys.push_back({a, std::nullopt, Basis::kX});
      continue;
    }
    for (IntensityLabel b : kDecoyLabels) keys.push_back({a, b, Basis::kX});
  }
  const CountRecord& signal = table.at(table.signal_key());

  // Two widened rates per decoy entry plus the sampling transfer.
  const double eps_each = eps_total / static_cast<double>(2 * keys.size() + 1);

  std::vector<DecoyRow> rows;
  for (const auto& key : keys) {
    const CountRecord& record = table.at(key);
    if (record.sent == 0) continue;
    const double mu_a = intensities.of(key.first);
    const double mu_b = key.second ? intensities.of(*key.second) : 0.0;
    DecoyRow row;
    row.sent = record.sent;
    row.weights.reserve(vars.photons.size());
    double covered = 0.0;
    for (const auto& [n, m] : vars.photons) {
      const double w = pair_weight(mode, mu_a, mu_b, n, m);
      row.weights.push_back(w);
      covered += w;
    }
    row.tail = std::max(0.0, 1.0 - covered);
    row.single_weight = row.weights[vars.single];
    const auto widen = options.widening == Widening::kAdditive ? widen_rate : widen_rate_relative_entropy;
    row.gain = widen(record.detected, record.sent, eps_each);
    row.error_gain = widen(record.errors, record.sent, eps_each);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("count table has no X-basis decoy pulses");

  lp::Options lp_options;
  lp_options.lexicographic_ties = false;

  const auto yield_solution = lp::solve_bounded_lp(bound_problem(vars, rows, false), lp_options);
  if (yield_solution.status != lp::Status::kOptimal) {
    throw InconsistentCountsError("counts inconsistent with any photon-number model");
  }
  const auto error_solution = lp::solve_bounded_lp(bound_problem(vars, rows, true), lp_options);
  if (error_solution.status != lp::Status::kOptimal) {
    throw InconsistentCountsError("counts inconsistent with any photon-number model");
  }

  DecoyBounds bounds;
  bounds.mode = mode;
  bounds.epsilon_spent = eps_total;
  bounds.y1_lower = std::clamp(yield_solution.optimum, 0.0, 1.0);
  const double error_yield_upper = std::clamp(error_solution.optimum, 0.0, 1.0);
  bounds.e1_x_upper = bounds.y1_lower > 0.0 ? std::min(0.5, error_yield_upper / bounds.y1_lower) : 0.5;

  const double signal_single_weight =
      mode == ProtocolMode::kQkd ? mathkit::poisson_pmf(intensities.s, 1)
                                 : mathkit::poisson_pmf(intensities.s, 1) * mathkit::poisson_pmf(intensities.s, 1);
  bounds.s1_lower = std::floor(static_cast<double>(signal.sent) * signal_single_weight * bounds.y1_lower);
  bounds.s1_lower = std::min(bounds.s1_lower, static_cast<double>(signal.detected));

  double x1 = 0.0;
  for (const auto& row : rows) x1 += static_cast<double>(row.sent) * row.single_weight * bounds.y1_lower;
  bounds.x1_lower = std::floor(x1);

  if (bounds.s1_lower >= 1.0 && bounds.x1_lower >= 1.0 && bounds.e1_x_upper < 0.5) {
    const double deviation = mathkit::serfling_deviation(static_cast<std::uint64_t>(bounds.s1_lower),
                                                         static_cast<std::uint64_t>(bounds.x1_lower), eps_each);
    bounds.eph_upper = std::min(0.5, bounds.e1_x_upper + deviation);
  } else {
    bounds.eph_upper = 0.5;
  }
  return bounds;
}

DecoyBounds restrict_to_block(const DecoyBounds& bounds, std::uint64_t block_size, std::uint64_t z_total,
                              double eps) {
  if (block_size > z_total) throw DomainError("signature block larger than the Z pool");
  if (block_size == 0) throw DomainError("signature block must be non-empty");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("eps must lie in (0,1]");
  if (block_size == z_total) return bounds;

  DecoyBounds out = bounds;
  const double share = bounds.s1_lower * static_cast<double>(block_size) / static_cast<double>(z_total);
  const double fraction_deviation = mathkit::serfling_sample_deviation(block_size, z_total, eps);
  out.s1_lower = std::max(0.0, std::floor(share - fraction_deviation * static_cast<double>(block_size)));
  if (out.s1_lower >= 1.0 && bounds.s1_lower >= out.s1_lower && bounds.eph_upper < 0.5) {
    const double widening = mathkit::serfling_sample_deviation(static_cast<std::uint64_t>(out.s1_lower),
                                                               static_cast<std::uint64_t>(bounds.s1_lower), eps);
    out.eph_upper = std::min(0.5, bounds.eph_upper + widening);
  } else {
    out.eph_upper = 0.5;
  }
  out.epsilon_spent = bounds.epsilon_spent + 2.0 * eps;
  return out;
}

}  // namespace mdiqds::decoy
