#pragma once

#include <cstddef>
#include <cstdint>

#include "mdiqds/count_table.hpp"
#include "mdiqds/types.hpp"

/// Decoy-state estimation: single-photon yield and phase-error bounds from
/// the X-basis decoy data, transferred to the Z-basis signal.
namespace mdiqds::decoy {

struct RateInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Two-sided Hoeffding interval for successes/trials:
///   successes/trials -+ sqrt(ln(2/eps) / (2 trials)), clamped to [0,1].
/// eps >= 2 degenerates to the point estimate.
RateInterval widen_rate(std::uint64_t successes, std::uint64_t trials, double eps);

/// Two-sided interval from Hoeffding's relative-entropy bound: the rates p
/// with trials * KL(successes/trials || p) <= ln(2/eps). Never wider than
/// widen_rate and much tighter for rates near 0 or 1.
RateInterval widen_rate_relative_entropy(std::uint64_t successes, std::uint64_t trials, double eps);

/// Interval for the detection probability of a record.
RateInterval widen_counts(const CountRecord& record, double eps);

enum class Widening { kAdditive, kRelativeEntropy };

struct DecoyBounds {
  /// Lower bound on single-photon (MDI: single-single) Z-signal detections.
  double s1_lower = 0.0;
  /// Upper bound on the Z-basis single-photon phase-error rate, in [0, 1/2].
  double eph_upper = 0.5;
  /// Lower bound on the single-photon yield Y1 (MDI: Y11).
  double y1_lower = 0.0;
  /// Upper bound on the X-basis single-photon bit error rate before transfer.
  double e1_x_upper = 0.5;
  /// Lower bound on single-photon detections in the X-basis decoy data.
  double x1_lower = 0.0;
  double epsilon_spent = 0.0;
  ProtocolMode mode = ProtocolMode::kQkd;

  friend bool operator==(const DecoyBounds&, const DecoyBounds&) = default;
};

struct EstimateOptions {
  /// Photon-number cutoff of the LP (MDI: n + m <= cutoff).
  std::size_t photon_cutoff = 12;
  Widening widening = Widening::kAdditive;
};

/// Bounds from a count table. Splits eps_total evenly over every widened X
/// gain and error rate plus the X-to-Z sampling transfer. Throws InputError
/// on missing entries and InconsistentCountsError if no photon-number
/// model fits the widened data.
DecoyBounds estimate_bounds(const CountTable& table, const IntensitySet& intensities, double eps_total,
                            const EstimateOptions& options = {});

/// Bounds for a random block of `block_size` Z detections drawn from a pool
/// of `z_total`: proportional share of the single-photon count minus a
/// sampling deviation, with the phase-error bound widened to match.
DecoyBounds restrict_to_block(const DecoyBounds& bounds, std::uint64_t block_size, std::uint64_t z_total,
                              double eps);

}  // namespace mdiqds::decoy
