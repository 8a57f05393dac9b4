#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mdiqds/channel.hpp"
#include "mdiqds/count_table.hpp"
#include "mdiqds/decoy.hpp"
#include "mdiqds/mathkit.hpp"

/// Secure key length for QKD and MDI-QKD from decoy bounds and the Z-basis
/// signal statistics.
namespace mdiqds::keyrate {

struct SecurityParams {
  mathkit::FailureBudget eps_sec{1e-10};
  mathkit::FailureBudget eps_cor{1e-15};
  double f_ec = 1.16;
  /// Concentration bound used to widen the decoy statistics.
  decoy::Widening widening = decoy::Widening::kAdditive;

  void validate() const;
};

struct KeyRateResult {
  std::uint64_t secure_bits = 0;
  double rate_bps = 0.0;
  std::uint64_t leak_ec_bits = 0;
  std::uint64_t delta_bits = 0;
  double elapsed_s = 0.0;
};

/// ceil(f_ec * h(qber_z) * n_z).
std::uint64_t leak_ec(std::uint64_t n_z, double qber_z, const SecurityParams& params);

/// ceil(6 log2(21/eps_sec) + log2(2/eps_cor)), floored at zero.
std::uint64_t finite_size_delta(const SecurityParams& params);
/// Same from raw values; budgets above 1 are allowed here and only need
/// to be positive.
std::uint64_t finite_size_delta(double eps_sec, double eps_cor);

/// floor(S1 (1 - h(e_ph)) - leak_EC - Delta), clamped at zero. The rate is
/// left at zero; callers fill elapsed_s and rate_bps.
KeyRateResult secure_key_length(const decoy::DecoyBounds& bounds, std::uint64_t n_z, double qber_z,
                                const SecurityParams& params);

/// Key length straight from a count table: decoy bounds (with the whole
/// eps_sec as their budget) and the Z-signal entry.
KeyRateResult key_from_table(const CountTable& table, const IntensitySet& intensities,
                             const SecurityParams& params);

struct SweepConfig {
  channel::ChannelParams channel;  // distance_km is overwritten per point
  IntensitySet intensities;
  ProtocolMode mode = ProtocolMode::kQkd;
  SecurityParams security;
  /// Fraction of wall-clock time the mode is running.
  double duty = 1.0;
  /// Pulses (MDI: pulse pairs) sent per point.
  double pulse_budget = 1e16;
  std::uint64_t seed = 1;
  double hom_visibility = 0.96;
  channel::MdiOptions mdi;
  /// Fraction of detections landing in the sender's basis branch at the
  /// receiver (1/2 for the passive beam-splitter receiver).
  double qkd_branch_fraction = 0.5;
};

struct SweepPoint {
  double distance_km = 0.0;
  ProtocolMode mode = ProtocolMode::kQkd;
  KeyRateResult result;
  std::string note;  // non-empty when the pipeline failed at this point
};

/// Synthesised count table for one link at the configured pulse budget.
/// MDI distances are the total sender-to-sender length, split evenly.
CountTable synthesize_table(const SweepConfig& config, double distance_km, std::uint64_t seed);

/// One point per distance; failed points report rate 0 and a note.
/// Points use seeds derived from (seed, index).
std::vector<SweepPoint> rate_sweep(const SweepConfig& config, const std::vector<double>& distances);

/// distance_km,mode,secure_bits,elapsed_s,rate_bps
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace mdiqds::keyrate
