#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mdiqds/rng.hpp"
#include "mdiqds/types.hpp"

/// Ground-truth photon-number yield models and the Poisson-mixture
/// synthesis of gains, QBERs and sampled count records.
namespace mdiqds::channel {

struct ChannelParams {
  double distance_km = 0.0;
  double attenuation_db_per_km = 0.2;
  double detector_efficiency = 0.209;
  double dark_count_prob = 1e-6;  // per detector per gate
  double misalignment = 0.005;
  double clock_rate_hz = 1e9;

  void validate() const;
  /// Channel transmittance times detector efficiency.
  [[nodiscard]] double transmittance() const;
};

/// Knobs of the phenomenological two-sender model.
struct MdiOptions {
  double bell_success = 0.5;
  double multiphoton_x_error = 0.25;
};

inline constexpr std::size_t kDefaultPhotonCutoff = 12;
inline constexpr double kTruncationLimit = 1e-10;

/// Per-photon-number yields and error rates. QKD models are indexed by n,
/// MDI models by (n, m) stored row-major over (n_cut+1)^2 entries.
/// `error_x` is the X-basis (phase) error rate, `error_z` the Z-basis one.
struct YieldModel {
  ProtocolMode kind = ProtocolMode::kQkd;
  std::size_t n_cut = kDefaultPhotonCutoff;
  std::vector<double> yields;
  std::vector<double> error_x;
  std::vector<double> error_z;

  [[nodiscard]] std::size_t index(std::size_t n, std::size_t m = 0) const {
    return kind == ProtocolMode::kQkd ? n : n * (n_cut + 1) + m;
  }
  [[nodiscard]] double yield(std::size_t n, std::size_t m = 0) const { return yields[index(n, m)]; }
  [[nodiscard]] double error_rate(Basis basis, std::size_t n, std::size_t m = 0) const {
    return (basis == Basis::kX ? error_x : error_z)[index(n, m)];
  }
  /// Throws InputError if sizes or ranges are wrong.
  void validate() const;
};

/// Sender-to-receiver model with two threshold detectors per basis branch.
YieldModel qkd_yield_model(const ChannelParams& params, std::size_t n_cut = kDefaultPhotonCutoff);

/// Two senders interfering at the relay. With A = 1-(1-eta_a)^n and
/// B = 1-(1-eta_b)^m:
///   signal     = bell_success * A * B
///   accidental = 2 d^2 + d (A + B)          (d: mean dark probability)
///   yield      = signal + (1 - signal) * accidental
/// Accidental clicks carry error 1/2. Signal errors are the misalignment in
/// Z; in X the (1,1) term adds (1-V)/2 and multi-photon terms are floored
/// at multiphoton_x_error.
YieldModel mdi_yield_model(const ChannelParams& params_a, const ChannelParams& params_b, double hom_visibility,
                           const MdiOptions& options = {}, std::size_t n_cut = kDefaultPhotonCutoff);

struct GainQber {
  double gain = 0.0;
  double qber = 0.0;
  /// Poisson weight beyond the cutoff; the gain is exact to within this.
  double truncation_error = 0.0;
};

/// Poisson mixture of the model. `nu` must be given exactly for MDI models.
/// Throws DomainError if the truncated tail exceeds kTruncationLimit.
GainQber expected_gain_and_qber(const YieldModel& model, Basis basis, double mu,
                                std::optional<double> nu = std::nullopt);

/// detected ~ Bin(n_pulses, gain), errors ~ Bin(detected, qber).
CountRecord sample_record(double gain, double qber, std::uint64_t n_pulses, Rng& rng);

/// Seeded draw of a count record from the model's expected statistics.
CountRecord sample_counts(const YieldModel& model, Basis basis, double mu, std::optional<double> nu,
                          std::uint64_t n_pulses, std::uint64_t seed);

nlohmann::json to_json(const YieldModel& model);
YieldModel yield_model_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ChannelParams& params);
ChannelParams channel_params_from_json(const nlohmann::json& doc, const ChannelParams& defaults = {});

}  // namespace mdiqds::channel
