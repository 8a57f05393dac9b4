#include "mdiqds/keyrate.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mdiqds/error.hpp"

namespace mdiqds::keyrate {

void SecurityParams::validate() const {
  if (!(f_ec >= 1.0)) throw DomainError("f_ec must be >= 1");
}

std::uint64_t leak_ec(std::uint64_t n_z, double qber_z, const SecurityParams& params) {
  const double bits = params.f_ec * mathkit::binary_entropy(qber_z) * static_cast<double>(n_z);
  return static_cast<std::uint64_t>(std::ceil(bits));
}

std::uint64_t finite_size_delta(double eps_sec, double eps_cor) {
  if (!(eps_sec > 0.0) || !(eps_cor > 0.0)) throw DomainError("finite-size budgets must be positive");
  const double bits = 6.0 * std::log2(21.0 / eps_sec) + std::log2(2.0 / eps_cor);
  return bits <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(bits));
}

std::uint64_t finite_size_delta(const SecurityParams& params) {
  return finite_size_delta(params.eps_sec.value(), params.eps_cor.value());
}

KeyRateResult secure_key_length(const decoy::DecoyBounds& bounds, std::uint64_t n_z, double qber_z,
                                const SecurityParams& params) {
  params.validate();
  if (bounds.s1_lower > static_cast<double>(n_z)) {
    throw DomainError("single-photon lower bound exceeds the Z-basis detections");
  }
  KeyRateResult result;
  result.leak_ec_bits = leak_ec(n_z, qber_z, params);
  result.delta_bits = finite_size_delta(params);
  const double privacy = bounds.eph_upper >= 0.5 ? 0.0 : 1.0 - mathkit::binary_entropy(bounds.eph_upper);
  const double length = bounds.s1_lower * privacy - static_cast<double>(result.leak_ec_bits) -
                        static_cast<double>(result.delta_bits);
  result.secure_bits = length > 0.0 ? static_cast<std::uint64_t>(std::floor(length)) : 0;
  return result;
}

KeyRateResult key_from_table(const CountTable& table, const IntensitySet& intensities,
                             const SecurityParams& params) {
  const CountRecord& signal = table.at(table.signal_key());
  const double qber = signal.detected > 0 ? static_cast<double>(signal.errors) / static_cast<double>(signal.detected)
                                          : 0.0;
  if (signal.detected == 0) return KeyRateResult{};
  const auto bounds = decoy::estimate_bounds(table, intensities, params.eps_sec.value(), {.widening = params.widening});
  return secure_key_length(bounds, signal.detected, qber, params);
}

namespace {

constexpr std::array<IntensityLabel, 3> kDecoys{IntensityLabel::kU, IntensityLabel::kV, IntensityLabel::kW};

}  // namespace

CountTable synthesize_table(const SweepConfig& config, double distance_km, std::uint64_t seed) {
  config.intensities.validate();
  const auto& in = config.intensities;
  const double z = in.z_basis_prob;
  const double x_each = (1.0 - z) / 3.0;
  Rng rng = make_rng(seed);

  if (config.mode == ProtocolMode::kQkd) {
    channel::ChannelParams p = config.channel;
    p.distance_km = distance_km;
    const auto model = channel::qkd_yield_model(p);
    CountTable table(Link::kAC);
    auto draw = [&](IntensityLabel label, Basis basis, double share) {
      const auto expected = channel::expected_gain_and_qber(model, basis, in.of(label));
      const auto pulses = static_cast<std::uint64_t>(std::llround(config.pulse_budget * share));
      table.add({label, std::nullopt, basis},
                channel::sample_record(expected.gain * config.qkd_branch_fraction, expected.qber, pulses, rng));
    };
    draw(IntensityLabel::kS, Basis::kZ, z);
    for (auto label : kDecoys) draw(label, Basis::kX, x_each);
    return table;
  }

  channel::ChannelParams side = config.channel;
  side.distance_km = 0.5 * distance_km;
  const auto model = channel::mdi_yield_model(side, side, config.hom_visibility, config.mdi);
  CountTable table(Link::kAB);
  auto draw = [&](IntensityLabel a, IntensityLabel b, Basis basis, double share) {
    const auto expected = channel::expected_gain_and_qber(model, basis, in.of(a), in.of(b));
    const auto pulses = static_cast<std::uint64_t>(std::llround(config.pulse_budget * share));
    table.add({a, b, basis}, channel::sample_record(expected.gain, expected.qber, pulses, rng));
  };
  draw(IntensityLabel::kS, IntensityLabel::kS, Basis::kZ, z * z);
  for (auto a : kDecoys) {
    for (auto b : kDecoys) draw(a, b, Basis::kX, x_each * x_each);
  }
  return table;
}

std::vector<SweepPoint> rate_sweep(const SweepConfig& config, const std::vector<double>& distances) {
  if (distances.empty()) throw DomainError("rate sweep needs at least one distance");
  if (!(config.duty > 0.0 && config.duty <= 1.0)) throw DomainError("duty must lie in (0,1]");
  if (!(config.pulse_budget > 0.0)) throw DomainError("pulse budget must be positive");
  std::vector<SweepPoint> points;
  points.reserve(distances.size());
  const double elapsed = config.pulse_budget / config.channel.clock_rate_hz / config.duty;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    SweepPoint point;
    point.distance_km = distances[i];
    point.mode = config.mode;
    point.result.elapsed_s = elapsed;
    try {
      const std::uint64_t seed = config.seed * 1000003ULL + i;
      const CountTable table = synthesize_table(config, distances[i], seed);
      point.result = key_from_table(table, config.intensities, config.security);
      point.result.elapsed_s = elapsed;
      point.result.rate_bps = static_cast<double>(point.result.secure_bits) / elapsed;
    } catch (const std::exception& e) {
      point.note = e.what();
      point.result.secure_bits = 0;
      point.result.rate_bps = 0.0;
    }
    points.push_back(std::move(point));
  }
  return points;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "distance_km,mode,secure_bits,elapsed_s,rate_bps\n";
  for (const auto& p : points) {
    std::ostringstream row;
    row << std::setprecision(10) << p.distance_km << ',' << to_string(p.mode) << ',' << p.result.secure_bits << ','
        << p.result.elapsed_s << ',' << p.result.rate_bps;
    out << row.str() << '\n';
  }
}

}  // namespace mdiqds::keyrate
