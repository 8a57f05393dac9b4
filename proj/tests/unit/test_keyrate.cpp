#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mdiqds/error.hpp"
#include "mdiqds/keyrate.hpp"
#include "mdiqds/mathkit.hpp"

using namespace mdiqds;
using namespace mdiqds::keyrate;

namespace {

decoy::DecoyBounds bounds_of(double s1, double eph) {
  decoy::DecoyBounds b;
  b.s1_lower = s1;
  b.eph_upper = eph;
  return b;
}

}  // namespace

TEST_SUITE("keyrate") {

TEST_CASE("error-correction leakage") {
  const SecurityParams params;
  CHECK(leak_ec(1'000'000, 0.0, params) == 0);
  // Exact entropy is 0.045415...; the printed 0.04541 rounds it down.
  const auto leak = leak_ec(1'000'000, 0.005, params);
  CHECK(leak == static_cast<std::uint64_t>(std::ceil(1.16 * mathkit::binary_entropy(0.005) * 1e6)));
  CHECK(std::abs(static_cast<double>(leak) - 52'676.0) <= 10.0);
  SecurityParams unit = params;
  unit.f_ec = 1.0;
  CHECK(leak_ec(123'456, 0.5, unit) == 123'456);
}

TEST_CASE("finite-size correction") {
  const SecurityParams params;
  const double raw = 6.0 * std::log2(21.0 / 1e-10) + std::log2(2.0 / 1e-15);
  CHECK(finite_size_delta(params) == static_cast<std::uint64_t>(std::ceil(raw)));
  CHECK(finite_size_delta(params) == 277);
  CHECK(finite_size_delta(21.0, 2.0) == 0);
  CHECK(finite_size_delta(1e9, 1e9) == 0);
  CHECK_THROWS_AS(finite_size_delta(0.0, 1e-15), DomainError);

  SecurityParams half = params;
  half.eps_sec = mathkit::FailureBudget(0.5e-10);
  const auto step = finite_size_delta(half) - finite_size_delta(params);
  CHECK(step >= 5);
  CHECK(step <= 7);
}

TEST_CASE("secure key length") {
  SecurityParams params;
  CHECK(secure_key_length(bounds_of(1e6, 0.5), 2'000'000, 0.01, params).secure_bits == 0);

  // Extraction term alone: leak is zero at qber 0, delta is added back.
  const auto r = secure_key_length(bounds_of(666'345.0, 0.053), 2'500'000, 0.0, params);
  CHECK(r.leak_ec_bits == 0);
  const double extraction = static_cast<double>(r.secure_bits + r.delta_bits);
  CHECK(std::abs(extraction - 467'107.0) <= 50.0);
  CHECK(r.rate_bps == 0.0);

  CHECK_THROWS_AS(secure_key_length(bounds_of(10.0, 0.1), 5, 0.0, params), DomainError);
}

TEST_CASE("key length is monotone in its inputs") {
  const SecurityParams params;
  std::uint64_t previous = UINT64_MAX;
  for (double eph = 0.0; eph <= 0.5; eph += 0.01) {
    const auto bits = secure_key_length(bounds_of(1e6, eph), 4'000'000, 0.01, params).secure_bits;
    CHECK(bits <= previous);
    previous = bits;
  }
  previous = UINT64_MAX;
  for (double q = 0.0; q <= 0.2; q += 0.005) {
    const auto bits = secure_key_length(bounds_of(1e6, 0.03), 4'000'000, q, params).secure_bits;
    CHECK(bits <= previous);
    previous = bits;
  }
  previous = 0;
  for (double s1 = 0.0; s1 <= 4e6; s1 += 2e5) {
    const auto bits = secure_key_length(bounds_of(s1, 0.03), 4'000'000, 0.01, params).secure_bits;
    CHECK(bits >= previous);
    previous = bits;
  }
}

TEST_CASE("synthetic 25 km QKD table gives a positive key") {
  SweepConfig config;
  config.pulse_budget = 1e12;
  const auto table = synthesize_table(config, 25.0, 42);
  const auto r = key_from_table(table, config.intensities, config.security);
  CHECK(r.secure_bits > 0);
  CHECK(r.secure_bits < table.at(table.signal_key()).detected);
}

TEST_CASE("dead channel sweeps to zero") {
  SweepConfig config;
  config.channel.detector_efficiency = 0.0;
  config.channel.dark_count_prob = 0.0;
  config.pulse_budget = 1e10;
  for (auto mode : {ProtocolMode::kQkd, ProtocolMode::kMdi}) {
    config.mode = mode;
    for (const auto& p : rate_sweep(config, {0.0, 10.0, 50.0})) {
      CHECK(p.result.secure_bits == 0);
      CHECK(p.result.rate_bps == 0.0);
    }
  }
}

TEST_CASE("default sweeps fall with distance and QKD beats MDI") {
  SweepConfig config;
  const std::vector<double> distances{0.0, 10.0, 20.0, 30.0, 40.0};
  const auto qkd = rate_sweep(config, distances);
  config.mode = ProtocolMode::kMdi;
  const auto mdi = rate_sweep(config, distances);
  for (std::size_t i = 0; i < distances.size(); ++i) {
    CAPTURE(distances[i]);
    if (i > 0) {
      CHECK(qkd[i].result.rate_bps <= qkd[i - 1].result.rate_bps);
      CHECK(mdi[i].result.rate_bps <= mdi[i - 1].result.rate_bps);
    }
    CHECK(qkd[i].result.rate_bps > mdi[i].result.rate_bps);
  }
  CHECK(qkd.front().result.rate_bps > 0.0);
  CHECK(mdi.front().result.rate_bps > 0.0);
}

TEST_CASE("sweeps are reproducible and serialise as CSV") {
  SweepConfig config;
  config.pulse_budget = 1e11;
  const auto a = rate_sweep(config, {5.0, 15.0});
  const auto b = rate_sweep(config, {5.0, 15.0});
  std::ostringstream ca;
  std::ostringstream cb;
  write_sweep_csv(ca, a);
  write_sweep_csv(cb, b);
  CHECK(ca.str() == cb.str());
  CHECK(ca.str().rfind("distance_km,mode,secure_bits,elapsed_s,rate_bps\n", 0) == 0);
  CHECK_THROWS_AS(rate_sweep(config, {}), DomainError);
}

TEST_CASE("security parameters are validated") {
  SecurityParams p;
  p.f_ec = 0.9;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

}
