#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mdiqds/error.hpp"
#include "mdiqds/netsim.hpp"
#include "mdiqds/qds.hpp"
#include "mdiqds/qds_protocol.hpp"
#include "mdiqds/rng.hpp"

using namespace mdiqds;
using namespace mdiqds::qds;

namespace {

std::vector<std::uint8_t> random_bits(std::uint64_t n, Rng& rng) {
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1U);
  return bits;
}

RecipientView view_of(Link link, const std::vector<std::uint8_t>& bits) {
  RecipientView v;
  for (std::uint64_t i = 0; i < bits.size(); ++i) v.positions.push_back({link, i, bits[i]});
  return v;
}

}  // namespace

TEST_SUITE("qds_protocol") {

TEST_CASE("empty blocks exchange nothing") {
  netsim::ClassicalChannel channel;
  const auto r = symmetrise({Link::kAB, {}, {}}, {Link::kAC, {}, {}}, {}, 1, channel);
  CHECK(r.bob.positions.empty());
  CHECK(r.charlie.positions.empty());
  CHECK(r.key_bits_used == 0);
  REQUIRE(channel.log().size() == 2);
  CHECK(channel.log()[0].payload.empty());
}

TEST_CASE("symmetrisation hands each recipient a full block") {
  Rng rng = make_rng(8);
  for (std::uint64_t c : {2ULL, 11ULL, 1000ULL}) {
    const SignatureBlock b{Link::kAB, random_bits(c, rng), {}};
    const SignatureBlock cc{Link::kAC, random_bits(c, rng), {}};
    const auto pad = random_bits(c, rng);
    const auto r = symmetrise(b, cc, pad, c);
    CHECK(r.key_bits_used == 2 * (c / 2));
    CHECK(r.bob.positions.size() == c - c / 2 + c / 2);
    CHECK(r.charlie.positions.size() == c);
    // Decrypted forwarded bits equal the peer's originals.
    std::uint64_t from_peer = 0;
    for (const auto& p : r.bob.positions) {
      const auto& src = p.source == Link::kAB ? b : cc;
      CHECK(p.bit == src.bits[p.index]);
      if (p.source == Link::kAC) ++from_peer;
    }
    CHECK(from_peer == c / 2);
    for (const auto& p : r.charlie.positions) CHECK(p.bit == (p.source == Link::kAB ? b : cc).bits[p.index]);
    // Kept and forwarded halves do not overlap.
    for (const auto& p : r.bob.positions) {
      if (p.source != Link::kAB) continue;
      CHECK(std::find(r.charlie.positions.begin(), r.charlie.positions.end(), p) == r.charlie.positions.end());
    }
  }
}

TEST_CASE("forwarded bits travel masked") {
  const SignatureBlock b{Link::kAB, std::vector<std::uint8_t>(64, 1), {}};
  const SignatureBlock c{Link::kAC, std::vector<std::uint8_t>(64, 1), {}};
  std::vector<std::uint8_t> pad(64, 1);
  netsim::ClassicalChannel channel;
  (void)symmetrise(b, c, pad, 4, channel);
  for (const auto& m : channel.log()) {
    for (std::size_t i = 8; i < m.payload.size(); i += 9) CHECK(m.payload[i] == 0);
  }
}

TEST_CASE("short pad is rejected") {
  const SignatureBlock b{Link::kAB, std::vector<std::uint8_t>(10, 0), {}};
  const SignatureBlock c{Link::kAC, std::vector<std::uint8_t>(10, 0), {}};
  std::vector<std::uint8_t> pad(9, 0);
  CHECK_THROWS_AS(symmetrise(b, c, pad, 1), DomainError);
}

TEST_CASE("replaying the channel log reproduces the exchange") {
  Rng rng = make_rng(21);
  const SignatureBlock b{Link::kAB, random_bits(200, rng), {}};
  const SignatureBlock c{Link::kAC, random_bits(200, rng), {}};
  const auto pad = random_bits(200, rng);
  netsim::ClassicalChannel first;
  const auto r1 = symmetrise(b, c, pad, 77, first);
  netsim::ClassicalChannel second;
  const auto r2 = symmetrise(b, c, pad, 77, second);
  CHECK(first.log() == second.log());
  CHECK(r1.bob == r2.bob);
  CHECK(r1.charlie == r2.charlie);
  auto replayed = netsim::ClassicalChannel::replay({kBob, kCharlie}, first.log());
  const auto to_bob = replayed.receive(kBob);
  REQUIRE(to_bob);
  CHECK(*to_bob == first.log()[1]);
}

TEST_CASE("verification thresholds are strict") {
  Declaration d;
  d.key_ab.assign(100, 0);
  d.key_ac.assign(100, 0);
  auto bits = std::vector<std::uint8_t>(100, 0);
  bits[3] = 1;
  bits[50] = 1;
  const auto view = view_of(Link::kAB, bits);
  CHECK_FALSE(verify(d, view, 0.02, 100).accepted);
  CHECK(verify(d, view, 0.0201, 100).accepted);
  CHECK(verify(d, view, 0.0201, 100).mismatches == 2);

  const auto clean = view_of(Link::kAB, std::vector<std::uint8_t>(100, 0));
  const auto both = sign_and_verify(d, clean, clean, 0.01, 0.02, 100);
  CHECK(both.direct.accepted);
  CHECK(both.forwarded.accepted);
}

TEST_CASE("each half is judged on its own") {
  Declaration d;
  d.key_ab.assign(100, 0);
  d.key_ac.assign(100, 0);
  RecipientView v = view_of(Link::kAB, std::vector<std::uint8_t>(100, 0));
  // 5 errors in 10 AC positions fail even though the total rate is low.
  for (std::uint64_t i = 0; i < 10; ++i) v.positions.push_back({Link::kAC, i, static_cast<std::uint8_t>(i < 5)});
  CHECK_FALSE(verify(d, v, 0.1, 100).accepted);
}

TEST_CASE("malformed declarations are rejected with a reason") {
  const auto view = view_of(Link::kAB, std::vector<std::uint8_t>(10, 0));
  Declaration short_key;
  short_key.key_ab.assign(5, 0);
  const auto r = verify(short_key, view, 0.5, 10);
  CHECK_FALSE(r.accepted);
  CHECK_FALSE(r.reason.empty());

  Declaration bad_message;
  bad_message.message = 2;
  bad_message.key_ab.assign(10, 0);
  CHECK_FALSE(verify(bad_message, view, 0.5, 10).accepted);

  Declaration ok;
  ok.key_ab.assign(10, 0);
  CHECK_FALSE(verify(ok, view, 0.5, 11).accepted);
}

TEST_CASE("honest signatures are accepted at a reduced block size") {
  TrialConfig config;
  config.c_sig = 4000;
  const auto af = abort_and_forge(0.0085, config.s_auth, config.s_ver, 0.0286, config.c_sig);
  const int trials = 10'000;
  int honest = 0;
  for (int seed = 0; seed < trials; ++seed) {
    const auto t = run_signature_trial(config, static_cast<std::uint64_t>(seed));
    if (t.honest.direct.accepted && t.honest.forwarded.accepted) ++honest;
  }
  CHECK(static_cast<double>(honest) / trials >= 1.0 - 2.0 * af.p_hab);
}

TEST_CASE("forgeries at the adversary error floor are rejected") {
  const TrialConfig config;
  const int trials = 1000;
  int rejected = 0;
  for (int seed = 0; seed < trials; ++seed) {
    if (!run_signature_trial(config, 50'000 + static_cast<std::uint64_t>(seed)).forged.accepted) ++rejected;
  }
  CHECK(rejected >= trials * 0.999);
}

TEST_CASE("trials are reproducible") {
  const TrialConfig config;
  const auto a = run_signature_trial(config, 5);
  const auto b = run_signature_trial(config, 5);
  CHECK(a.honest.direct.mismatches == b.honest.direct.mismatches);
  CHECK(a.forged.mismatches == b.forged.mismatches);
}

}
