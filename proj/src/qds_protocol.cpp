#include "mdiqds/qds_protocol.hpp"

#include <algorithm>

#include "mdiqds/error.hpp"
#include "mdiqds/rng.hpp"

namespace mdiqds::qds {

namespace {

constexpr const char* kTopic = "symmetrise";

// Random half of the positions of a block, sorted.
std::vector<std::uint64_t> pick_half(std::uint64_t size, Rng& rng) {
  std::vector<std::uint64_t> order(size);
  for (std::uint64_t i = 0; i < size; ++i) order[i] = i;
  const std::uint64_t half = size / 2;
  for (std::uint64_t i = 0; i < half; ++i) std::swap(order[i], order[i + uniform_below(rng, size - i)]);
  order.resize(half);
  std::sort(order.begin(), order.end());
  return order;
}

// Wire format: per forwarded position, 8 little-endian index bytes then
// one masked bit byte.
std::vector<std::uint8_t> encode(const std::vector<std::uint64_t>& indices, const SignatureBlock& block,
                                 std::span<const std::uint8_t> pad) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(indices.size() * 9);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (int shift = 0; shift < 64; shift += 8) bytes.push_back(static_cast<std::uint8_t>(indices[i] >> shift));
    bytes.push_back(static_cast<std::uint8_t>((block.bits[indices[i]] ^ pad[i]) & 1U));
  }
  return bytes;
}

std::vector<KnownPosition> decode(const std::vector<std::uint8_t>& bytes, Link source,
                                  std::span<const std::uint8_t> pad) {
  if (bytes.size() % 9 != 0) throw InputError("malformed symmetrisation payload");
  std::vector<KnownPosition> out;
  out.reserve(bytes.size() / 9);
  for (std::size_t i = 0; i < bytes.size() / 9; ++i) {
    std::uint64_t index = 0;
    for (int b = 0; b < 8; ++b) index |= static_cast<std::uint64_t>(bytes[i * 9 + b]) << (8 * b);
    out.push_back({source, index, static_cast<std::uint8_t>((bytes[i * 9 + 8] ^ pad[i]) & 1U)});
  }
  return out;
}

RecipientView kept_view(const SignatureBlock& block, const std::vector<std::uint64_t>& sent) {
  RecipientView view;
  std::size_t s = 0;
  for (std::uint64_t i = 0; i < block.bits.size(); ++i) {
    if (s < sent.size() && sent[s] == i) {
      ++s;
      continue;
    }
    view.positions.push_back({block.link, i, block.bits[i]});
  }
  return view;
}

}  // namespace

SymmetrisationResult symmetrise(const SignatureBlock& block_b, const SignatureBlock& block_c,
                                std::span<const std::uint8_t> otp_key, std::uint64_t seed,
                                netsim::ClassicalChannel& channel) {
  const std::uint64_t half_b = block_b.bits.size() / 2;
  const std::uint64_t half_c = block_c.bits.size() / 2;
  if (otp_key.size() < half_b + half_c) {
    throw DomainError("one-time pad has " + std::to_string(otp_key.size()) + " bits, symmetrisation needs " +
                      std::to_string(half_b + half_c));
  }
  for (const char* party : {kBob, kCharlie}) channel.register_party(party);
  const auto pad_b = otp_key.subspan(0, half_b);
  const auto pad_c = otp_key.subspan(half_b, half_c);

  Rng rng_b = make_rng(seed, 1);
  Rng rng_c = make_rng(seed, 2);
  const auto sent_b = pick_half(block_b.bits.size(), rng_b);
  const auto sent_c = pick_half(block_c.bits.size(), rng_c);
  channel.send(kBob, kCharlie, kTopic, encode(sent_b, block_b, pad_b));
  channel.send(kCharlie, kBob, kTopic, encode(sent_c, block_c, pad_c));

  SymmetrisationResult result;
  result.key_bits_used = half_b + half_c;
  result.bob = kept_view(block_b, sent_b);
  result.charlie = kept_view(block_c, sent_c);
  const auto to_bob = channel.receive(kBob);
  const auto to_charlie = channel.receive(kCharlie);
  if (!to_bob || !to_charlie) throw InputError("symmetrisation message lost");
  for (auto& p : decode(to_bob->payload, block_c.link, pad_c)) result.bob.positions.push_back(p);
  for (auto& p : decode(to_charlie->payload, block_b.link, pad_b)) result.charlie.positions.push_back(p);
  return result;
}

SymmetrisationResult symmetrise(const SignatureBlock& block_b, const SignatureBlock& block_c,
                                std::span<const std::uint8_t> otp_key, std::uint64_t seed) {
  netsim::ClassicalChannel channel;
  return symmetrise(block_b, block_c, otp_key, seed, channel);
}

VerifyOutcome verify(const Declaration& declaration, const RecipientView& view, double threshold,
                     std::uint64_t min_length) {
  VerifyOutcome out;
  if (declaration.message > 1) {
    out.reason = "message is not a single bit";
    return out;
  }
  if (view.positions.size() < min_length) {
    out.reason = "recipient holds fewer positions than the signature length";
    return out;
  }
  std::uint64_t checked[2] = {0, 0};
  std::uint64_t mismatches[2] = {0, 0};
  for (const auto& p : view.positions) {
    const auto& key = p.source == Link::kAB ? declaration.key_ab : declaration.key_ac;
    if (p.source == Link::kBC || p.index >= key.size()) {
      out.reason = "declaration does not cover every held position";
      return out;
    }
    const std::size_t half = p.source == Link::kAB ? 0 : 1;
    ++checked[half];
    if ((key[p.index] & 1U) != p.bit) ++mismatches[half];
  }
  out.checked = checked[0] + checked[1];
  out.mismatches = mismatches[0] + mismatches[1];
  for (int h = 0; h < 2; ++h) {
    if (checked[h] == 0) continue;
    if (!(static_cast<double>(mismatches[h]) < threshold * static_cast<double>(checked[h]))) {
      out.reason = "mismatch rate at or above threshold";
      return out;
    }
  }
  out.accepted = true;
  return out;
}

SignOutcome sign_and_verify(const Declaration& declaration, const RecipientView& direct,
                            const RecipientView& forwarded, double s_auth, double s_ver, std::uint64_t length) {
  return {verify(declaration, direct, s_auth, length), verify(declaration, forwarded, s_ver, length)};
}

TrialOutcome run_signature_trial(const TrialConfig& config, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  auto random_bits = [&](std::uint64_t n) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1U);
    return bits;
  };
  auto noisy = [&](const std::vector<std::uint8_t>& bits, double rate) {
    std::vector<std::uint8_t> out = bits;
    for (auto& b : out) b ^= bernoulli(rng, rate) ? 1U : 0U;
    return out;
  };

  Declaration honest;
  honest.message = static_cast<std::uint8_t>(rng() & 1U);
  honest.key_ab = random_bits(config.c_sig);
  honest.key_ac = random_bits(config.c_sig);
  const SignatureBlock block_b{Link::kAB, noisy(honest.key_ab, config.qber_ab), {}};
  const SignatureBlock block_c{Link::kAC, noisy(honest.key_ac, config.qber_ac), {}};
  const auto pad = random_bits(config.c_sig);

  netsim::ClassicalChannel channel;
  channel.register_party(kAlice);
  const auto sym = symmetrise(block_b, block_c, pad, seed, channel);

  TrialOutcome outcome;
  outcome.honest = sign_and_verify(honest, sym.bob, sym.charlie, config.s_auth, config.s_ver, config.c_sig);

  Declaration forged;
  forged.message = honest.message ^ 1U;
  forged.key_ab = block_b.bits;
  forged.key_ac = noisy(honest.key_ac, config.forger_error_rate);
  outcome.forged = verify(forged, sym.charlie, config.s_ver, config.c_sig);
  return outcome;
}

}  // namespace mdiqds::qds
