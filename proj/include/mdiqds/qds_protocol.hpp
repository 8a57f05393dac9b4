#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdiqds/netsim.hpp"
#include "mdiqds/qds.hpp"

/// The signing flows run over the classical channel: symmetrisation
/// between the two recipients, signing, and verification.
namespace mdiqds::qds {

inline constexpr const char* kBob = "bob";
inline constexpr const char* kCharlie = "charlie";
inline constexpr const char* kAlice = "alice";

/// A signature bit held by a recipient: which link's block it belongs to,
/// its position in that block, and the recipient's value.
struct KnownPosition {
  Link source = Link::kAB;
  std::uint64_t index = 0;
  std::uint8_t bit = 0;

  friend bool operator==(const KnownPosition&, const KnownPosition&) = default;
};

struct RecipientView {
  std::vector<KnownPosition> positions;

  friend bool operator==(const RecipientView&, const RecipientView&) = default;
};

struct SymmetrisationResult {
  RecipientView bob;
  RecipientView charlie;
  std::uint64_t key_bits_used = 0;
};

/// Bob (holding block_b from the AB link) and Charlie (block_c from AC)
/// each pick a random half of their positions and send those (position,
/// bit) pairs to the other, the bits masked by disjoint one-time-pad
/// segments. Each ends with its kept half plus the peer's forwarded half.
/// Throws DomainError if the pad is shorter than the bits exchanged.
SymmetrisationResult symmetrise(const SignatureBlock& block_b, const SignatureBlock& block_c,
                                std::span<const std::uint8_t> otp_key, std::uint64_t seed,
                                netsim::ClassicalChannel& channel);

/// Convenience overload with a private channel.
SymmetrisationResult symmetrise(const SignatureBlock& block_b, const SignatureBlock& block_c,
                                std::span<const std::uint8_t> otp_key, std::uint64_t seed);

/// Alice's signed message: the bit and her key strings for both links.
struct Declaration {
  std::uint8_t message = 0;
  std::vector<std::uint8_t> key_ab;
  std::vector<std::uint8_t> key_ac;
};

struct VerifyOutcome {
  bool accepted = false;
  std::uint64_t checked = 0;
  std::uint64_t mismatches = 0;
  std::string reason;
};

struct SignOutcome {
  VerifyOutcome direct;
  VerifyOutcome forwarded;
};

/// Checks a declaration against one recipient's known positions. Each
/// source half must show strictly fewer mismatches than
/// threshold * (positions checked in that half).
VerifyOutcome verify(const Declaration& declaration, const RecipientView& view, double threshold,
                     std::uint64_t min_length);

/// Direct recipient tests against s_auth, the forwarded one against s_ver.
SignOutcome sign_and_verify(const Declaration& declaration, const RecipientView& direct,
                            const RecipientView& forwarded, double s_auth, double s_ver, std::uint64_t length);

struct TrialConfig {
  std::uint64_t c_sig = 20'000;
  double qber_ab = 0.005;
  double qber_ac = 0.005;
  double s_auth = 0.0152;
  double s_ver = 0.0219;
  /// Error rate the forger cannot beat on positions it has not seen.
  double forger_error_rate = 0.0286;
};

struct TrialOutcome {
  SignOutcome honest;
  /// Bob forwarding a forged declaration to Charlie.
  VerifyOutcome forged;
};

/// One seeded end-to-end signature: noisy distribution over both links,
/// symmetrisation, an honest signature and a forgery attempt by Bob who
/// knows his own strings but must guess Alice's AC string.
TrialOutcome run_signature_trial(const TrialConfig& config, std::uint64_t seed);

}  // namespace mdiqds::qds
