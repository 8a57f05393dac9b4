#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdiqds/mathkit.hpp"
#include "mdiqds/types.hpp"

/// Quantum digital signature distillation: the adversary's error floor,
/// sampled QBER bound, thresholds, signature length, failure
/// probabilities and multi-signature block extraction.
namespace mdiqds::qds {

struct QdsParams {
  std::uint64_t c_sig = 2'500'000;
  std::uint64_t c_test = 1'714'426;
  mathkit::FailureBudget eps_h{2e-11};
  mathkit::FailureBudget p_rep_budget{0.5e-10};
  mathkit::FailureBudget p_fail_total{1e-10};
  /// Failure probability already spent on parameter estimation upstream.
  double eps_pe = 0.0;
  /// Positions of s_auth and s_ver inside the (E_sig, p_E) gap.
  double auth_fraction = 1.0 / 3.0;
  double verify_fraction = 2.0 / 3.0;
};

/// p_E = h^-1( (S1_sig / C_sig) (1 - h(e_ph,sig)) ). Zero when S1_sig is 0.
double eve_error_floor(double s1_sig_lower, std::uint64_t c_sig, double eph_sig_upper);

/// e_test plus the Serfling deviation between test sample and signature
/// block, clamped to [0,1].
double qber_upper(double e_test, std::uint64_t c_test, std::uint64_t c_sig, double eps_h);

struct Thresholds {
  double s_auth = 0.0;
  double s_ver = 0.0;
};

/// Places s_auth and s_ver at the given fractions of the gap between the
/// QBER bound and p_E. Throws InsecureChannelError if p_E <= e_sig_upper.
Thresholds thresholds(double e_sig_upper, double p_e, double auth_fraction = 1.0 / 3.0,
                      double verify_fraction = 2.0 / 3.0);

/// Smallest L with exp(-(s_ver - s_auth)^2 L / 4) <= p_rep_budget.
std::uint64_t signature_length(double s_auth, double s_ver, double p_rep_budget);

/// exp(-(s_ver - s_auth)^2 L / 4).
double repudiation_bound(double s_auth, double s_ver, std::uint64_t length);

struct AbortForge {
  double p_hab = 1.0;
  double p_for = 1.0;
  /// Natural logs, finite even when the probabilities underflow.
  double log_p_hab = 0.0;
  double log_p_for = 0.0;
};

/// Hoeffding tails over the margins s_auth - E_sig (honest abort) and
/// p_E - s_ver (forging).
AbortForge abort_and_forge(double e_sig_upper, double s_auth, double s_ver, double p_e, std::uint64_t length);

/// floor((pool - c_test) / c_sig). Throws DomainError if the pool is too
/// small for one block.
std::uint64_t signature_block_count(std::uint64_t pool_size, std::uint64_t c_test, std::uint64_t c_sig);

struct SignatureBlock {
  Link link = Link::kAB;
  std::vector<std::uint8_t> bits;
  std::vector<std::uint64_t> origin_indices;  // strictly increasing
};

struct BlockExtraction {
  std::vector<std::uint64_t> test_indices;  // sorted
  std::vector<SignatureBlock> blocks;
};

/// Uniformly samples a test set of c_test positions, then partitions the
/// rest into disjoint random blocks of exactly c_sig bits.
BlockExtraction extract_blocks(std::span<const std::uint8_t> z_pool, Link link, std::uint64_t c_test,
                               std::uint64_t c_sig, std::uint64_t seed);

/// Average wall-clock time per signature: total * duty / n_signatures.
double timing_report(double total_time_s, double duty_fraction, std::uint64_t n_signatures);

/// Everything measured on one link that the distillation consumes.
struct LinkMeasurements {
  Link link = Link::kAB;
  double s1_sig_lower = 0.0;
  double eph_sig_upper = 0.5;
  double e_test = 0.0;
  /// Total Z-basis signal bits available (test sample included).
  std::uint64_t z_pool = 0;
  double total_time_s = 0.0;
  double duty_fraction = 1.0;
};

struct QdsReport {
  LinkMeasurements inputs;
  QdsParams params;
  bool secure = false;
  std::string outcome;  // "ok" or the reason no positive rate exists
  double p_e = 0.0;
  double e_test = 0.0;
  double e_sig_upper = 0.0;
  double s_auth = 0.0;
  double s_ver = 0.0;
  std::uint64_t l_sig = 0;
  double p_rep = 1.0;
  double p_hab = 1.0;
  double p_for = 1.0;
  double log_p_hab = 0.0;
  double log_p_for = 0.0;
  double total_failure = 1.0;
  std::uint64_t n_signatures = 0;
  double avg_time_per_signature_s = 0.0;
};

/// Full chain: eve_error_floor, qber_upper, thresholds, signature_length,
/// abort_and_forge, block count and timing. A channel without a threshold
/// gap, or whose signature length exceeds c_sig, yields secure = false
/// rather than an exception.
QdsReport distil(const LinkMeasurements& link, const QdsParams& params);

nlohmann::json to_json(const QdsReport& report);

}  // namespace mdiqds::qds
