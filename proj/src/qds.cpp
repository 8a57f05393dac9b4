#include "mdiqds/qds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdiqds/error.hpp"
#include "mdiqds/rng.hpp"

namespace mdiqds::qds {

double eve_error_floor(double s1_sig_lower, std::uint64_t c_sig, double eph_sig_upper) {
  if (c_sig == 0) throw DomainError("signature block size must be positive");
  if (!(s1_sig_lower >= 0.0)) throw DomainError("single-photon count must be >= 0");
  if (s1_sig_lower == 0.0) return 0.0;
  if (!(eph_sig_upper >= 0.0 && eph_sig_upper <= 0.5)) throw DomainError("phase-error bound must lie in [0,1/2]");
  const double rhs = s1_sig_lower / static_cast<double>(c_sig) * (1.0 - mathkit::binary_entropy(eph_sig_upper));
  if (rhs > 1.0) throw DomainError("single-photon count exceeds the signature block");
  return mathkit::inv_binary_entropy(rhs);
}

double qber_upper(double e_test, std::uint64_t c_test, std::uint64_t c_sig, double eps_h) {
  if (!(e_test >= 0.0 && e_test <= 1.0)) throw DomainError("test QBER must lie in [0,1]");
  return std::clamp(e_test + mathkit::serfling_deviation(c_sig, c_test, eps_h), 0.0, 1.0);
}

Thresholds thresholds(double e_sig_upper, double p_e, double auth_fraction, double verify_fraction) {
  if (!(0.0 < auth_fraction && auth_fraction < verify_fraction && verify_fraction < 1.0)) {
    throw DomainError("threshold fractions must satisfy 0 < auth < verify < 1");
  }
  if (!(p_e > e_sig_upper)) {
    throw InsecureChannelError("insecure channel: no threshold gap (p_E " + std::to_string(p_e) +
                               " <= QBER bound " + std::to_string(e_sig_upper) + ")");
  }
  const double gap = p_e - e_sig_upper;
  return {e_sig_upper + auth_fraction * gap, e_sig_upper + verify_fraction * gap};
}

std::uint64_t signature_length(double s_auth, double s_ver, double p_rep_budget) {
  if (!(s_ver > s_auth)) throw DomainError("signature length needs s_ver > s_auth");
  if (!(p_rep_budget > 0.0 && p_rep_budget <= 1.0)) throw DomainError("repudiation budget must lie in (0,1]");
  const double gap = s_ver - s_auth;
  return static_cast<std::uint64_t>(std::ceil(4.0 * std::log(1.0 / p_rep_budget) / (gap * gap)));
}

double repudiation_bound(double s_auth, double s_ver, std::uint64_t length) {
  const double gap = s_ver - s_auth;
  return std::min(1.0, std::exp(-gap * gap * static_cast<double>(length) / 4.0));
}

AbortForge abort_and_forge(double e_sig_upper, double s_auth, double s_ver, double p_e, std::uint64_t length) {
  if (!(e_sig_upper <= s_auth && s_auth <= s_ver && s_ver <= p_e)) {
    throw DomainError("abort/forge needs E_sig <= s_auth <= s_ver <= p_E");
  }
  AbortForge out;
  out.log_p_hab = mathkit::log_hoeffding_exponent_bound(s_auth - e_sig_upper, length);
  out.log_p_for = mathkit::log_hoeffding_exponent_bound(p_e - s_ver, length);
  out.p_hab = mathkit::hoeffding_exponent_bound(s_auth - e_sig_upper, length);
  out.p_for = mathkit::hoeffding_exponent_bound(p_e - s_ver, length);
  return out;
}

std::uint64_t signature_block_count(std::uint64_t pool_size, std::uint64_t c_test, std::uint64_t c_sig) {
  if (c_sig == 0) throw DomainError("signature block size must be positive");
  if (pool_size < c_test || pool_size - c_test < c_sig) {
    throw DomainError("Z pool of " + std::to_string(pool_size) + " bits cannot hold a test set of " +
                      std::to_string(c_test) + " and one block of " + std::to_string(c_sig));
  }
  return (pool_size - c_test) / c_sig;
}

BlockExtraction extract_blocks(std::span<const std::uint8_t> z_pool, Link link, std::uint64_t c_test,
                               std::uint64_t c_sig, std::uint64_t seed) {
  const std::uint64_t count = signature_block_count(z_pool.size(), c_test, c_sig);
  std::vector<std::uint64_t> order(z_pool.size());
  for (std::uint64_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = make_rng(seed);
  // Only the prefix that is handed out needs shuffling.
  const std::uint64_t used = c_test + count * c_sig;
  for (std::uint64_t i = 0; i < used; ++i) {
    const std::uint64_t j = i + uniform_below(rng, order.size() - i);
    std::swap(order[i], order[j]);
  }

  BlockExtraction out;
  out.test_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(c_test));
  std::sort(out.test_indices.begin(), out.test_indices.end());
  out.blocks.reserve(count);
  for (std::uint64_t b = 0; b < count; ++b) {
    SignatureBlock block;
    block.link = link;
    const auto first = order.begin() + static_cast<std::ptrdiff_t>(c_test + b * c_sig);
    block.origin_indices.assign(first, first + static_cast<std::ptrdiff_t>(c_sig));
    std::sort(block.origin_indices.begin(), block.origin_indices.end());
    block.bits.reserve(c_sig);
    for (auto index : block.origin_indices) block.bits.push_back(z_pool[index]);
    out.blocks.push_back(std::move(block));
  }
  return out;
}

double timing_report(double total_time_s, double duty_fraction, std::uint64_t n_signatures) {
  if (n_signatures == 0) throw DomainError("timing needs at least one signature");
  if (!(total_time_s >= 0.0)) throw DomainError("total time must be >= 0");
  if (!(duty_fraction > 0.0 && duty_fraction <= 1.0)) throw DomainError("duty fraction must lie in (0,1]");
  return total_time_s * duty_fraction / static_cast<double>(n_signatures);
}

QdsReport distil(const LinkMeasurements& link, const QdsParams& params) {
  QdsReport r;
  r.inputs = link;
  r.params = params;
  r.e_test = link.e_test;
  r.p_e = eve_error_floor(link.s1_sig_lower, params.c_sig, link.eph_sig_upper);
  r.e_sig_upper = qber_upper(link.e_test, params.c_test, params.c_sig, params.eps_h.value());

  if (!(r.p_e > r.e_sig_upper)) {
    r.outcome = "no positive QDS rate: p_E does not exceed the QBER bound";
    return r;
  }
  const auto th = thresholds(r.e_sig_upper, r.p_e, params.auth_fraction, params.verify_fraction);
  r.s_auth = th.s_auth;
  r.s_ver = th.s_ver;
  r.l_sig = signature_length(r.s_auth, r.s_ver, params.p_rep_budget.value());
  // The block size is the signature length actually used.
  r.p_rep = repudiation_bound(r.s_auth, r.s_ver, params.c_sig);
  const auto af = abort_and_forge(r.e_sig_upper, r.s_auth, r.s_ver, r.p_e, params.c_sig);
  r.p_hab = af.p_hab;
  r.p_for = af.p_for;
  r.log_p_hab = af.log_p_hab;
  r.log_p_for = af.log_p_for;
  r.total_failure = r.p_rep + r.p_hab + r.p_for + params.eps_h.value() + params.eps_pe;

  if (link.z_pool < params.c_test || link.z_pool - params.c_test < params.c_sig) {
    r.outcome = "no positive QDS rate: Z pool smaller than test set plus one block";
    return r;
  }
  r.n_signatures = signature_block_count(link.z_pool, params.c_test, params.c_sig);
  r.avg_time_per_signature_s = timing_report(link.total_time_s, link.duty_fraction, r.n_signatures);

  if (r.l_sig > params.c_sig) {
    r.outcome = "no positive QDS rate: required signature length exceeds the block size";
  } else if (r.total_failure > params.p_fail_total.value()) {
    r.outcome = "no positive QDS rate: failure budget exceeded";
  } else {
    r.secure = true;
    r.outcome = "ok";
  }
  return r;
}

nlohmann::json to_json(const QdsReport& r) {
  nlohmann::json doc;
  doc["inputs"] = {{"link", std::string(to_string(r.inputs.link))},
                   {"s1_sig_lower", r.inputs.s1_sig_lower},
                   {"eph_sig_upper", r.inputs.eph_sig_upper},
                   {"e_test", r.inputs.e_test},
                   {"z_pool", r.inputs.z_pool},
                   {"total_time_s", r.inputs.total_time_s},
                   {"duty_fraction", r.inputs.duty_fraction}};
  doc["params"] = {{"c_sig", r.params.c_sig},
                   {"c_test", r.params.c_test},
                   {"eps_h", r.params.eps_h.value()},
                   {"p_rep_budget", r.params.p_rep_budget.value()},
                   {"p_fail_total", r.params.p_fail_total.value()},
                   {"eps_pe", r.params.eps_pe},
                   {"auth_fraction", r.params.auth_fraction},
                   {"verify_fraction", r.params.verify_fraction}};
  doc["secure"] = r.secure;
  doc["outcome"] = r.outcome;
  doc["p_e"] = r.p_e;
  doc["e_test"] = r.e_test;
  doc["e_sig_upper"] = r.e_sig_upper;
  doc["s_auth"] = r.s_auth;
  doc["s_ver"] = r.s_ver;
  doc["l_sig"] = r.l_sig;
  doc["p_rep"] = r.p_rep;
  doc["p_hab"] = r.p_hab;
  doc["p_for"] = r.p_for;
  doc["log_p_hab"] = r.log_p_hab;
  doc["log_p_for"] = r.log_p_for;
  doc["total_failure"] = r.total_failure;
  doc["n_signatures"] = r.n_signatures;
  doc["avg_time_per_signature_s"] = r.avg_time_per_signature_s;
  return doc;
}

}  // namespace mdiqds::qds
