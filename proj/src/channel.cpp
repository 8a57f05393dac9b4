#include "mdiqds/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mdiqds/error.hpp"
#include "mdiqds/mathkit.hpp"

namespace mdiqds::channel {

namespace {

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(name) + " must lie in [0,1]");
}

// Probability that at least one of k photons is detected.
double multi_photon_efficiency(double eta, std::size_t k) {
  return 1.0 - std::pow(1.0 - eta, static_cast<double>(k));
}

}  // namespace

void ChannelParams::validate() const {
  if (!(distance_km >= 0.0)) throw DomainError("distance_km must be >= 0");
  if (!(attenuation_db_per_km >= 0.0)) throw DomainError("attenuation_db_per_km must be >= 0");
  require_probability(detector_efficiency, "detector_efficiency");
  require_probability(dark_count_prob, "dark_count_prob");
  require_probability(misalignment, "misalignment");
  if (!(clock_rate_hz > 0.0)) throw DomainError("clock_rate_hz must be > 0");
}

double ChannelParams::transmittance() const {
  return std::pow(10.0, -attenuation_db_per_km * distance_km / 10.0) * detector_efficiency;
}

void YieldModel::validate() const {
  const std::size_t expected = kind == ProtocolMode::kQkd ? n_cut + 1 : (n_cut + 1) * (n_cut + 1);
  if (yields.size() != expected || error_x.size() != expected || error_z.size() != expected) {
    throw InputError("yield model arrays must have " + std::to_string(expected) + " entries");
  }
  for (std::size_t i = 0; i < expected; ++i) {
    for (double p : {yields[i], error_x[i], error_z[i]}) {
      if (!(p >= 0.0 && p <= 1.0)) throw InputError("yield model entries must lie in [0,1]");
    }
  }
}

YieldModel qkd_yield_model(const ChannelParams& params, std::size_t n_cut) {
  params.validate();
  const double eta = params.transmittance();
  const double y0 = clamp_unit(2.0 * params.dark_count_prob);
  YieldModel model;
  model.kind = ProtocolMode::kQkd;
  model.n_cut = n_cut;
  model.yields.resize(n_cut + 1);
  model.error_x.resize(n_cut + 1);
  for (std::size_t n = 0; n <= n_cut; ++n) {
    const double eta_n = multi_photon_efficiency(eta, n);
    const double yield = clamp_unit(y0 + eta_n - y0 * eta_n);
    model.yields[n] = yield;
    model.error_x[n] =
        yield > 0.0 ? clamp_unit((0.5 * y0 + params.misalignment * eta_n * (1.0 - y0)) / yield) : 0.0;
  }
  if (model.yields[0] == 0.0) model.error_x[0] = 0.5;
  model.error_z = model.error_x;
  return model;
}

YieldModel mdi_yield_model(const ChannelParams& params_a, const ChannelParams& params_b, double hom_visibility,
                           const MdiOptions& options, std::size_t n_cut) {
  params_a.validate();
  params_b.validate();
  require_probability(hom_visibility, "hom_visibility");
  require_probability(options.bell_success, "bell_success");
  require_probability(options.multiphoton_x_error, "multiphoton_x_error");

  const double eta_a = params_a.transmittance();
  const double eta_b = params_b.transmittance();
  const double dark = 0.5 * (params_a.dark_count_prob + params_b.dark_count_prob);
  const double mis = 0.5 * (params_a.misalignment + params_b.misalignment);
  const double single_x_error = clamp_unit(mis + 0.5 * (1.0 - hom_visibility));
  const double multi_x_error = std::max(options.multiphoton_x_error, single_x_error);

  YieldModel model;
  model.kind = ProtocolMode::kMdi;
  model.n_cut = n_cut;
  const std::size_t size = (n_cut + 1) * (n_cut + 1);
  model.yields.resize(size);
  model.error_x.resize(size);
  model.error_z.resize(size);
  for (std::size_t n = 0; n <= n_cut; ++n) {
    const double a = multi_photon_efficiency(eta_a, n);
    for (std::size_t m = 0; m <= n_cut; ++m) {
      const double b = multi_photon_efficiency(eta_b, m);
      const double signal = options.bell_success * a * b;
      const double accidental = clamp_unit(2.0 * dark * dark + dark * (a + b));
      const double yield = clamp_unit(signal + (1.0 - signal) * accidental);
      const double noise_errors = 0.5 * (1.0 - signal) * accidental;
      const double x_signal_error = (n == 1 && m == 1) ? single_x_error : multi_x_error;
      const std::size_t i = model.index(n, m);
      model.yields[i] = yield;
      if (yield > 0.0) {
        model.error_x[i] = clamp_unit((signal * x_signal_error + noise_errors) / yield);
        model.error_z[i] = clamp_unit((signal * mis + noise_errors) / yield);
      } else {
        model.error_x[i] = 0.5;
        model.error_z[i] = 0.5;
      }
    }
  }
  return model;
}

GainQber expected_gain_and_qber(const YieldModel& model, Basis basis, double mu, std::optional<double> nu) {
  if (!(mu >= 0.0)) throw DomainError("mean photon number must be >= 0");
  const std::size_t cut = model.n_cut;
  double gain = 0.0;
  double error_gain = 0.0;

  if (model.kind == ProtocolMode::kQkd) {
    if (nu) throw DomainError("QKD models take a single intensity");
    for (std::size_t n = 0; n <= cut; ++n) {
      const double w = mathkit::poisson_pmf(mu, n);
      gain += w * model.yield(n);
      error_gain += w * model.yield(n) * model.error_rate(basis, n);
    }
  } else {
    if (!nu || !(*nu >= 0.0)) throw DomainError("MDI models need a second intensity >= 0");
    std::vector<double> wb(cut + 1);
    for (std::size_t m = 0; m <= cut; ++m) wb[m] = mathkit::poisson_pmf(*nu, m);
    for (std::size_t n = 0; n <= cut; ++n) {
      const double wa = mathkit::poisson_pmf(mu, n);
      for (std::size_t m = 0; m <= cut; ++m) {
        const double w = wa * wb[m];
          gain += w * model.yield(n, m);
        error_gain += w * model.yield(n, m) * model.error_rate(basis, n, m);
      }
    }
  }

  double tail = mathkit::poisson_tail(mu, cut);
  if (nu) tail = tail + mathkit::poisson_tail(*nu, cut) - tail * mathkit::poisson_tail(*nu, cut);
  if (tail > kTruncationLimit) {
    throw DomainError("photon-number cutoff " + std::to_string(cut) + " too small for intensity " +
                      std::to_string(mu));
  }
  GainQber out;
  out.gain = clamp_unit(gain);
  out.qber = gain > 0.0 ? clamp_unit(error_gain / gain) : 0.5;
  out.truncation_error = tail;
  return out;
}

CountRecord sample_record(double gain, double qber, std::uint64_t n_pulses, Rng& rng) {
  CountRecord record;
  record.sent = n_pulses;
  if (n_pulses == 0) return record;
  std::binomial_distribution<std::int64_t> detections(static_cast<std::int64_t>(n_pulses), clamp_unit(gain));
  record.detected = static_cast<std::uint64_t>(detections(rng));
  if (record.detected > 0) {
    std::binomial_distribution<std::int64_t> errors(static_cast<std::int64_t>(record.detected), clamp_unit(qber));
    record.errors = static_cast<std::uint64_t>(errors(rng));
  }
  return record;
}

CountRecord sample_counts(const YieldModel& model, Basis basis, double mu, std::optional<double> nu,
                          std::uint64_t n_pulses, std::uint64_t seed) {
  const GainQber expected = expected_gain_and_qber(model, basis, mu, nu);
  Rng rng = make_rng(seed);
  return sample_record(expected.gain, expected.qber, n_pulses, rng);
}

nlohmann::json to_json(const YieldModel& model) {
  nlohmann::json doc;
  doc["kind"] = std::string(to_string(model.kind));
  doc["n_cut"] = model.n_cut;
  auto dense = [&](const std::vector<double>& values) {
    if (model.kind == ProtocolMode::kQkd) return nlohmann::json(values);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t n = 0; n <= model.n_cut; ++n) {
      rows.push_back(std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(n * (model.n_cut + 1)),
                                         values.begin() + static_cast<std::ptrdiff_t>((n + 1) * (model.n_cut + 1))));
    }
    return rows;
  };
  doc["yields"] = dense(model.yields);
  doc["error_rates"] = dense(model.error_x);
  doc["error_rates_z"] = dense(model.error_z);
  return doc;
}

YieldModel yield_model_from_json(const nlohmann::json& doc) {
  try {
    YieldModel model;
    model.kind = parse_mode(doc.at("kind").get<std::string>());
    model.n_cut = doc.at("n_cut").get<std::size_t>();
    auto flatten = [&](const nlohmann::json& values) {
      std::vector<double> out;
      if (model.kind == ProtocolMode::kQkd) return values.get<std::vector<double>>();
      for (const auto& row : values) {
        const auto r = row.get<std::vector<double>>();
        out.insert(out.end(), r.begin(), r.end());
      }
      return out;
    };
    model.yields = flatten(doc.at("yields"));
    model.error_x = flatten(doc.at("error_rates"));
    model.error_z = doc.contains("error_rates_z") ? flatten(doc.at("error_rates_z")) : model.error_x;
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed yield model: ") + e.what());
  }
}

nlohmann::json to_json(const ChannelParams& params) {
  return {{"distance_km", params.distance_km},
          {"attenuation_db_per_km", params.attenuation_db_per_km},
          {"detector_efficiency", params.detector_efficiency},
          {"dark_count_prob", params.dark_count_prob},
          {"misalignment", params.misalignment},
          {"clock_rate_hz", params.clock_rate_hz}};
}

ChannelParams channel_params_from_json(const nlohmann::json& doc, const ChannelParams& defaults) {
  ChannelParams p = defaults;
  try {
    p.distance_km = doc.value("distance_km", p.distance_km);
    p.attenuation_db_per_km = doc.value("attenuation_db_per_km", p.attenuation_db_per_km);
    p.detector_efficiency = doc.value("detector_efficiency", p.detector_efficiency);
    p.dark_count_prob = doc.value("dark_count_prob", p.dark_count_prob);
    p.misalignment = doc.value("misalignment", p.misalignment);
    p.clock_rate_hz = doc.value("clock_rate_hz", p.clock_rate_hz);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed channel parameters: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace mdiqds::channel
