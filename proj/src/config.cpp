#include "mdiqds/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "mdiqds/error.hpp"

namespace mdiqds::config {

namespace {

using nlohmann::json;

// Reads typed fields of one JSON object and rejects keys nobody asked for.
// Keys starting with '_' are comments.
class Fields {
 public:
  Fields(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) throw InputError(where_ + ": expected a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = doc_.find(key);
    if (it == doc_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw InputError(path(key) + ": expected " + expected<T>() + ", got " + it->dump());
    }
  }

  // Sub-object, or nullptr when absent.
  const json* child(const char* key) {
    seen_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  [[nodiscard]] std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!key.empty() && key.front() == '_') continue;
      if (seen_.count(key) == 0) throw InputError(path(key) + ": unknown field");
    }
  }

 private:
  template <typename T>
  static std::string expected() {
    if constexpr (std::is_same_v<T, std::string>) {
      return "a string";
    } else if constexpr (std::is_same_v<T, bool>) {
      return "true or false";
    } else if constexpr (std::is_integral_v<T>) {
      return "a non-negative integer";
    } else if constexpr (std::is_floating_point_v<T>) {
      return "a number";
    } else {
      return "a list";
    }
  }

  const json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

// Wraps domain validation so the message names the section.
template <typename F>
void checked(const std::string& where, F&& validate) {
  try {
    validate();
  } catch (const DomainError& e) {
    throw InputError(where + ": " + e.what());
  }
}

channel::ChannelParams channel_from(const json& doc, const std::string& where) {
  channel::ChannelParams p;
  Fields f(doc, where);
  f.read("distance_km", p.distance_km);
  f.read("attenuation_db_per_km", p.attenuation_db_per_km);
  f.read("detector_efficiency", p.detector_efficiency);
  f.read("dark_count_prob", p.dark_count_prob);
  f.read("misalignment", p.misalignment);
  f.read("clock_rate_hz", p.clock_rate_hz);
  f.finish();
  checked(where, [&] { p.validate(); });
  return p;
}

channel::MdiOptions mdi_from(const json& doc, const std::string& where) {
  channel::MdiOptions o;
  Fields f(doc, where);
  f.read("bell_success", o.bell_success);
  f.read("multiphoton_x_error", o.multiphoton_x_error);
  f.finish();
  if (!(o.bell_success > 0.0 && o.bell_success <= 1.0)) throw InputError(where + ".bell_success: must lie in (0,1]");
  if (!(o.multiphoton_x_error >= 0.0 && o.multiphoton_x_error <= 0.5)) {
    throw InputError(where + ".multiphoton_x_error: must lie in [0,1/2]");
  }
  return o;
}

json to_json(const channel::MdiOptions& o) {
  return {{"bell_success", o.bell_success}, {"multiphoton_x_error", o.multiphoton_x_error}};
}

double budget_field(Fields& f, const char* key, double fallback) {
  double value = fallback;
  f.read(key, value);
  if (!(value > 0.0 && value <= 1.0)) throw InputError(f.path(key) + ": must lie in (0,1]");
  return value;
}

void check_visibility(double v, const std::string& where) {
  if (!(v >= 0.0 && v <= 1.0)) throw InputError(where + ": must lie in [0,1]");
}

}  // namespace

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // The library reports the byte offset; translate it to line:column.
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InputError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": invalid JSON");
  }
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path.string());
}

json to_json(const IntensitySet& in) {
  return {{"s", in.s}, {"u", in.u}, {"v", in.v}, {"w", in.w}, {"z_basis_prob", in.z_basis_prob}};
}

IntensitySet intensities_from_json(const json& doc, const std::string& where) {
  IntensitySet in;
  Fields f(doc, where);
  f.read("s", in.s);
  f.read("u", in.u);
  f.read("v", in.v);
  f.read("w", in.w);
  f.read("z_basis_prob", in.z_basis_prob);
  f.finish();
  checked(where, [&] { in.validate(); });
  return in;
}

json to_json(const keyrate::SecurityParams& p) {
  return {{"eps_sec", p.eps_sec.value()},
          {"eps_cor", p.eps_cor.value()},
          {"f_ec", p.f_ec},
          {"widening", p.widening == decoy::Widening::kAdditive ? "additive" : "relative_entropy"}};
}

keyrate::SecurityParams security_from_json(const json& doc, const std::string& where) {
  keyrate::SecurityParams p;
  Fields f(doc, where);
  const double eps_sec = budget_field(f, "eps_sec", p.eps_sec.value());
  const double eps_cor = budget_field(f, "eps_cor", p.eps_cor.value());
  f.read("f_ec", p.f_ec);
  std::string widening = "additive";
  f.read("widening", widening);
  f.finish();
  p.eps_sec = mathkit::FailureBudget(eps_sec);
  p.eps_cor = mathkit::FailureBudget(eps_cor);
  if (widening == "additive") {
    p.widening = decoy::Widening::kAdditive;
  } else if (widening == "relative_entropy") {
    p.widening = decoy::Widening::kRelativeEntropy;
  } else {
    throw InputError(where + ".widening: expected \"additive\" or \"relative_entropy\"");
  }
  checked(where, [&] { p.validate(); });
  return p;
}

SimulateConfig simulate_config_from_json(const json& doc) {
  SimulateConfig c;
  Fields f(doc, "simulate");
  f.read("slots", c.slots);
  f.read("seed", c.seed);
  f.read("hom_visibility", c.hom_visibility);
  check_visibility(c.hom_visibility, "simulate.hom_visibility");
  if (const json* w = f.child("weights")) {
    Fields wf(*w, "simulate.weights");
    wf.read("mdi", c.weights.mdi);
    wf.read("ac", c.weights.ac);
    wf.read("bc", c.weights.bc);
    wf.finish();
    if (c.weights.mdi < 0 || c.weights.ac < 0 || c.weights.bc < 0 || c.weights.mdi + c.weights.ac + c.weights.bc <= 0) {
      throw InputError("simulate.weights: must be >= 0 and not all zero");
    }
  }
  if (const json* in = f.child("intensities")) c.intensities = intensities_from_json(*in, "simulate.intensities");
  if (const json* a = f.child("alice")) c.alice = channel_from(*a, "simulate.alice");
  if (const json* b = f.child("bob")) c.bob = channel_from(*b, "simulate.bob");
  if (const json* m = f.child("mdi")) c.mdi = mdi_from(*m, "simulate.mdi");
  f.finish();
  return c;
}

json to_json(const SimulateConfig& c) {
  return {{"slots", c.slots},
          {"seed", c.seed},
          {"weights", {{"mdi", c.weights.mdi}, {"ac", c.weights.ac}, {"bc", c.weights.bc}}},
          {"intensities", to_json(c.intensities)},
          {"alice", channel::to_json(c.alice)},
          {"bob", channel::to_json(c.bob)},
          {"hom_visibility", c.hom_visibility},
          {"mdi", to_json(c.mdi)}};
}

netsim::LinkModels link_models(const SimulateConfig& c) {
  // Charlie sits at the relay, so each QKD link is one sender's fibre.
  netsim::LinkModels models;
  models.ab = channel::mdi_yield_model(c.alice, c.bob, c.hom_visibility, c.mdi);
  models.ac = channel::qkd_yield_model(c.alice);
  models.bc = channel::qkd_yield_model(c.bob);
  return models;
}

SweepRun sweep_config_from_json(const json& doc) {
  SweepRun run;
  auto& s = run.sweep;
  Fields f(doc, "sweep");
  std::string mode = "QKD";
  f.read("mode", mode);
  try {
    s.mode = parse_mode(mode);
  } catch (const InputError&) {
    throw InputError("sweep.mode: expected \"QKD\" or \"MDI\"");
  }
  f.read("distances", run.distances);
  f.read("pulse_budget", s.pulse_budget);
  f.read("duty", s.duty);
  f.read("seed", s.seed);
  f.read("hom_visibility", s.hom_visibility);
  f.read("qkd_branch_fraction", s.qkd_branch_fraction);
  if (const json* c = f.child("channel")) s.channel = channel_from(*c, "sweep.channel");
  if (const json* in = f.child("intensities")) s.intensities = intensities_from_json(*in, "sweep.intensities");
  if (const json* sec = f.child("security")) s.security = security_from_json(*sec, "sweep.security");
  if (const json* m = f.child("mdi")) s.mdi = mdi_from(*m, "sweep.mdi");
  f.finish();
  if (run.distances.empty()) throw InputError("sweep.distances: must be a non-empty list");
  for (double d : run.distances) {
    if (!(d >= 0.0)) throw InputError("sweep.distances: distances must be >= 0");
  }
  if (!(s.pulse_budget >= 1.0 && s.pulse_budget < 1.8e19)) {
    throw InputError("sweep.pulse_budget: must lie in [1, 1.8e19)");
  }
  if (!(s.duty > 0.0 && s.duty <= 1.0)) throw InputError("sweep.duty: must lie in (0,1]");
  if (!(s.qkd_branch_fraction > 0.0 && s.qkd_branch_fraction <= 1.0)) {
    throw InputError("sweep.qkd_branch_fraction: must lie in (0,1]");
  }
  check_visibility(s.hom_visibility, "sweep.hom_visibility");
  return run;
}

json to_json(const SweepRun& run) {
  const auto& s = run.sweep;
  return {{"mode", std::string(to_string(s.mode))},
          {"distances", run.distances},
          {"pulse_budget", s.pulse_budget},
          {"duty", s.duty},
          {"seed", s.seed},
          {"hom_visibility", s.hom_visibility},
          {"qkd_branch_fraction", s.qkd_branch_fraction},
          {"channel", channel::to_json(s.channel)},
          {"intensities", to_json(s.intensities)},
          {"security", to_json(s.security)},
          {"mdi", to_json(s.mdi)}};
}

KeyrateRun keyrate_config_from_json(const json& doc) {
  KeyrateRun run;
  Fields f(doc, "keyrate");
  f.read("distance_km", run.distance_km);
  f.read("elapsed_s", run.elapsed_s);
  if (const json* in = f.child("intensities")) run.intensities = intensities_from_json(*in, "keyrate.intensities");
  if (const json* sec = f.child("security")) run.security = security_from_json(*sec, "keyrate.security");
  f.finish();
  if (!(run.elapsed_s >= 0.0)) throw InputError("keyrate.elapsed_s: must be >= 0");
  return run;
}

json to_json(const KeyrateRun& run) {
  return {{"distance_km", run.distance_km},
          {"elapsed_s", run.elapsed_s},
          {"intensities", to_json(run.intensities)},
          {"security", to_json(run.security)}};
}

QdsRun qds_config_from_json(const json& doc) {
  QdsRun run;
  Fields f(doc, "qds");
  if (const json* l = f.child("link")) {
    Fields lf(*l, "qds.link");
    std::string link = "AB";
    lf.read("link", link);
    try {
      run.link.link = parse_link(link);
    } catch (const InputError&) {
      throw InputError("qds.link.link: expected \"AB\", \"AC\" or \"BC\"");
    }
    lf.read("s1_sig_lower", run.link.s1_sig_lower);
    lf.read("eph_sig_upper", run.link.eph_sig_upper);
    lf.read("e_test", run.link.e_test);
    lf.read("z_pool", run.link.z_pool);
    lf.read("total_time_s", run.link.total_time_s);
    lf.read("duty_fraction", run.link.duty_fraction);
    lf.finish();
  }
  if (const json* p = f.child("params")) {
    Fields pf(*p, "qds.params");
    auto& q = run.params;
    pf.read("c_sig", q.c_sig);
    pf.read("c_test", q.c_test);
    q.eps_h = mathkit::FailureBudget(budget_field(pf, "eps_h", q.eps_h.value()));
    q.p_rep_budget = mathkit::FailureBudget(budget_field(pf, "p_rep_budget", q.p_rep_budget.value()));
    q.p_fail_total = mathkit::FailureBudget(budget_field(pf, "p_fail_total", q.p_fail_total.value()));
    pf.read("eps_pe", q.eps_pe);
    pf.read("auth_fraction", q.auth_fraction);
    pf.read("verify_fraction", q.verify_fraction);
    pf.finish();
    if (q.c_sig == 0) throw InputError("qds.params.c_sig: must be positive");
    if (!(0.0 < q.auth_fraction && q.auth_fraction < q.verify_fraction && q.verify_fraction < 1.0)) {
      throw InputError("qds.params: need 0 < auth_fraction < verify_fraction < 1");
    }
  }
  if (const json* r = f.child("reference")) {
    if (!r->is_object()) throw InputError("qds.reference: expected a JSON object");
    run.reference = *r;
  }
  f.finish();
  return run;
}

json to_json(const QdsRun& run) {
  const auto& l = run.link;
  const auto& q = run.params;
  return {{"link",
           {{"link", std::string(to_string(l.link))},
            {"s1_sig_lower", l.s1_sig_lower},
            {"eph_sig_upper", l.eph_sig_upper},
            {"e_test", l.e_test},
            {"z_pool", l.z_pool},
            {"total_time_s", l.total_time_s},
            {"duty_fraction", l.duty_fraction}}},
          {"params",
           {{"c_sig", q.c_sig},
            {"c_test", q.c_test},
            {"eps_h", q.eps_h.value()},
            {"p_rep_budget", q.p_rep_budget.value()},
            {"p_fail_total", q.p_fail_total.value()},
            {"eps_pe", q.eps_pe},
            {"auth_fraction", q.auth_fraction},
            {"verify_fraction", q.verify_fraction}}},
          {"reference", run.reference}};
}

}  // namespace mdiqds::config
