// mdiqds: simulate the three-party network, estimate key rates and distil
// signature statistics. Every run writes a manifest holding its resolved
// configuration so the same inputs reproduce the same bytes.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdiqds/config.hpp"
#include "mdiqds/count_table.hpp"
#include "mdiqds/decoy.hpp"
#include "mdiqds/error.hpp"
#include "mdiqds/keyrate.hpp"
#include "mdiqds/netsim.hpp"
#include "mdiqds/qds.hpp"

#ifndef MDIQDS_PRESET_DIR
#define MDIQDS_PRESET_DIR "presets"
#endif
#ifndef MDIQDS_VERSION
#define MDIQDS_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mdiqds;

namespace {

struct Common {
  std::string config_path;
  std::string preset;
  std::string out_dir = "out";
  std::string format = "json";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_format) {
  c.format = default_format;
  cmd->add_option("--config", c.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--preset", c.preset, "preset name or path, overridden field by field by --config");
  cmd->add_option("--seed", c.seed, "seed, overrides the configured one");
  cmd->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

fs::path preset_path(const std::string& name) {
  if (fs::exists(name)) return name;
  fs::path p = fs::path(MDIQDS_PRESET_DIR) / (name + ".json");
  if (!fs::exists(p)) throw InputError("unknown preset '" + name + "' (looked in " MDIQDS_PRESET_DIR ")");
  return p;
}

// Preset section for the command (or the whole preset), patched by the
// config file's section for the command (or the whole file).
json resolve(const Common& c, const std::string& section) {
  auto pick = [&](const json& doc) {
    if (doc.is_object() && doc.contains(section)) return doc.at(section);
    json copy = doc;
    if (copy.is_object()) {
      // Sections meant for other commands do not belong to this one.
      for (const char* other : {"simulate", "keyrate", "sweep", "qds"}) {
        if (section != other) copy.erase(other);
      }
    }
    return copy;
  };
  json doc = json::object();
  if (!c.preset.empty()) doc = pick(config::load_json(preset_path(c.preset)));
  if (!c.config_path.empty()) doc.merge_patch(pick(config::load_json(c.config_path)));
  if (!doc.is_object()) throw InputError(section + " configuration must be a JSON object");
  for (auto it = doc.begin(); it != doc.end();) {
    it = (!it.key().empty() && it.key().front() == '_') ? doc.erase(it) : std::next(it);
  }
  return doc;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

json manifest(const std::string& command, const Common& c, json resolved) {
  return {{"tool", "mdiqds"},
          {"version", MDIQDS_VERSION},
          {"command", command},
          {"preset", c.preset},
          {"format", c.format},
          {"config", std::move(resolved)}};
}

void write_manifest(const fs::path& dir, const json& doc) { write_text(dir / "manifest.json", doc.dump(2) + "\n"); }

fs::path prepare(const Common& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string table_text(const CountTable& table, const std::string& format) {
  if (format == "csv") {
    std::ostringstream out;
    write_csv(out, table);
    return out.str();
  }
  return to_json(table).dump(2) + "\n";
}

CountTable read_table(const std::string& path) {
  if (fs::path(path).extension() == ".csv") {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    try {
      return count_table_from_csv(in);
    } catch (const InputError& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  try {
    return count_table_from_json(config::load_json(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

int cmd_simulate(const Common& c) {
  auto cfg = config::simulate_config_from_json(resolve(c, "simulate"));
  if (c.seed) cfg.seed = *c.seed;
  const auto plan = netsim::schedule(cfg.slots, cfg.weights, cfg.intensities, cfg.seed);
  const auto out = netsim::run_plan(plan, config::link_models(cfg), cfg.seed + 1);

  const fs::path dir = prepare(c);
  json doc = manifest("simulate", c, config::to_json(cfg));
  json outputs = json::array();
  json tallies = json::object();
  for (Link link : {Link::kAB, Link::kAC, Link::kBC}) {
    const std::string name = "counts_" + std::string(to_string(link)) + "." + c.format;
    write_text(dir / name, table_text(out.table(link), c.format));
    outputs.push_back(name);
    const auto& pool = out.pool(link);
    tallies[std::string(to_string(link))] = {{"sent", out.table(link).total_sent()},
                                             {"detected", out.table(link).total_detected()},
                                             {"z_pool", pool.size()},
                                             {"z_pool_errors", pool.error_count()}};
  }
  doc["seeds"] = {{"schedule", cfg.seed}, {"run", cfg.seed + 1}};
  doc["outputs"] = outputs;
  doc["tallies"] = tallies;
  doc["diagnostics"] = netsim::to_json(out.diagnostics);
  write_manifest(dir, doc);
  std::cout << "simulated " << cfg.slots << " slots; tables in " << dir.string() << "\n";
  return 0;
}

json points_json(const std::vector<keyrate::SweepPoint>& points) {
  json rows = json::array();
  for (const auto& p : points) {
    json row = {{"distance_km", p.distance_km},
                {"mode", std::string(to_string(p.mode))},
                {"secure_bits", p.result.secure_bits},
                {"elapsed_s", p.result.elapsed_s},
                {"rate_bps", p.result.rate_bps}};
    if (!p.note.empty()) row["note"] = p.note;
    rows.push_back(row);
  }
  return rows;
}

void write_points(const fs::path& dir, const std::string& stem, const std::vector<keyrate::SweepPoint>& points,
                  const std::string& format, json& doc) {
  const std::string name = stem + "." + format;
  if (format == "csv") {
    std::ostringstream out;
    keyrate::write_sweep_csv(out, points);
    write_text(dir / name, out.str());
  } else {
    write_text(dir / name, points_json(points).dump(2) + "\n");
  }
  doc["outputs"] = json::array({name});
}

int run_sweep(const Common& c, const json& resolved, const std::string& command) {
  auto run = config::sweep_config_from_json(resolved);
  if (c.seed) run.sweep.seed = *c.seed;
  const auto points = keyrate::rate_sweep(run.sweep, run.distances);
  const fs::path dir = prepare(c);
  json doc = manifest(command, c, config::to_json(run));
  write_points(dir, "sweep", points, c.format, doc);
  write_manifest(dir, doc);
  std::ostringstream csv;
  keyrate::write_sweep_csv(csv, points);
  std::cout << csv.str();
  return 0;
}

int cmd_keyrate(const Common& c, const std::string& counts_path) {
  json resolved = resolve(c, "keyrate");
  if (counts_path.empty()) {
    if (!resolved.contains("distances")) {
      throw InputError("keyrate needs --counts FILE or a sweep configuration with distances");
    }
    return run_sweep(c, resolved, "keyrate");
  }
  const auto run = config::keyrate_config_from_json(resolved);
  const CountTable table = read_table(counts_path);
  const auto bounds = decoy::estimate_bounds(table, run.intensities, run.security.eps_sec.value(),
                                             {.widening = run.security.widening});
  const CountRecord& signal = table.at(table.signal_key());
  const double qber = signal.detected > 0 ? static_cast<double>(signal.errors) / static_cast<double>(signal.detected) : 0.0;
  keyrate::SweepPoint point;
  point.distance_km = run.distance_km;
  point.mode = table.mode();
  point.result = keyrate::secure_key_length(bounds, signal.detected, qber, run.security);
  point.result.elapsed_s = run.elapsed_s;
  if (run.elapsed_s > 0.0) point.result.rate_bps = static_cast<double>(point.result.secure_bits) / run.elapsed_s;

  const fs::path dir = prepare(c);
  json doc = manifest("keyrate", c, config::to_json(run));
  doc["counts"] = counts_path;
  doc["bounds"] = {{"s1_lower", bounds.s1_lower},     {"eph_upper", bounds.eph_upper},
                   {"y1_lower", bounds.y1_lower},     {"e1_x_upper", bounds.e1_x_upper},
                   {"x1_lower", bounds.x1_lower},     {"epsilon_spent", bounds.epsilon_spent},
                   {"qber_z", qber},                  {"n_z", signal.detected},
                   {"leak_ec_bits", point.result.leak_ec_bits}, {"delta_bits", point.result.delta_bits}};
  write_points(dir, "keyrate", {point}, c.format, doc);
  write_manifest(dir, doc);
  std::ostringstream csv;
  keyrate::write_sweep_csv(csv, {point});
  std::cout << csv.str();
  return 0;
}

// Link measurements from a count table: decoy bounds with half of eps_pe,
// restricted to one signature block with the rest.
qds::LinkMeasurements measure(const CountTable& table, const json& resolved, const config::QdsRun& run) {
  IntensitySet intensities;
  keyrate::SecurityParams analysis;
  if (resolved.contains("intensities")) intensities = config::intensities_from_json(resolved.at("intensities"), "qds.intensities");
  if (resolved.contains("security")) analysis = config::security_from_json(resolved.at("security"), "qds.security");
  if (!(run.params.eps_pe > 0.0 && run.params.eps_pe <= 1.0)) {
    throw InputError("qds.params.eps_pe: must lie in (0,1] when analysing counts");
  }
  const auto bounds = decoy::estimate_bounds(table, intensities, run.params.eps_pe / 2.0, {.widening = analysis.widening});
  const CountRecord& signal = table.at(table.signal_key());
  qds::LinkMeasurements m = run.link;
  m.link = table.link();
  m.z_pool = signal.detected;
  m.e_test = signal.detected > 0 ? static_cast<double>(signal.errors) / static_cast<double>(signal.detected) : 0.0;
  if (m.z_pool >= run.params.c_test + run.params.c_sig) {
    const auto block = decoy::restrict_to_block(bounds, run.params.c_sig, m.z_pool, run.params.eps_pe / 4.0);
    m.s1_sig_lower = std::min(block.s1_lower, static_cast<double>(run.params.c_sig));
    m.eph_sig_upper = block.eph_upper;
  } else {
    m.s1_sig_lower = 0.0;
    m.eph_sig_upper = 0.5;
  }
  return m;
}

void print_summary(const qds::QdsReport& r, const json& reference) {
  const json doc = qds::to_json(r);
  std::printf("%-26s %s\n", "outcome", r.outcome.c_str());
  for (const char* key : {"p_e", "e_test", "e_sig_upper", "s_auth", "s_ver", "l_sig", "p_rep", "p_hab", "p_for",
                          "log_p_hab", "log_p_for", "total_failure", "n_signatures", "avg_time_per_signature_s"}) {
    const double value = doc.at(key).get<double>();
    std::printf("%-26s %-14.6g", key, value);
    if (reference.contains(key)) std::printf(" reference %s", reference.at(key).dump().c_str());
    std::printf("\n");
  }
}

int cmd_qds(const Common& c, const std::string& counts_path) {
  json resolved = resolve(c, "qds");
  json core = resolved;
  core.erase("intensities");
  core.erase("security");
  auto run = config::qds_config_from_json(core);
  if (!counts_path.empty()) run.link = measure(read_table(counts_path), resolved, run);
  const auto report = qds::distil(run.link, run.params);

  const fs::path dir = prepare(c);
  json doc = manifest("qds", c, config::to_json(run));
  if (!counts_path.empty()) doc["counts"] = counts_path;
  const json report_doc = qds::to_json(report);
  std::string name;
  if (c.format == "csv") {
    name = "qds_report.csv";
    std::ostringstream out;
    out << "field,value\n";
    for (const auto& [key, value] : report_doc.items()) {
      if (!value.is_object()) out << key << ',' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
    write_text(dir / name, out.str());
  } else {
    name = "qds_report.json";
    write_text(dir / name, report_doc.dump(2) + "\n");
  }
  doc["outputs"] = json::array({name});
  doc["secure"] = report.secure;
  write_manifest(dir, doc);
  print_summary(report, run.reference);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconfigurable MDI/QKD network simulator and signature analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MDIQDS_VERSION);

  Common simulate_opts;
  Common keyrate_opts;
  Common sweep_opts;
  Common qds_opts;
  std::string keyrate_counts;
  std::string qds_counts;

  auto* simulate = app.add_subcommand("simulate", "schedule and simulate pulse slots, write count tables");
  add_common(simulate, simulate_opts, "json");
  auto* keyrate_cmd = app.add_subcommand("keyrate", "secure key length from a count table, or a rate sweep");
  add_common(keyrate_cmd, keyrate_opts, "csv");
  keyrate_cmd->add_option("--counts", keyrate_counts, "count table (.json or .csv)")->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("sweep", "secure key rate versus distance");
  add_common(sweep, sweep_opts, "csv");
  auto* qds_cmd = app.add_subcommand("qds", "signature statistics for one link");
  add_common(qds_cmd, qds_opts, "json");
  qds_cmd->add_option("--counts", qds_counts, "derive the link measurements from a count table")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(simulate_opts);
    if (*keyrate_cmd) return cmd_keyrate(keyrate_opts, keyrate_counts);
    if (*sweep) return run_sweep(sweep_opts, resolve(sweep_opts, "sweep"), "sweep");
    if (*qds_cmd) return cmd_qds(qds_opts, qds_counts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
