#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdiqds/channel.hpp"
#include "mdiqds/keyrate.hpp"
#include "mdiqds/netsim.hpp"
#include "mdiqds/qds.hpp"
#include "mdiqds/types.hpp"

/// JSON run configurations for the command-line tool. Every reader fills
/// missing fields from defaults, rejects unknown fields, and names the
/// offending field in its InputError. Writers emit the fully resolved form.
namespace mdiqds::config {

/// Parses a JSON file. Syntax errors carry line and column.
nlohmann::json load_json(const std::filesystem::path& path);
nlohmann::json parse_json(const std::string& text, const std::string& origin);

nlohmann::json to_json(const IntensitySet& intensities);
IntensitySet intensities_from_json(const nlohmann::json& doc, const std::string& where = "intensities");

nlohmann::json to_json(const keyrate::SecurityParams& params);
keyrate::SecurityParams security_from_json(const nlohmann::json& doc, const std::string& where = "security");

struct SimulateConfig {
  std::uint64_t slots = 1'000'000;
  netsim::SessionWeights weights;
  IntensitySet intensities;
  channel::ChannelParams alice;    // Alice to the relay
  channel::ChannelParams bob;      // Bob to the relay
  double hom_visibility = 0.96;
  channel::MdiOptions mdi;
  std::uint64_t seed = 1;
};

SimulateConfig simulate_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SimulateConfig& config);
netsim::LinkModels link_models(const SimulateConfig& config);

struct SweepRun {
  keyrate::SweepConfig sweep;
  std::vector<double> distances;
};

SweepRun sweep_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SweepRun& run);

struct KeyrateRun {
  IntensitySet intensities;
  keyrate::SecurityParams security;
  /// Reported alongside the key; rate_bps is secure_bits / elapsed_s when
  /// elapsed_s is positive.
  double distance_km = 0.0;
  double elapsed_s = 0.0;
};

KeyrateRun keyrate_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const KeyrateRun& run);

struct QdsRun {
  qds::LinkMeasurements link;
  qds::QdsParams params;
  /// Published counterparts of report fields, printed next to them.
  nlohmann::json reference = nlohmann::json::object();
};

QdsRun qds_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const QdsRun& run);

}  // namespace mdiqds::config
