#include <doctest.h>

#include <filesystem>
#include <string>

#include "mdiqds/config.hpp"
#include "mdiqds/error.hpp"

using namespace mdiqds;
using namespace mdiqds::config;
using nlohmann::json;

namespace {

std::string error_of(const auto& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("syntax errors carry line and column") {
  const auto msg = error_of([] { (void)parse_json("{\n  \"a\": 1,\n  oops\n}", "run.json"); });
  CHECK(msg.rfind("run.json:3:", 0) == 0);
  CHECK(msg.find("invalid JSON") != std::string::npos);
}

TEST_CASE("defaults fill missing fields") {
  const auto sim = simulate_config_from_json(json::object());
  CHECK(sim.slots == 1'000'000);
  CHECK(sim.weights.mdi == 500.0);
  CHECK(sim.intensities.s == IntensitySet{}.s);
  const auto sec = security_from_json(json::object());
  CHECK(sec.eps_sec.value() == 1e-10);
  CHECK(sec.widening == decoy::Widening::kAdditive);
}

TEST_CASE("unknown and mistyped fields are named") {
  CHECK(error_of([] { (void)simulate_config_from_json(json{{"slot", 5}}); }).find("slot: unknown field") !=
        std::string::npos);
  CHECK(error_of([] { (void)intensities_from_json(json{{"s", "big"}}); }).find("intensities.s") !=
        std::string::npos);
  CHECK(error_of([] { (void)security_from_json(json{{"widening", "tight"}}); }).find("security.widening") !=
        std::string::npos);
  CHECK(error_of([] { (void)security_from_json(json{{"eps_sec", 2.0}}); }).find("eps_sec") != std::string::npos);
  // Underscore keys are comments.
  CHECK_NOTHROW((void)simulate_config_from_json(json{{"_note", "anything"}}));
}

TEST_CASE("invalid intensities are rejected") {
  CHECK_FALSE(error_of([] { (void)intensities_from_json(json{{"s", 0.1}, {"u", 0.2}}); }).empty());
}

TEST_CASE("resolved configs round trip") {
  SimulateConfig sim;
  sim.slots = 1234;
  sim.seed = 99;
  sim.alice.distance_km = 7.5;
  sim.hom_visibility = 0.9;
  const auto back = simulate_config_from_json(to_json(sim));
  CHECK(back.slots == 1234);
  CHECK(back.seed == 99);
  CHECK(back.alice.distance_km == 7.5);
  CHECK(back.hom_visibility == 0.9);
  CHECK(to_json(back) == to_json(sim));

  keyrate::SecurityParams sec;
  sec.widening = decoy::Widening::kRelativeEntropy;
  sec.f_ec = 1.2;
  CHECK(to_json(security_from_json(to_json(sec))) == to_json(sec));

  SweepRun sweep;
  sweep.distances = {0, 10, 20};
  sweep.sweep.mode = ProtocolMode::kMdi;
  CHECK(to_json(sweep_config_from_json(to_json(sweep))) == to_json(sweep));
}

TEST_CASE("link models follow the simulated topology") {
  SimulateConfig sim;
  sim.alice.distance_km = 3.0;
  sim.bob.distance_km = 9.0;
  const auto m = link_models(sim);
  REQUIRE(m.ab);
  REQUIRE(m.ac);
  REQUIRE(m.bc);
  CHECK(m.ab->kind == ProtocolMode::kMdi);
  CHECK(m.ac->yield(1) > m.bc->yield(1));
}

TEST_CASE("shipped presets parse") {
  const std::filesystem::path dir = MDIQDS_PRESET_DIR;
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const auto doc = load_json(entry.path());
    CHECK(doc.is_object());
    ++seen;
  }
  CHECK(seen >= 6);
}

}
