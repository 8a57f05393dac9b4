#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdiqds/channel.hpp"
#include "mdiqds/count_table.hpp"
#include "mdiqds/types.hpp"

/// Three-party network simulator: session scheduling, pulse-slot
/// simulation with Bell-state sifting and squashing, and the classical
/// message channel between parties.
namespace mdiqds::netsim {

enum class SessionType : std::uint8_t { kMdiAB, kQkdAC, kQkdBC };

std::string_view to_string(SessionType type);

struct SessionWeights {
  double mdi = 500.0;
  double ac = 1.0;
  double bc = 1.0;
};

/// One pulse slot. Index 0 is Alice, 1 is Bob. A party whose emission is
/// stopped for a QKD session is recorded as sending w in X.
struct Slot {
  SessionType session = SessionType::kMdiAB;
  std::array<Basis, 2> basis{Basis::kZ, Basis::kZ};
  std::array<IntensityLabel, 2> intensity{IntensityLabel::kS, IntensityLabel::kS};
};

struct SessionPlan {
  SessionWeights weights;
  IntensitySet intensities;
  std::vector<Slot> slots;
};

/// I.i.d. session draws with probabilities weights / sum; each active party
/// picks Z with intensities.z_basis_prob (then s) or X (then u, v or w
/// uniformly). Throws DomainError when all weights are zero or negative.
SessionPlan schedule(std::uint64_t slots, const SessionWeights& weights, const IntensitySet& intensities,
                     std::uint64_t seed);

struct LinkModels {
  std::optional<channel::YieldModel> ab;
  std::optional<channel::YieldModel> ac;
  std::optional<channel::YieldModel> bc;
};

/// Sifted Z-basis signal bits of one link, in detection order.
struct ZPool {
  std::vector<std::uint8_t> sender_bits;    // Alice (AB, AC) or Bob (BC)
  std::vector<std::uint8_t> receiver_bits;  // after the flip rule
  [[nodiscard]] std::size_t size() const { return sender_bits.size(); }
  [[nodiscard]] std::uint64_t error_count() const;
};

struct Diagnostics {
  std::uint64_t basis_mismatch = 0;      // MDI slots with different bases
  std::uint64_t cross_branch = 0;        // MDI coincidences across BS outputs
  std::uint64_t wrong_branch = 0;        // QKD detections in the other basis branch
  std::uint64_t squashed = 0;            // QKD double clicks mapped to a random bit
  std::uint64_t residual_clicks = 0;     // clicks caused by a stopped party's residual light
  std::array<std::uint64_t, 3> session_slots{0, 0, 0};
};

struct RunOutput {
  CountTable ab{Link::kAB};
  CountTable ac{Link::kAC};
  CountTable bc{Link::kBC};
  ZPool pool_ab;
  ZPool pool_ac;
  ZPool pool_bc;
  Diagnostics diagnostics;

  [[nodiscard]] const CountTable& table(Link link) const;
  [[nodiscard]] const ZPool& pool(Link link) const;
};

/// Simulates every slot of the plan. Throws InputError if the plan uses a
/// link that has no model.
RunOutput run_plan(const SessionPlan& plan, const LinkModels& models, std::uint64_t seed);

nlohmann::json to_json(const Diagnostics& diagnostics);

struct Message {
  std::uint64_t sequence = 0;
  std::string sender;
  std::string receiver;
  std::string topic;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Ordered, reliable, authenticated-by-assumption delivery between
/// registered parties. Every send is appended to a replay log.
class ClassicalChannel {
 public:
  void register_party(const std::string& name);
  [[nodiscard]] bool has_party(const std::string& name) const { return inboxes_.count(name) != 0; }

  void send(const std::string& sender, const std::string& receiver, std::string topic,
            std::vector<std::uint8_t> payload);
  /// Next message for `receiver` in send order, if any.
  std::optional<Message> receive(const std::string& receiver);
  [[nodiscard]] std::size_t pending(const std::string& receiver) const;

  [[nodiscard]] const std::vector<Message>& log() const { return log_; }

  /// A channel whose inboxes hold the logged messages again, for replaying
  /// a recorded run against fresh party state.
  static ClassicalChannel replay(const std::vector<std::string>& parties, const std::vector<Message>& log);

 private:
  std::deque<Message>& inbox(const std::string& name);

  std::map<std::string, std::deque<Message>> inboxes_;
  std::vector<Message> log_;
};

}  // namespace mdiqds::netsim
