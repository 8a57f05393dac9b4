#include "mdiqds/netsim.hpp"

#include <algorithm>

#include "mdiqds/error.hpp"
#include "mdiqds/mathkit.hpp"
#include "mdiqds/rng.hpp"

namespace mdiqds::netsim {

namespace {

constexpr std::array<IntensityLabel, 3> kDecoyLabels{IntensityLabel::kU, IntensityLabel::kV, IntensityLabel::kW};
constexpr std::size_t kAlice = 0;
constexpr std::size_t kBob = 1;

// Inverse-CDF photon-number sampler for the four intensity classes.
class PhotonSampler {
 public:
  PhotonSampler(const IntensitySet& intensities, std::size_t n_cut) : n_cut_(n_cut) {
    for (auto label : {IntensityLabel::kS, IntensityLabel::kU, IntensityLabel::kV, IntensityLabel::kW}) {
      auto& cdf = cdf_[static_cast<std::size_t>(label)];
      double acc = 0.0;
      for (std::size_t n = 0; n <= n_cut; ++n) {
        acc += mathkit::poisson_pmf(intensities.of(label), n);
        cdf.push_back(acc);
      }
    }
  }

  std::size_t draw(IntensityLabel label, Rng& rng) const {
    const auto& cdf = cdf_[static_cast<std::size_t>(label)];
    const double u = uniform_unit(rng);
    for (std::size_t n = 0; n < cdf.size(); ++n) {
      if (u < cdf[n]) return n;
    }
    return n_cut_;
  }

 private:
  std::size_t n_cut_;
  std::array<std::vector<double>, 4> cdf_;
};

Slot draw_party(Slot slot, std::size_t party, const IntensitySet& intensities, Rng& rng) {
  if (bernoulli(rng, intensities.z_basis_prob)) {
    slot.basis[party] = Basis::kZ;
    slot.intensity[party] = IntensityLabel::kS;
  } else {
    slot.basis[party] = Basis::kX;
    slot.intensity[party] = kDecoyLabels[uniform_below(rng, kDecoyLabels.size())];
  }
  return slot;
}

Slot stopped(Slot slot, std::size_t party) {
  slot.basis[party] = Basis::kX;
  slot.intensity[party] = IntensityLabel::kW;
  return slot;
}

struct Simulator {
  const SessionPlan& plan;
  const LinkModels& models;
  RunOutput& out;
  Rng rng;
  PhotonSampler photons;

  void mdi_slot(const Slot& slot) {
    if (slot.basis[kAlice] != slot.basis[kBob]) {
      ++out.diagnostics.basis_mismatch;
      return;
    }
    const auto& model = *models.ab;
    const Basis basis = slot.basis[kAlice];
    const std::size_t n = photons.draw(slot.intensity[kAlice], rng);
    const std::size_t m = photons.draw(slot.intensity[kBob], rng);
    const std::uint8_t a = static_cast<std::uint8_t>(rng() & 1U);
    const std::uint8_t b = static_cast<std::uint8_t>(rng() & 1U);
    const double yield = model.yield(n, m);
    const double error = model.error_rate(basis, n, m);

    // psi+ anti-correlates in Z and correlates in X. The pattern
    // probabilities are chosen so that, averaged over the bits, the
    // accepted rate is the model yield and the error fraction its error.
    const bool matching_bits = basis == Basis::kZ ? a != b : a == b;
    const double accept = std::min(1.0, 2.0 * yield * (matching_bits ? 1.0 - error : error));
    const double draw = uniform_unit(rng);

    CountRecord record{1, 0, 0};
    if (draw < accept) {
      // Bob flips in Z, keeps his bit in X.
      const std::uint8_t bob = basis == Basis::kZ ? static_cast<std::uint8_t>(b ^ 1U) : b;
      record.detected = 1;
      record.errors = a != bob ? 1 : 0;
      if (basis == Basis::kZ) {
        out.pool_ab.sender_bits.push_back(a);
        out.pool_ab.receiver_bits.push_back(bob);
      }
    } else if (draw < accept + yield) {
      ++out.diagnostics.cross_branch;
    }
    out.ab.add({slot.intensity[kAlice], slot.intensity[kBob], basis}, record);
  }

  void qkd_slot(const Slot& slot, std::size_t sender) {
    const bool alice_sends = sender == kAlice;
    const auto& model = alice_sends ? *models.ac : *models.bc;
    const auto& residual_model = alice_sends ? models.bc : models.ac;
    CountTable& table = alice_sends ? out.ac : out.bc;
    ZPool& pool = alice_sends ? out.pool_ac : out.pool_bc;

    const Basis basis = slot.basis[sender];
    const IntensityLabel label = slot.intensity[sender];
    const std::size_t n = photons.draw(label, rng);
    const std::uint8_t bit = static_cast<std::uint8_t>(rng() & 1U);

    bool clicked = bernoulli(rng, model.yield(n));
    bool randomised = clicked && bernoulli(rng, std::min(1.0, 2.0 * model.error_rate(basis, n)));
    bool double_click = randomised && n >= 2 && bernoulli(rng, 0.5);

    // Light leaking from the stopped party lands on a random detector.
    const std::size_t stray = photons.draw(slot.intensity[1 - sender], rng);
    if (stray > 0 && residual_model) {
      const double excess = residual_model->yield(stray) - residual_model->yield(0);
      if (bernoulli(rng, std::max(0.0, excess))) {
        ++out.diagnostics.residual_clicks;
        double_click = double_click || clicked;
        clicked = true;
        randomised = true;
      }
    }

    CountRecord record{1, 0, 0};
    if (clicked) {
      // Passive basis choice at the receiver's beam splitter.
      const Basis branch = (rng() & 1U) ? Basis::kZ : Basis::kX;
      std::uint8_t received = bit;
      if (randomised) received = static_cast<std::uint8_t>(rng() & 1U);
      if (double_click) ++out.diagnostics.squashed;
      if (branch == basis) {
        record.detected = 1;
        record.errors = received != bit ? 1 : 0;
        if (basis == Basis::kZ) {
          pool.sender_bits.push_back(bit);
          pool.receiver_bits.push_back(received);
        }
      } else {
        ++out.diagnostics.wrong_branch;
      }
    }
    table.add({label, std::nullopt, basis}, record);
  }
};

}  // namespace

std::string_view to_string(SessionType type) {
  switch (type) {
    case SessionType::kMdiAB: return "MDI_AB";
    case SessionType::kQkdAC: return "QKD_AC";
    case SessionType::kQkdBC: return "QKD_BC";
  }
  return "?";
}

SessionPlan schedule(std::uint64_t slots, const SessionWeights& weights, const IntensitySet& intensities,
                     std::uint64_t seed) {
  intensities.validate();
  if (weights.mdi < 0.0 || weights.ac < 0.0 || weights.bc < 0.0) throw DomainError("session weights must be >= 0");
  const double total = weights.mdi + weights.ac + weights.bc;
  if (!(total > 0.0)) throw DomainError("session weights must not all be zero");

  SessionPlan plan{weights, intensities, {}};
  plan.slots.reserve(slots);
  Rng rng = make_rng(seed);
  const double p_mdi = weights.mdi / total;
  const double p_ac = weights.ac / total;
  for (std::uint64_t i = 0; i < slots; ++i) {
    const double u = uniform_unit(rng);
    Slot slot;
    if (u < p_mdi) {
      slot.session = SessionType::kMdiAB;
      slot = draw_party(slot, kAlice, intensities, rng);
      slot = draw_party(slot, kBob, intensities, rng);
    } else if (u < p_mdi + p_ac) {
      slot.session = SessionType::kQkdAC;
      slot = stopped(draw_party(slot, kAlice, intensities, rng), kBob);
    } else {
      slot.session = SessionType::kQkdBC;
      slot = stopped(draw_party(slot, kBob, intensities, rng), kAlice);
    }
    plan.slots.push_back(slot);
  }
  return plan;
}

std::uint64_t ZPool::error_count() const {
  std::uint64_t errors = 0;
  for (std::size_t i = 0; i < sender_bits.size(); ++i) errors += sender_bits[i] != receiver_bits[i] ? 1 : 0;
  return errors;
}

const CountTable& RunOutput::table(Link link) const {
  switch (link) {
    case Link::kAB: return ab;
    case Link::kAC: return ac;
    case Link::kBC: return bc;
  }
  return ab;
}

const ZPool& RunOutput::pool(Link link) const {
  switch (link) {
    case Link::kAB: return pool_ab;
    case Link::kAC: return pool_ac;
    case Link::kBC: return pool_bc;
  }
  return pool_ab;
}

RunOutput run_plan(const SessionPlan& plan, const LinkModels& models, std::uint64_t seed) {
  std::array<bool, 3> used{false, false, false};
  for (const auto& slot : plan.slots) used[static_cast<std::size_t>(slot.session)] = true;
  if (used[0] && !models.ab) throw InputError("plan has MDI_AB slots but no AB model");
  if (used[1] && !models.ac) throw InputError("plan has QKD_AC slots but no AC model");
  if (used[2] && !models.bc) throw InputError("plan has QKD_BC slots but no BC model");
  if (models.ab && models.ab->kind != ProtocolMode::kMdi) throw InputError("AB model must be an MDI model");
  if (models.ac && models.ac->kind != ProtocolMode::kQkd) throw InputError("AC model must be a QKD model");
  if (models.bc && models.bc->kind != ProtocolMode::kQkd) throw InputError("BC model must be a QKD model");

  std::size_t n_cut = channel::kDefaultPhotonCutoff;
  for (const auto* m : {&models.ab, &models.ac, &models.bc}) {
    if (*m) n_cut = std::min(n_cut, (*m)->n_cut);
  }

  RunOutput out;
  Simulator sim{plan, models, out, make_rng(seed), PhotonSampler(plan.intensities, n_cut)};
  for (const auto& slot : plan.slots) {
    ++out.diagnostics.session_slots[static_cast<std::size_t>(slot.session)];
    switch (slot.session) {
      case SessionType::kMdiAB: sim.mdi_slot(slot); break;
      case SessionType::kQkdAC: sim.qkd_slot(slot, kAlice); break;
      case SessionType::kQkdBC: sim.qkd_slot(slot, kBob); break;
    }
  }
  return out;
}

nlohmann::json to_json(const Diagnostics& d) {
  return {{"basis_mismatch", d.basis_mismatch},
          {"cross_branch", d.cross_branch},
          {"wrong_branch", d.wrong_branch},
          {"squashed", d.squashed},
          {"residual_clicks", d.residual_clicks},
          {"session_slots",
           {{"MDI_AB", d.session_slots[0]}, {"QKD_AC", d.session_slots[1]}, {"QKD_BC", d.session_slots[2]}}}};
}

void ClassicalChannel::register_party(const std::string& name) { inboxes_.try_emplace(name); }

std::deque<Message>& ClassicalChannel::inbox(const std::string& name) {
  auto it = inboxes_.find(name);
  if (it == inboxes_.end()) throw InputError("unknown party '" + name + "'");
  return it->second;
}

void ClassicalChannel::send(const std::string& sender, const std::string& receiver, std::string topic,
                            std::vector<std::uint8_t> payload) {
  if (!has_party(sender)) throw InputError("unknown party '" + sender + "'");
  auto& queue = inbox(receiver);
  Message message{log_.size(), sender, receiver, std::move(topic), std::move(payload)};
  log_.push_back(message);
  queue.push_back(std::move(message));
}

std::optional<Message> ClassicalChannel::receive(const std::string& receiver) {
  auto& queue = inbox(receiver);
  if (queue.empty()) return std::nullopt;
  Message message = std::move(queue.front());
  queue.pop_front();
  return message;
}

std::size_t ClassicalChannel::pending(const std::string& receiver) const {
  auto it = inboxes_.find(receiver);
  if (it == inboxes_.end()) throw InputError("unknown party '" + receiver + "'");
  return it->second.size();
}

ClassicalChannel ClassicalChannel::replay(const std::vector<std::string>& parties, const std::vector<Message>& log) {
  ClassicalChannel channel;
  for (const auto& p : parties) channel.register_party(p);
  for (const auto& m : log) channel.send(m.sender, m.receiver, m.topic, m.payload);
  return channel;
}

}  // namespace mdiqds::netsim
