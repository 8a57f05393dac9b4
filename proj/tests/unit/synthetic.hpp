#pragma once

#include <cmath>
#include <cstdint>

#include "mdiqds/channel.hpp"
#include "mdiqds/count_table.hpp"
#include "mdiqds/types.hpp"

namespace testkit {

using mdiqds::Basis;
using mdiqds::IntensityLabel;

inline constexpr IntensityLabel kDecoys[] = {IntensityLabel::kU, IntensityLabel::kV, IntensityLabel::kW};

// Counts set to their expectations: detected = round(gain * sent).
inline mdiqds::CountRecord exact_record(const mdiqds::channel::GainQber& g, std::uint64_t sent) {
  const auto detected = static_cast<std::uint64_t>(std::llround(g.gain * static_cast<double>(sent)));
  const auto errors = static_cast<std::uint64_t>(std::llround(g.qber * static_cast<double>(detected)));
  return {sent, detected, errors};
}

inline mdiqds::CountTable noiseless_qkd(const mdiqds::channel::YieldModel& model, const mdiqds::IntensitySet& in,
                                        std::uint64_t sent_each) {
  using mdiqds::channel::expected_gain_and_qber;
  mdiqds::CountTable t(mdiqds::Link::kAC);
  t.add({IntensityLabel::kS, std::nullopt, Basis::kZ},
        exact_record(expected_gain_and_qber(model, Basis::kZ, in.s), sent_each));
  for (auto label : kDecoys)
    t.add({label, std::nullopt, Basis::kX}, exact_record(expected_gain_and_qber(model, Basis::kX, in.of(label)), sent_each));
  return t;
}

inline mdiqds::CountTable noiseless_mdi(const mdiqds::channel::YieldModel& model, const mdiqds::IntensitySet& in,
                                        std::uint64_t sent_each) {
  using mdiqds::channel::expected_gain_and_qber;
  mdiqds::CountTable t(mdiqds::Link::kAB);
  t.add({IntensityLabel::kS, IntensityLabel::kS, Basis::kZ},
        exact_record(expected_gain_and_qber(model, Basis::kZ, in.s, in.s), sent_each));
  for (auto a : kDecoys)
    for (auto b : kDecoys)
      t.add({a, b, Basis::kX}, exact_record(expected_gain_and_qber(model, Basis::kX, in.of(a), in.of(b)), sent_each));
  return t;
}

// Same layout, counts drawn from the model.
inline mdiqds::CountTable sampled(const mdiqds::channel::YieldModel& model, const mdiqds::IntensitySet& in,
                                  std::uint64_t sent_each, std::uint64_t seed) {
  using mdiqds::channel::sample_counts;
  const bool mdi = model.kind == mdiqds::ProtocolMode::kMdi;
  mdiqds::CountTable t(mdi ? mdiqds::Link::kAB : mdiqds::Link::kAC);
  std::uint64_t stream = seed * 64;
  if (!mdi) {
    t.add({IntensityLabel::kS, std::nullopt, Basis::kZ},
          sample_counts(model, Basis::kZ, in.s, std::nullopt, sent_each, stream++));
    for (auto label : kDecoys)
      t.add({label, std::nullopt, Basis::kX},
            sample_counts(model, Basis::kX, in.of(label), std::nullopt, sent_each, stream++));
    return t;
  }
  t.add({IntensityLabel::kS, IntensityLabel::kS, Basis::kZ},
        sample_counts(model, Basis::kZ, in.s, in.s, sent_each, stream++));
  for (auto a : kDecoys)
    for (auto b : kDecoys)
      t.add({a, b, Basis::kX}, sample_counts(model, Basis::kX, in.of(a), in.of(b), sent_each, stream++));
  return t;
}

}  // namespace testkit
