#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mdiqds {

/// Intensity classes: signal, two decoys and (near-)vacuum.
enum class IntensityLabel : std::uint8_t { kS, kU, kV, kW };
enum class Basis : std::uint8_t { kZ, kX };
/// AB is the MDI link through the relay; AC and BC are the QKD links.
enum class Link : std::uint8_t { kAB, kAC, kBC };
enum class ProtocolMode : std::uint8_t { kQkd, kMdi };

/// Tally of one (intensity, basis) configuration.
struct CountRecord {
  std::uint64_t sent = 0;
  std::uint64_t detected = 0;
  std::uint64_t errors = 0;

  /// Throws InputError unless errors <= detected <= sent.
  void validate() const;
  CountRecord& operator+=(const CountRecord& other);
  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

/// Mean photon numbers of the four classes and the Z-basis bias.
struct IntensitySet {
  double s = 0.4;
  double u = 0.2;
  double v = 0.05;
  double w = 0.0;
  double z_basis_prob = 0.8;

  /// Throws DomainError unless s > u > v > w >= 0 and z_basis_prob in (0,1).
  void validate() const;
  [[nodiscard]] double of(IntensityLabel label) const;
};

std::string_view to_string(IntensityLabel label);
std::string_view to_string(Basis basis);
std::string_view to_string(Link link);
std::string_view to_string(ProtocolMode mode);

IntensityLabel parse_intensity(std::string_view text);
Basis parse_basis(std::string_view text);
Link parse_link(std::string_view text);
ProtocolMode parse_mode(std::string_view text);

inline ProtocolMode mode_of(Link link) { return link == Link::kAB ? ProtocolMode::kMdi : ProtocolMode::kQkd; }

}  // namespace mdiqds
