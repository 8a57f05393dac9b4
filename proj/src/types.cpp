#include "mdiqds/types.hpp"

#include <string>

#include "mdiqds/error.hpp"

namespace mdiqds {

void CountRecord::validate() const {
  if (errors > detected || detected > sent) {
    throw InputError("count record violates errors <= detected <= sent (" + std::to_string(errors) + ", " +
                     std::to_string(detected) + ", " + std::to_string(sent) + ")");
  }
}

CountRecord& CountRecord::operator+=(const CountRecord& other) {
  sent += other.sent;
  detected += other.detected;
  errors += other.errors;
  return *this;
}

void IntensitySet::validate() const {
  if (!(s > u && u > v && v > w && w >= 0.0)) {
    throw DomainError("intensities must satisfy s > u > v > w >= 0");
  }
  if (!(z_basis_prob > 0.0 && z_basis_prob < 1.0)) throw DomainError("z_basis_prob must lie in (0,1)");
}

double IntensitySet::of(IntensityLabel label) const {
  switch (label) {
    case IntensityLabel::kS: return s;
    case IntensityLabel::kU: return u;
    case IntensityLabel::kV: return v;
    case IntensityLabel::kW: return w;
  }
  return 0.0;
}

std::string_view to_string(IntensityLabel label) {
  switch (label) {
    case IntensityLabel::kS: return "s";
    case IntensityLabel::kU: return "u";
    case IntensityLabel::kV: return "v";
    case IntensityLabel::kW: return "w";
  }
  return "?";
}

std::string_view to_string(Basis basis) { return basis == Basis::kZ ? "Z" : "X"; }

std::string_view to_string(Link link) {
  switch (link) {
    case Link::kAB: return "AB";
    case Link::kAC: return "AC";
    case Link::kBC: return "BC";
  }
  return "?";
}

std::string_view to_string(ProtocolMode mode) { return mode == ProtocolMode::kMdi ? "MDI" : "QKD"; }

IntensityLabel parse_intensity(std::string_view text) {
  if (text == "s") return IntensityLabel::kS;
  if (text == "u") return IntensityLabel::kU;
  if (text == "v") return IntensityLabel::kV;
  if (text == "w") return IntensityLabel::kW;
  throw InputError("unknown intensity label '" + std::string(text) + "'");
}

Basis parse_basis(std::string_view text) {
  if (text == "Z") return Basis::kZ;
  if (text == "X") return Basis::kX;
  throw InputError("unknown basis '" + std::string(text) + "'");
}

Link parse_link(std::string_view text) {
  if (text == "AB") return Link::kAB;
  if (text == "AC") return Link::kAC;
  if (text == "BC") return Link::kBC;
  throw InputError("unknown link '" + std::string(text) + "'");
}

ProtocolMode parse_mode(std::string_view text) {
  if (text == "MDI" || text == "mdi") return ProtocolMode::kMdi;
  if (text == "QKD" || text == "qkd") return ProtocolMode::kQkd;
  throw InputError("unknown mode '" + std::string(text) + "'");
}

}  // namespace mdiqds
