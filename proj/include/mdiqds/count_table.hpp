#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "mdiqds/types.hpp"

namespace mdiqds {

/// Identifies one entry: the sender intensity (two for the MDI link) and
/// the preparation basis.
struct EntryKey {
  IntensityLabel first = IntensityLabel::kS;
  std::optional<IntensityLabel> second;
  Basis basis = Basis::kZ;

  auto operator<=>(const EntryKey&) const = default;
  [[nodiscard]] std::string describe() const;
};

/// Per-link detection tallies; the interchange format between simulation
/// and analysis. Only the signal class is recorded in Z and only decoy
/// classes in X; `add` rejects anything else.
class CountTable {
 public:
  explicit CountTable(Link link) : link_(link) {}

  [[nodiscard]] Link link() const { return link_; }
  [[nodiscard]] ProtocolMode mode() const { return mode_of(link_); }

  /// Accumulates `record` into the entry for `key`.
  void add(const EntryKey& key, const CountRecord& record);
  [[nodiscard]] const CountRecord* find(const EntryKey& key) const;
  /// Throws InputError naming the entry when it is absent.
  [[nodiscard]] const CountRecord& at(const EntryKey& key) const;
  [[nodiscard]] const std::map<EntryKey, CountRecord>& entries() const { return entries_; }
  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] std::uint64_t total_sent() const;
  [[nodiscard]] std::uint64_t total_detected() const;

  /// Key of the Z-basis signal entry for this link.
  [[nodiscard]] EntryKey signal_key() const;

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  void check_key(const EntryKey& key) const;

  Link link_;
  std::map<EntryKey, CountRecord> entries_;
};

nlohmann::json to_json(const CountTable& table);
CountTable count_table_from_json(const nlohmann::json& doc);

/// Flat CSV: link,intensity_a,intensity_b,basis,sent,detected,errors.
/// intensity_b is empty on QKD links.
void write_csv(std::ostream& out, const CountTable& table);
/// Parses the CSV form. All rows must name the same link. Errors carry the
/// 1-based line number of the offending row.
CountTable count_table_from_csv(std::istream& in);

}  // namespace mdiqds
