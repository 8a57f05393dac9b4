#include "mdiqds/count_table.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "mdiqds/error.hpp"

namespace mdiqds {

std::string EntryKey::describe() const {
  std::string out(to_string(first));
  if (second) out += "," + std::string(to_string(*second));
  out += "/" + std::string(to_string(basis));
  return out;
}

void CountTable::check_key(const EntryKey& key) const {
  const bool mdi = mode() == ProtocolMode::kMdi;
  if (mdi != key.second.has_value()) {
    throw InputError("entry " + key.describe() + (mdi ? " needs an intensity pair on the MDI link"
                                                      : " must carry a single intensity on a QKD link"));
  }
  auto ok = [&](IntensityLabel label) {
    return key.basis == Basis::kZ ? label == IntensityLabel::kS : label != IntensityLabel::kS;
  };
  if (!ok(key.first) || (key.second && !ok(*key.second))) {
    throw InputError("entry " + key.describe() + ": Z basis carries only s, X basis only u, v, w");
  }
}

void CountTable::add(const EntryKey& key, const CountRecord& record) {
  check_key(key);
  record.validate();
  entries_[key] += record;
}

const CountRecord* CountTable::find(const EntryKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const CountRecord& CountTable::at(const EntryKey& key) const {
  if (const auto* record = find(key)) return *record;
  throw InputError("count table for link " + std::string(to_string(link_)) + " is missing entry " +
                   key.describe());
}

std::uint64_t CountTable::total_sent() const {
  std::uint64_t total = 0;
  for (const auto& [key, record] : entries_) total += record.sent;
  return total;
}

std::uint64_t CountTable::total_detected() const {
  std::uint64_t total = 0;
  for (const auto& [key, record] : entries_) total += record.detected;
  return total;
}

EntryKey CountTable::signal_key() const {
  EntryKey key{IntensityLabel::kS, std::nullopt, Basis::kZ};
  if (mode() == ProtocolMode::kMdi) key.second = IntensityLabel::kS;
  return key;
}

nlohmann::json to_json(const CountTable& table) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [key, record] : table.entries()) {
    nlohmann::json e;
    if (key.second) {
      e["intensity"] = {std::string(to_string(key.first)), std::string(to_string(*key.second))};
    } else {
      e["intensity"] = std::string(to_string(key.first));
    }
    e["basis"] = std::string(to_string(key.basis));
    e["sent"] = record.sent;
    e["detected"] = record.detected;
    e["errors"] = record.errors;
    entries.push_back(std::move(e));
  }
  return {{"link", std::string(to_string(table.link()))}, {"entries", std::move(entries)}};
}

CountTable count_table_from_json(const nlohmann::json& doc) {
  try {
    CountTable table(parse_link(doc.at("link").get<std::string>()));
    std::size_t index = 0;
    for (const auto& e : doc.at("entries")) {
      try {
        EntryKey key;
        const auto& intensity = e.at("intensity");
        if (intensity.is_array()) {
          if (intensity.size() != 2) throw InputError("intensity pair must have two labels");
          key.first = parse_intensity(intensity[0].get<std::string>());
          key.second = parse_intensity(intensity[1].get<std::string>());
        } else {
          key.first = parse_intensity(intensity.get<std::string>());
        }
        key.basis = parse_basis(e.at("basis").get<std::string>());
        table.add(key, CountRecord{e.at("sent").get<std::uint64_t>(), e.at("detected").get<std::uint64_t>(),
                                   e.at("errors").get<std::uint64_t>()});
      } catch (const std::exception& ex) {
        throw InputError("entries[" + std::to_string(index) + "]: " + ex.what());
      }
      ++index;
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed count table: ") + e.what());
  }
}

void write_csv(std::ostream& out, const CountTable& table) {
  out << "link,intensity_a,intensity_b,basis,sent,detected,errors\n";
  for (const auto& [key, record] : table.entries()) {
    out << to_string(table.link()) << ',' << to_string(key.first) << ','
        << (key.second ? to_string(*key.second) : std::string_view{}) << ',' << to_string(key.basis) << ','
        << record.sent << ',' << record.detected << ',' << record.errors << '\n';
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::uint64_t parse_count(const std::string& text, const char* column) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw InputError(std::string("column ") + column + " is not a non-negative integer: '" + text + "'");
  }
  return std::stoull(text);
}

}  // namespace

CountTable count_table_from_csv(std::istream& in) {
  std::string line;
  std::size_t line_number = 0;
  std::optional<CountTable> table;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_number == 1 && line.rfind("link,", 0) == 0) continue;
    try {
      const auto f = split_fields(line);
      if (f.size() != 7) throw InputError("expected 7 fields, found " + std::to_string(f.size()));
      const Link link = parse_link(f[0]);
      if (!table) table.emplace(link);
      if (table->link() != link) throw InputError("mixed links in one table");
      EntryKey key{parse_intensity(f[1]), std::nullopt, parse_basis(f[3])};
      if (!f[2].empty()) key.second = parse_intensity(f[2]);
      table->add(key, CountRecord{parse_count(f[4], "sent"), parse_count(f[5], "detected"),
                                  parse_count(f[6], "errors")});
    } catch (const std::exception& e) {
      throw InputError("count table CSV line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  if (!table) throw InputError("count table CSV has no data rows");
  return *table;
}

}  // namespace mdiqds
