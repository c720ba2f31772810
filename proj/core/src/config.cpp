#include "dpsk/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "dpsk/rng.hpp"

namespace dpsk {

namespace {

using Table = std::vector<std::pair<double, double>>;
using Value = std::variant<std::string, double, Table>;

[[noreturn]] void parse_error(const std::string& field, const std::string& what) {
  throw ConfigError(ConfigError::Kind::Parse, field, what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, const std::string& field) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    parse_error(field, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

Table parse_table_text(std::string_view text, const std::string& field) {
  Table table;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) parse_error(field, "expected e:f pairs");
    table.emplace_back(parse_number(item.substr(0, colon), field),
                       parse_number(item.substr(colon + 1), field));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return table;
}

using Entries = std::map<std::string, Value>;

void insert(Entries& entries, std::string key, Value value) {
  if (!entries.emplace(key, std::move(value)).second) parse_error(key, "duplicate key");
}

Entries read_text(std::string_view text) {
  Entries entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      parse_error("", "line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) parse_error("", "line " + std::to_string(line_no) + ": empty key");
    insert(entries, key, std::string(trim(line.substr(eq + 1))));
  }
  return entries;
}

Entries read_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_error("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_error("", "JSON configuration must be an object");
  Entries entries;
  for (const auto& [key, v] : doc.items()) {
    if (v.is_number()) {
      insert(entries, key, v.get<double>());
    } else if (v.is_string()) {
      insert(entries, key, v.get<std::string>());
    } else if (v.is_array()) {
      Table table;
      for (const auto& row : v) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
          parse_error(key, "expected [[e, f], ...]");
        }
        table.emplace_back(row[0].get<double>(), row[1].get<double>());
      }
      insert(entries, key, std::move(table));
    } else {
      parse_error(key, "unsupported value type");
    }
  }
  return entries;
}

double as_number(const Value& v, const std::string& field) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* s = std::get_if<std::string>(&v)) return parse_number(*s, field);
  parse_error(field, "expected a number");
}

std::string as_string(const Value& v, const std::string& field) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  parse_error(field, "expected a string");
}

Table as_table(const Value& v, const std::string& field) {
  if (const auto* t = std::get_if<Table>(&v)) return *t;
  if (const auto* s = std::get_if<std::string>(&v)) return parse_table_text(*s, field);
  parse_error(field, "expected a table");
}

// Numeric keys and where they live.
const std::map<std::string, double SystemParams::*>& system_fields() {
  static const std::map<std::string, double SystemParams::*> fields = {
      {"mu", &SystemParams::mu},
      {"clock", &SystemParams::clock},
      {"pulse_width", &SystemParams::pulse_width},
  };
  return fields;
}

const std::map<std::string, double ChannelParams::*>& channel_fields() {
  static const std::map<std::string, double ChannelParams::*> fields = {
      {"fiber_length", &ChannelParams::fiber_length},
      {"loss_coeff", &ChannelParams::loss_coeff},
      {"excess_loss", &ChannelParams::excess_loss},
  };
  return fields;
}

const std::map<std::string, double DetectorPreset::*>& detector_fields() {
  static const std::map<std::string, double DetectorPreset::*> fields = {
      {"eta", &DetectorPreset::eta},
      {"dark_rate_total", &DetectorPreset::dark_rate_total},
      {"dead_time", &DetectorPreset::dead_time},
      {"jitter_sigma", &DetectorPreset::jitter_sigma},
      {"jitter_tail_fraction", &DetectorPreset::jitter_tail_fraction},
      {"jitter_tail_tau", &DetectorPreset::jitter_tail_tau},
      {"gate_width", &DetectorPreset::gate_width},
      {"extinction_ratio_db", &DetectorPreset::extinction_ratio_db},
  };
  return fields;
}

SystemParams build(const Entries& entries) {
  SystemParams p;
  if (auto it = entries.find("preset"); it != entries.end()) {
    p.detector = find_preset(as_string(it->second, "preset"));
  }
  for (const auto& [key, value] : entries) {
    if (key == "preset") continue;
    if (auto f = system_fields().find(key); f != system_fields().end()) {
      p.*(f->second) = as_number(value, key);
    } else if (auto c = channel_fields().find(key); c != channel_fields().end()) {
      p.channel.*(c->second) = as_number(value, key);
    } else if (auto d = detector_fields().find(key); d != detector_fields().end()) {
      p.detector.*(d->second) = as_number(value, key);
    } else if (key == "ec_efficiency") {
      p.ec_efficiency.constant = as_number(value, key);
    } else if (key == "ec_table") {
      p.ec_efficiency.table = as_table(value, key);
    } else {
      parse_error(key, "unknown key");
    }
  }
  validate(p);
  return p;
}

std::string repr(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Entries read_any(std::string_view text) {
  const auto body = trim(text);
  if (!body.empty() && body.front() == '{') return read_json(body);
  return read_text(text);
}

}  // namespace

SystemParams load_config(std::string_view text) { return build(read_any(text)); }

SystemParams load_config(std::string_view text, std::span<const std::string> overrides) {
  auto entries = read_any(text);
  Entries extra;
  for (const auto& line : overrides) {
    for (auto& [key, value] : read_text(line)) insert(extra, key, std::move(value));
  }
  for (auto& [key, value] : extra) entries.insert_or_assign(key, std::move(value));
  return build(entries);
}

SystemParams load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config(buf.str());
}

std::string to_config_text(const SystemParams& p) {
  std::ostringstream out;
  for (const auto& [key, member] : system_fields()) out << key << " = " << repr(p.*member) << '\n';
  for (const auto& [key, member] : channel_fields()) {
    out << key << " = " << repr(p.channel.*member) << '\n';
  }
  for (const auto& [key, member] : detector_fields()) {
    out << key << " = " << repr(p.detector.*member) << '\n';
  }
  out << "ec_efficiency = " << repr(p.ec_efficiency.constant) << '\n';
  if (!p.ec_efficiency.table.empty()) {
    out << "ec_table = ";
    for (std::size_t i = 0; i < p.ec_efficiency.table.size(); ++i) {
      if (i) out << ',';
      out << repr(p.ec_efficiency.table[i].first) << ':'
          << repr(p.ec_efficiency.table[i].second);
    }
    out << '\n';
  }
  return out.str();
}

std::uint64_t config_hash(const SystemParams& p) { return fnv1a64(to_config_text(p)); }

}  // namespace dpsk
