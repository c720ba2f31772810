#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "dpsk/params.hpp"

namespace dpsk {

// Configuration documents come in two equivalent forms:
//
//   # flat key=value text, '#' starts a comment
//   preset = long-distance
//   fiber_length = 105
//   mu = 0.17
//
// or a JSON object with the same keys. Units are fixed (km, dB, Hz, s,
// dimensionless); values carry no unit suffix. `preset` seeds every
// detector field, later keys override individual fields regardless of
// their position in the document. `ec_table` is "e1:f1,e2:f2,..." in
// text form and [[e1,f1],[e2,f2],...] in JSON.
//
// Unknown keys, duplicate keys and unparsable values are ConfigError(Parse);
// invariant violations are ConfigError(Validation).
SystemParams load_config(std::string_view text);
/// `overrides` are "key=value" lines that replace the document's entries.
SystemParams load_config(std::string_view text, std::span<const std::string> overrides);
SystemParams load_config_file(const std::filesystem::path& path);

/// Canonical key=value text; load_config(to_config_text(p)) == p.
std::string to_config_text(const SystemParams& p);

/// FNV-1a 64 of the canonical text, for output provenance.
std::uint64_t config_hash(const SystemParams& p);

}  // namespace dpsk
