#pragma once

#include "altopf/network.hpp"

#include <string>
#include <vector>

namespace altopf {

/// Parses the native JSON schema: top-level keys base_mva, buses[],
/// branches[], devices[], field names exactly as in the domain types.
/// Optional fields receive defaults (bus voltage bounds 0.9/1.1 pu,
/// switchable=true, x0=1, device q range +-0.3*|p_max|, unlimited ramp,
/// commitable=false); each applied default is appended to
/// `defaults_applied` as "<json path>: <note>" when the pointer is given.
/// Schema violations throw ValidationError naming the JSON path.
Network parse_network_json(const std::string& text,
                           std::vector<std::string>* defaults_applied = nullptr);

/// Lossless serialization of a Network to the native schema; parsing the
/// result yields an identical Network. Unlimited ramps are emitted by
/// omitting the field.
std::string emit_network_json(const Network& net);

} // namespace altopf
