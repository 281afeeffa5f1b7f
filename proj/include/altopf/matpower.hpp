#pragma once

#include "altopf/network.hpp"

#include <string>

namespace altopf {

/// Parses the MATPOWER case subset: mpc.baseMVA plus the bus, branch, gen
/// and gencost matrices. Quantities are normalized to per unit on baseMVA.
///
/// Conventions applied on ingest:
///  - series susceptance b = x / (r^2 + x^2), conductance g = r / (r^2 + x^2),
///    so b > 0 for an inductive line and flow b*(theta_o - theta_d) leaves
///    the origin bus;
///  - bus loads (Pd, Qd) become non-dispatchable devices with
///    p_min = p_max = -Pd / baseMVA and q fixed at -Qd / baseMVA;
///  - gencost must be polynomial (model 2) of degree <= 1; the slope is
///    scaled by baseMVA so objectives stay in source currency, the constant
///    term is dropped;
///  - RATE_A = 0 (unlimited in MATPOWER) maps to a 1e3 pu limit;
///  - taps and phase shifts are not modeled and are rejected.
Network parse_matpower_case(const std::string& text);

} // namespace altopf
