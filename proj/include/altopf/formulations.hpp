#pragma once

#include "altopf/milp.hpp"
#include "altopf/network.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace altopf {

enum class ProblemKind { DcOpf, DcOts, DcUc };

struct SwitchBudget {
    int max_switches = 0; // n_s^max relative to the branch x0 positions
};

struct FormulationConfig {
    bool big_m_auto = true;  // per-branch M = 1.01 * max(p_max, |b| * 2 * theta_bound)
    double big_m_value = 0.0; // used when big_m_auto is false
    double theta_bound = 0.5236; // |theta_o - theta_d| limit per branch (radians)
    bool theta_bound_per_bus = false; // bound theta_i itself instead of differences
    std::optional<SwitchBudget> switch_budget;
    std::vector<std::pair<int, int>> pairwise_exclusions; // branch id pairs, at most one on
    int horizon = 1;                 // number of periods (unit commitment)
    std::vector<double> load_scale;  // per-period multiplier on fixed loads; empty = all 1
    bool anti_islanding = true;      // degree-2 heuristic rows (switching only)
};

/// A built DC problem: the mixed-binary model plus the index maps needed to
/// read solutions back in network terms. Variable vectors are period-major
/// (index t * n + k).
struct DcModel {
    MilpModel milp;
    ProblemKind kind = ProblemKind::DcOpf;
    int horizon = 1;
    const Network* net = nullptr;

    std::vector<int> p_g_vars;
    std::vector<int> p_e_vars;
    std::vector<int> theta_vars;
    /// Integer decision block: x_e per branch (switching; fixed branches
    /// carry collapsed bounds) or x_g per commitable device and period.
    std::vector<int> decision_vars;
    Vector cost; // objective coefficients, the source of quality constraints
};

/// Plain DC optimal power flow: dispatch, flows and angles, no binaries.
/// Branches with x0 = 0 are out of service (flow pinned to zero).
DcModel build_dc_opf(const Network& net);

/// DC optimal transmission switching: big-M switched flow constraints,
/// per-branch angle-difference bounds, optional anti-islanding rows,
/// switch budget and pairwise exclusions. Non-switchable branches keep
/// x fixed at x0.
DcModel build_dc_ots(const Network& net, const FormulationConfig& cfg);

/// DC unit commitment over cfg.horizon periods: per-period dispatch and
/// flows, commitment binaries scaling device bounds, ramp coupling between
/// consecutive periods for devices with finite ramp.
DcModel build_dc_uc(const Network& net, const FormulationConfig& cfg);

/// One DC solution in network terms. For multi-period models the dispatch
/// vectors hold the first period; x holds the full decision block.
struct OpfSolution {
    Vector p_g;
    Vector p_e;
    Vector theta;
    IntVector x;
    double objective = 0.0;
    ProblemKind problem_kind = ProblemKind::DcOpf;
};

/// Reads a solved model back into network terms and verifies the solution
/// invariants (nodal balance within 1e-6, thermal limits, zero flow on open
/// branches). Throws std::runtime_error when a check fails.
OpfSolution extract_solution(const DcModel& model, const MilpSolution& sol);

/// On-branch vector implied by a solution: OTS decisions for DcOts,
/// otherwise the x0 service states.
IntVector topology_of(const DcModel& model, const OpfSolution& sol);

} // namespace altopf
