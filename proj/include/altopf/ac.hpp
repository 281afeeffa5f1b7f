#pragma once

#include "altopf/formulations.hpp"
#include "altopf/network.hpp"

#include <string>
#include <utility>
#include <vector>

namespace altopf {

/// Real and reactive flow on one branch:
///   p = v_o v_d (b sin(dth) + g cos(dth))
///   q = v_o v_d (g sin(dth) - b cos(dth)),  dth = th_o - th_d.
/// This lossless-balance form has no v^2 self term; the same value leaves
/// the origin and arrives at the destination. The standard two-sided
/// pi-model is available behind the pi_model flags below.
struct BranchFlow {
    double p = 0.0;
    double q = 0.0;
};

BranchFlow branch_flow_ac(double v_o, double v_d, double th_o, double th_d, double g,
                          double b);

/// Operating state of the AC network.
struct AcState {
    Vector v;     // per-bus voltage magnitude (pu)
    Vector theta; // per-bus angle (rad)
    Vector p_g, q_g; // per-device dispatch (pu)
    Vector p_e, q_e; // per-branch flow at the origin end (pu); zero when off
};

/// Per-bus real/reactive balance residuals of a state under a topology:
/// device injections minus departures plus arrivals over on-branches.
std::pair<Vector, Vector> ac_residuals(const Network& net, const AcState& state,
                                       const IntVector& topology, bool pi_model = false);

/// Fills p_e/q_e of a state from (v, theta) over on-branches.
void refresh_flows(const Network& net, AcState& state, const IntVector& topology,
                   bool pi_model = false);

struct PowerFlowResult {
    bool converged = false;
    AcState state;
    int iterations = 0;
    double max_mismatch = kInf;
    std::string note;
};

/// Newton-Raphson power flow from a flat start (v = 1, theta = 0) with all
/// device injections fixed except at the slack bus, which absorbs the
/// residual imbalance into its first device. Non-convergence and singular
/// Jacobians are reported in the result, not thrown.
PowerFlowResult newton_power_flow(const Network& net, const IntVector& topology,
                                  const Vector& p_g, const Vector& q_g, int slack_bus_id,
                                  bool pi_model = false, int max_iter = 50,
                                  double tol = 1e-8);

enum class SolutionClass { Infeasible, Overloaded, Safe, Optimal };

std::string class_name(SolutionClass c);

struct RecoveryConfig {
    double penalty_weight = 0.0; // 0 = automatic 1e4 * max |device cost|
    double tol_overload = 1e-4;  // pu slack separating Safe from Overloaded
    bool pi_model = false;       // standard two-sided pi-model instead of the default flows
    int max_iters = 400;
    double feas_tol = 1e-8; // balance residual target for convergence
};

struct RecoveryResult {
    AcState state;
    Vector slacks; // per-branch thermal violation, >= 0, zero when off
    bool converged = false;
    SolutionClass classification = SolutionClass::Infeasible;
    double objective = 0.0;      // dispatch cost plus penalty * slack sum
    double dispatch_cost = 0.0;  // cost . p_g alone
    Vector redispatch;           // p_g minus the DC dispatch
    double max_slack = 0.0;
    int iterations = 0;
    std::string start_used; // "flat" or "dc-warm"
};

/// AC recovery for a fixed topology (and device commitment): minimize
/// dispatch cost plus a large penalty on thermal slack, subject to AC flow
/// definitions, nodal balance, voltage bounds and full original device
/// ranges. Solved by sequential linear programming with a trust region and
/// an elastic feasibility phase; restarts from a DC warm start if the flat
/// start fails. `device_on` entries of zero pin that device to zero output.
RecoveryResult solve_ac_recovery(const Network& net, const IntVector& topology,
                                 const IntVector& device_on, const OpfSolution& dc,
                                 const RecoveryConfig& cfg = {});

/// All devices in service.
RecoveryResult solve_ac_recovery(const Network& net, const IntVector& topology,
                                 const OpfSolution& dc, const RecoveryConfig& cfg = {});

/// Classification rules: Infeasible when not converged; Overloaded when the
/// worst slack exceeds tol_overload; Safe otherwise; Optimal when Safe and
/// the dispatch cost matches the best known safe cost within 1e-6.
SolutionClass classify_solution(const RecoveryResult& result, double best_known_cost,
                                double tol_overload);

struct RedispatchStats {
    Vector per_alternative_mean; // mean |delta p_g| per alternative
    struct Entry {
        int device_id = 0;
        double delta = 0.0;
        int alternative = 0;
    };
    std::vector<Entry> per_device; // pooled signed re-dispatch values
};

/// Re-dispatch statistics across recovered alternatives; infeasible entries
/// contribute their best-attained point (the state stored in the result).
RedispatchStats redispatch_stats(const Network& net,
                                 const std::vector<OpfSolution>& dc_solutions,
                                 const std::vector<RecoveryResult>& recoveries);

} // namespace altopf
