#include "altopf/ac.hpp"

#include "altopf/lp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace altopf {

namespace {

/// Flows at both branch ends with partial derivatives in the order
/// (v_o, v_d, th_o, th_d).
struct FlowEval {
    double p_od = 0, q_od = 0, p_do = 0, q_do = 0;
    double dp_od[4] = {0, 0, 0, 0};
    double dq_od[4] = {0, 0, 0, 0};
    double dp_do[4] = {0, 0, 0, 0};
    double dq_do[4] = {0, 0, 0, 0};
};

FlowEval eval_branch(double g, double b, double v_o, double v_d, double th_o, double th_d,
                     bool pi_model) {
    const double dth = th_o - th_d;
    const double S = std::sin(dth);
    const double C = std::cos(dth);
    FlowEval f;
    if (!pi_model) {
        const double k = b * S + g * C;
        const double l = g * S - b * C;
        const double dk = b * C - g * S;
        const double dl = g * C + b * S;
        f.p_od = v_o * v_d * k;
        f.q_od = v_o * v_d * l;
        f.dp_od[0] = v_d * k;
        f.dp_od[1] = v_o * k;
        f.dp_od[2] = v_o * v_d * dk;
        f.dp_od[3] = -v_o * v_d * dk;
        f.dq_od[0] = v_d * l;
        f.dq_od[1] = v_o * l;
        f.dq_od[2] = v_o * v_d * dl;
        f.dq_od[3] = -v_o * v_d * dl;
        f.p_do = -f.p_od;
        f.q_do = -f.q_od;
        for (int i = 0; i < 4; ++i) {
            f.dp_do[i] = -f.dp_od[i];
            f.dq_do[i] = -f.dq_od[i];
        }
        return f;
    }
    // Standard pi-model with series admittance g - j*b (b stored positive
    // for an inductive line), no shunt elements:
    //   P_od = g v_o^2 - v_o v_d (g C - b S)
    //   Q_od = b v_o^2 - v_o v_d (g S + b C)
    const double A = g * C - b * S;
    const double dA = -g * S - b * C;
    const double B = g * S + b * C;
    const double dB = g * C - b * S;
    f.p_od = g * v_o * v_o - v_o * v_d * A;
    f.q_od = b * v_o * v_o - v_o * v_d * B;
    f.dp_od[0] = 2 * g * v_o - v_d * A;
    f.dp_od[1] = -v_o * A;
    f.dp_od[2] = -v_o * v_d * dA;
    f.dp_od[3] = v_o * v_d * dA;
    f.dq_od[0] = 2 * b * v_o - v_d * B;
    f.dq_od[1] = -v_o * B;
    f.dq_od[2] = -v_o * v_d * dB;
    f.dq_od[3] = v_o * v_d * dB;
    // Destination end: same expressions with roles swapped, dth negated.
    const double Ap = g * C + b * S;
    const double dAp = -g * S + b * C;
    const double Bp = -g * S + b * C;
    const double dBp = -g * C - b * S;
    f.p_do = g * v_d * v_d - v_o * v_d * Ap;
    f.q_do = b * v_d * v_d - v_o * v_d * Bp;
    f.dp_do[0] = -v_d * Ap;
    f.dp_do[1] = 2 * g * v_d - v_o * Ap;
    f.dp_do[2] = -v_o * v_d * dAp;
    f.dp_do[3] = v_o * v_d * dAp;
    f.dq_do[0] = -v_d * Bp;
    f.dq_do[1] = 2 * b * v_d - v_o * Bp;
    f.dq_do[2] = -v_o * v_d * dBp;
    f.dq_do[3] = v_o * v_d * dBp;
    return f;
}

void check_topology(const Network& net, const IntVector& topology) {
    if (topology.size() != net.n_branches()) {
        throw std::invalid_argument("topology has " + std::to_string(topology.size()) +
                                    " entries for " + std::to_string(net.n_branches()) +
                                    " branches");
    }
}

} // namespace

BranchFlow branch_flow_ac(double v_o, double v_d, double th_o, double th_d, double g,
                          double b) {
    const double dth = th_o - th_d;
    BranchFlow flow;
    flow.p = v_o * v_d * (b * std::sin(dth) + g * std::cos(dth));
    flow.q = v_o * v_d * (g * std::sin(dth) - b * std::cos(dth));
    return flow;
}

void refresh_flows(const Network& net, AcState& state, const IntVector& topology,
                   bool pi_model) {
    check_topology(net, topology);
    state.p_e = Vector::Zero(net.n_branches());
    state.q_e = Vector::Zero(net.n_branches());
    for (int e = 0; e < net.n_branches(); ++e) {
        if (topology[e] == 0) continue;
        const Branch& br = net.branches[e];
        int o = net.bus_index.at(br.origin);
        int d = net.bus_index.at(br.dest);
        FlowEval f = eval_branch(br.g, br.b, state.v[o], state.v[d], state.theta[o],
                                 state.theta[d], pi_model);
        state.p_e[e] = f.p_od;
        state.q_e[e] = f.q_od;
    }
}

std::pair<Vector, Vector> ac_residuals(const Network& net, const AcState& state,
                                       const IntVector& topology, bool pi_model) {
    check_topology(net, topology);
    if (state.v.size() != net.n_buses() || state.theta.size() != net.n_buses() ||
        state.p_g.size() != net.n_devices() || state.q_g.size() != net.n_devices()) {
        throw std::invalid_argument("ac_residuals: state dimensions disagree with network");
    }
    Vector dp = Vector::Zero(net.n_buses());
    Vector dq = Vector::Zero(net.n_buses());
    for (int i = 0; i < net.n_buses(); ++i) {
        for (int d : net.devices_at[i]) {
            dp[i] += state.p_g[d];
            dq[i] += state.q_g[d];
        }
    }
    for (int e = 0; e < net.n_branches(); ++e) {
        if (topology[e] == 0) continue;
        const Branch& br = net.branches[e];
        int o = net.bus_index.at(br.origin);
        int d = net.bus_index.at(br.dest);
        FlowEval f = eval_branch(br.g, br.b, state.v[o], state.v[d], state.theta[o],
                                 state.theta[d], pi_model);
        dp[o] -= f.p_od;
        dq[o] -= f.q_od;
        dp[d] -= f.p_do;
        dq[d] -= f.q_do;
    }
    return {dp, dq};
}

PowerFlowResult newton_power_flow(const Network& net, const IntVector& topology,
                                  const Vector& p_g, const Vector& q_g, int slack_bus_id,
                                  bool pi_model, int max_iter, double tol) {
    check_topology(net, topology);
    PowerFlowResult result;
    auto it = net.bus_index.find(slack_bus_id);
    if (it == net.bus_index.end()) {
        result.note = "unknown slack bus";
        return result;
    }
    const int slack = it->second;
    if (net.devices_at[slack].empty()) {
        result.note = "slack bus has no device to absorb the imbalance";
        return result;
    }

    // Buses outside the slack's energized component cannot be balanced.
    {
        ConnectivityResult conn = connectivity_check(net, topology);
        if (conn.island_count > 1) {
            std::vector<int> comp(net.n_buses(), -1);
            comp[slack] = 0;
            bool grew = true;
            while (grew) {
                grew = false;
                for (int e = 0; e < net.n_branches(); ++e) {
                    if (topology[e] == 0) continue;
                    int o = net.bus_index.at(net.branches[e].origin);
                    int d = net.bus_index.at(net.branches[e].dest);
                    if ((comp[o] == 0) != (comp[d] == 0)) {
                        comp[o] = comp[d] = 0;
                        grew = true;
                    }
                }
            }
            for (int i = 0; i < net.n_buses(); ++i) {
                if (comp[i] == 0) continue;
                for (int d : net.devices_at[i]) {
                    if (p_g[d] != 0.0 || q_g[d] != 0.0) {
                        result.note = "bus " + std::to_string(net.buses[i].id) +
                                      " is disconnected from the slack but injects power";
                        return result;
                    }
                }
            }
        }
    }

    const int n_b = net.n_buses();
    Vector v = Vector::Ones(n_b);
    Vector theta = Vector::Zero(n_b);

    // Unknown ordering: theta then v for every non-slack bus.
    std::vector<int> unknown_of_bus(n_b, -1);
    std::vector<int> bus_of_unknown;
    for (int i = 0; i < n_b; ++i) {
        if (i == slack) continue;
        unknown_of_bus[i] = static_cast<int>(bus_of_unknown.size());
        bus_of_unknown.push_back(i);
    }
    const int n_u = static_cast<int>(bus_of_unknown.size());

    AcState state;
    state.p_g = p_g;
    state.q_g = q_g;

    auto mismatch = [&](Vector& r) {
        state.v = v;
        state.theta = theta;
        auto [dp, dq] = ac_residuals(net, state, topology, pi_model);
        r.resize(2 * n_u);
        for (int k = 0; k < n_u; ++k) {
            r[k] = dp[bus_of_unknown[k]];
            r[n_u + k] = dq[bus_of_unknown[k]];
        }
        double worst = 0.0;
        for (int k = 0; k < 2 * n_u; ++k) worst = std::max(worst, std::abs(r[k]));
        return worst;
    };

    Vector r;
    double worst = mismatch(r);
    int iter = 0;
    for (; iter < max_iter && worst > tol; ++iter) {
        Matrix J = Matrix::Zero(2 * n_u, 2 * n_u);
        for (int e = 0; e < net.n_branches(); ++e) {
            if (topology[e] == 0) continue;
            const Branch& br = net.branches[e];
            int o = net.bus_index.at(br.origin);
            int d = net.bus_index.at(br.dest);
            FlowEval f = eval_branch(br.g, br.b, v[o], v[d], theta[o], theta[d], pi_model);
            int cols[4] = {
                o == slack ? -1 : n_u + unknown_of_bus[o], // v_o
                d == slack ? -1 : n_u + unknown_of_bus[d], // v_d
                o == slack ? -1 : unknown_of_bus[o],       // th_o
                d == slack ? -1 : unknown_of_bus[d],       // th_d
            };
            auto add = [&](int row_bus, const double* dp_row, const double* dq_row) {
                if (row_bus == slack) return;
                int rp = unknown_of_bus[row_bus];
                int rq = n_u + rp;
                for (int c = 0; c < 4; ++c) {
                    if (cols[c] < 0) continue;
                    J(rp, cols[c]) -= dp_row[c];
                    J(rq, cols[c]) -= dq_row[c];
                }
            };
            add(o, f.dp_od, f.dq_od);
            add(d, f.dp_do, f.dq_do);
        }

        Eigen::PartialPivLU<Matrix> lu(J);
        double min_pivot = n_u == 0 ? 1.0 : lu.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (n_u > 0 && (!std::isfinite(min_pivot) || min_pivot < 1e-12)) {
            result.note = "singular Jacobian";
            result.iterations = iter;
            result.max_mismatch = worst;
            result.state = state;
            return result;
        }
        Vector step = lu.solve(-r);
        if (!step.allFinite()) {
            result.note = "diverged (non-finite step)";
            result.iterations = iter;
            result.max_mismatch = worst;
            result.state = state;
            return result;
        }
        for (int k = 0; k < n_u; ++k) {
            theta[bus_of_unknown[k]] += step[k];
            v[bus_of_unknown[k]] += step[n_u + k];
            v[bus_of_unknown[k]] = std::max(v[bus_of_unknown[k]], 1e-4);
        }
        worst = mismatch(r);
        if (!std::isfinite(worst) || worst > 1e8) {
            result.note = "diverged";
            result.iterations = iter + 1;
            result.max_mismatch = worst;
            result.state = state;
            return result;
        }
    }

    result.iterations = iter;
    result.max_mismatch = worst;
    if (worst > tol) {
        result.note = "did not converge within the iteration limit";
        result.state = state;
        return result;
    }

    // Fold the slack imbalance into the first device at the slack bus.
    state.v = v;
    state.theta = theta;
    auto [dp, dq] = ac_residuals(net, state, topology, pi_model);
    int absorber = net.devices_at[slack].front();
    state.p_g[absorber] -= dp[slack];
    state.q_g[absorber] -= dq[slack];
    refresh_flows(net, state, topology, pi_model);
    result.state = state;
    result.converged = true;
    {
        auto [dp2, dq2] = ac_residuals(net, state, topology, pi_model);
        result.max_mismatch = std::max(dp2.cwiseAbs().maxCoeff(), dq2.cwiseAbs().maxCoeff());
    }
    return result;
}

std::string class_name(SolutionClass c) {
    switch (c) {
        case SolutionClass::Infeasible: return "infeasible";
        case SolutionClass::Overloaded: return "overloaded";
        case SolutionClass::Safe: return "safe";
        case SolutionClass::Optimal: return "optimal";
    }
    return "?";
}

namespace {

/// One SLP attempt from a given start. Variables are y = [theta; v; p_g; q_g];
/// each step solves an elastic trust-region LP built from first-order flow
/// models, with thermal slack variables priced at the penalty weight and
/// balance elastics priced far above it.
struct SlpProblem {
    const Network& net;
    const IntVector& topology;
    const IntVector& device_on;
    const RecoveryConfig& cfg;
    double penalty = 0.0;
    double elastic = 0.0;

    int n_b, n_d;
    std::vector<int> on_branches;
    int ref;

    Vector lo, up; // bounds on y

    SlpProblem(const Network& net_, const IntVector& topo_, const IntVector& on_,
               const RecoveryConfig& cfg_)
        : net(net_), topology(topo_), device_on(on_), cfg(cfg_) {
        n_b = net.n_buses();
        n_d = net.n_devices();
        for (int e = 0; e < net.n_branches(); ++e) {
            if (topology[e] == 1) on_branches.push_back(e);
        }
        ref = reference_bus_pos(net);
        double max_cost = 1.0;
        for (const Device& dev : net.devices) max_cost = std::max(max_cost, std::abs(dev.cost));
        penalty = cfg.penalty_weight > 0 ? cfg.penalty_weight : 1e4 * max_cost;
        elastic = 100.0 * penalty;

        const int n_y = 2 * n_b + 2 * n_d;
        lo = Vector::Constant(n_y, -kInf);
        up = Vector::Constant(n_y, kInf);
        lo[th(ref)] = up[th(ref)] = 0.0;
        for (int i = 0; i < n_b; ++i) {
            lo[vv(i)] = net.buses[i].v_min;
            up[vv(i)] = net.buses[i].v_max;
        }
        for (int d = 0; d < n_d; ++d) {
            if (device_on[d] == 1) {
                lo[pg(d)] = net.devices[d].p_min;
                up[pg(d)] = net.devices[d].p_max;
                lo[qg(d)] = net.devices[d].q_min;
                up[qg(d)] = net.devices[d].q_max;
            } else {
                lo[pg(d)] = up[pg(d)] = 0.0;
                lo[qg(d)] = up[qg(d)] = 0.0;
            }
        }
    }

    int th(int i) const { return i; }
    int vv(int i) const { return n_b + i; }
    int pg(int d) const { return 2 * n_b + d; }
    int qg(int d) const { return 2 * n_b + n_d + d; }
    int n_y() const { return 2 * n_b + 2 * n_d; }

    Vector clamp(Vector y) const {
        for (int j = 0; j < y.size(); ++j) y[j] = std::min(std::max(y[j], lo[j]), up[j]);
        return y;
    }

    /// Balance residuals (2 n_b) at y.
    Vector balance(const Vector& y) const {
        Vector h = Vector::Zero(2 * n_b);
        for (int i = 0; i < n_b; ++i) {
            for (int d : net.devices_at[i]) {
                h[i] += y[pg(d)];
                h[n_b + i] += y[qg(d)];
            }
        }
        for (int e : on_branches) {
            const Branch& br = net.branches[e];
            int o = net.bus_index.at(br.origin);
            int d = net.bus_index.at(br.dest);
            FlowEval f = eval_branch(br.g, br.b, y[vv(o)], y[vv(d)], y[th(o)], y[th(d)],
                                     cfg.pi_model);
            h[o] -= f.p_od;
            h[d] -= f.p_do;
            h[n_b + o] -= f.q_od;
            h[n_b + d] -= f.q_do;
        }
        return h;
    }

    double dispatch_cost(const Vector& y) const {
        double cost = 0.0;
        for (int d = 0; d < n_d; ++d) cost += net.devices[d].cost * y[pg(d)];
        return cost;
    }

    double thermal_violation_sum(const Vector& y) const {
        double sum = 0.0;
        for (int e : on_branches) {
            const Branch& br = net.branches[e];
            int o = net.bus_index.at(br.origin);
            int d = net.bus_index.at(br.dest);
            FlowEval f = eval_branch(br.g, br.b, y[vv(o)], y[vv(d)], y[th(o)], y[th(d)],
                                     cfg.pi_model);
            double viol = std::max(0.0, std::abs(f.p_od) - br.p_max);
            if (cfg.pi_model) viol = std::max(viol, std::abs(f.p_do) - br.p_max);
            sum += std::max(viol, 0.0);
        }
        return sum;
    }

    double merit(const Vector& y) const {
        return dispatch_cost(y) + penalty * thermal_violation_sum(y) +
               elastic * balance(y).cwiseAbs().sum();
    }

    /// Linearized elastic subproblem at y with trust radius r.
    LinearProgram build_lp(const Vector& y, double radius) const {
        LinearProgram lp;
        const int n = n_y();
        lp.n_vars = 0;
        lp.objective.resize(0);
        // Delta variables.
        for (int j = 0; j < n; ++j) {
            double dlo = std::max(lo[j] - y[j], -radius);
            double dup = std::min(up[j] - y[j], radius);
            if (dlo > dup) dlo = dup = 0.0; // y clamped, guard rounding
            lp.add_var(dlo, dup);
        }
        // Thermal slack per on-branch.
        std::vector<int> slack_var(net.n_branches(), -1);
        for (int e : on_branches) slack_var[e] = lp.add_var(0.0, kInf);
        // Elastics for the 2 n_b balance rows.
        std::vector<int> u_plus(2 * n_b), u_minus(2 * n_b);
        for (int k = 0; k < 2 * n_b; ++k) {
            u_plus[k] = lp.add_var(0.0, kInf);
            u_minus[k] = lp.add_var(0.0, kInf);
        }

        lp.objective = Vector::Zero(lp.n_vars);
        for (int d = 0; d < n_d; ++d) lp.objective[pg(d)] = net.devices[d].cost;
        for (int e : on_branches) lp.objective[slack_var[e]] = penalty;
        for (int k = 0; k < 2 * n_b; ++k) {
            lp.objective[u_plus[k]] = elastic;
            lp.objective[u_minus[k]] = elastic;
        }
        lp.objective_constant = dispatch_cost(y);

        // Balance rows: h(y) + J dy - u+ + u- = 0.
        Vector h = balance(y);
        std::vector<std::vector<int>> row_idx(2 * n_b);
        std::vector<std::vector<double>> row_coef(2 * n_b);
        for (int i = 0; i < n_b; ++i) {
            for (int d : net.devices_at[i]) {
                row_idx[i].push_back(pg(d));
                row_coef[i].push_back(1.0);
                row_idx[n_b + i].push_back(qg(d));
                row_coef[n_b + i].push_back(1.0);
            }
        }
        // Thermal rows are built alongside from the same flow evaluations.
        std::vector<LinearProgram::Row> thermal_rows;
        for (int e : on_branches) {
            const Branch& br = net.branches[e];
            int o = net.bus_index.at(br.origin);
            int d = net.bus_index.at(br.dest);
            FlowEval f = eval_branch(br.g, br.b, y[vv(o)], y[vv(d)], y[th(o)], y[th(d)],
                                     cfg.pi_model);
            const int cols[4] = {vv(o), vv(d), th(o), th(d)};
            auto push = [&](int row, const double* deriv) {
                for (int c = 0; c < 4; ++c) {
                    if (deriv[c] == 0.0) continue;
                    row_idx[row].push_back(cols[c]);
                    row_coef[row].push_back(-deriv[c]);
                }
            };
            push(o, f.dp_od);
            push(d, f.dp_do);
            push(n_b + o, f.dq_od);
            push(n_b + d, f.dq_do);

            auto thermal = [&](double value, const double* deriv) {
                // value + deriv . dy <= p_max + slack, and the mirror.
                LinearProgram::Row hi;
                for (int c = 0; c < 4; ++c) {
                    hi.idx.push_back(cols[c]);
                    hi.coef.push_back(deriv[c]);
                }
                hi.idx.push_back(slack_var[e]);
                hi.coef.push_back(-1.0);
                hi.lo = -kInf;
                hi.up = br.p_max - value;
                thermal_rows.push_back(hi);
                LinearProgram::Row lo_row;
                for (int c = 0; c < 4; ++c) {
                    lo_row.idx.push_back(cols[c]);
                    lo_row.coef.push_back(-deriv[c]);
                }
                lo_row.idx.push_back(slack_var[e]);
                lo_row.coef.push_back(-1.0);
                lo_row.lo = -kInf;
                lo_row.up = br.p_max + value;
                thermal_rows.push_back(lo_row);
            };
            thermal(f.p_od, f.dp_od);
            if (cfg.pi_model) thermal(f.p_do, f.dp_do);
        }
        for (int k = 0; k < 2 * n_b; ++k) {
            row_idx[k].push_back(u_plus[k]);
            row_coef[k].push_back(-1.0);
            row_idx[k].push_back(u_minus[k]);
            row_coef[k].push_back(1.0);
            lp.add_row(std::move(row_idx[k]), std::move(row_coef[k]), -h[k], -h[k]);
        }
        for (auto& row : thermal_rows) lp.rows.push_back(std::move(row));
        return lp;
    }
};

struct SlpOutcome {
    bool converged = false;
    Vector y;
    double merit = kInf;
    int iterations = 0;
};

SlpOutcome run_slp(const SlpProblem& prob, Vector y0, const RecoveryConfig& cfg) {
    SlpOutcome out;
    Vector y = prob.clamp(std::move(y0));
    double merit = prob.merit(y);
    double radius = 0.2;
    const double radius_min = 1e-10;
    LpConfig lp_cfg;
    lp_cfg.max_iters = 20000;

    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        LinearProgram lp = prob.build_lp(y, radius);
        LpSolution step = solve_lp(lp, lp_cfg);
        if (step.status != LpStatus::Optimal) break; // elastic LP should not fail

        double predicted = merit - step.objective;
        double feas = prob.balance(y).cwiseAbs().maxCoeff();
        if (predicted <= 1e-9 * (1.0 + std::abs(merit))) {
            // No useful first-order progress left.
            out.converged = feas <= cfg.feas_tol * 10;
            break;
        }

        Vector trial = prob.clamp(y + step.x.head(prob.n_y()));
        double trial_merit = prob.merit(trial);
        double actual = merit - trial_merit;
        double ratio = actual / predicted;
        bool at_edge = step.x.head(prob.n_y()).cwiseAbs().maxCoeff() > 0.999 * radius;
        if (ratio >= 0.1) {
            y = std::move(trial);
            merit = trial_merit;
            if (ratio >= 0.7 && at_edge) radius = std::min(radius * 2.0, 1.0);
        } else {
            radius *= 0.5;
            if (radius < radius_min) break;
        }
    }
    if (!out.converged) {
        double feas = prob.balance(y).cwiseAbs().maxCoeff();
        out.converged = feas <= cfg.feas_tol * 10;
    }
    out.y = std::move(y);
    out.merit = merit;
    out.iterations = iter;
    return out;
}

} // namespace

RecoveryResult solve_ac_recovery(const Network& net, const IntVector& topology,
                                 const IntVector& device_on, const OpfSolution& dc,
                                 const RecoveryConfig& cfg) {
    check_topology(net, topology);
    if (device_on.size() != net.n_devices()) {
        throw std::invalid_argument("solve_ac_recovery: device_on size mismatch");
    }
    SlpProblem prob(net, topology, device_on, cfg);

    auto start_flat = [&] {
        Vector y = Vector::Zero(prob.n_y());
        for (int i = 0; i < prob.n_b; ++i) y[prob.vv(i)] = 1.0;
        return prob.clamp(std::move(y));
    };
    auto start_warm = [&] {
        Vector y = Vector::Zero(prob.n_y());
        for (int i = 0; i < prob.n_b; ++i) {
            y[prob.vv(i)] = 1.0;
            y[prob.th(i)] = dc.theta.size() == net.n_buses() ? dc.theta[i] : 0.0;
        }
        for (int d = 0; d < prob.n_d; ++d) {
            y[prob.pg(d)] = dc.p_g.size() == net.n_devices() ? dc.p_g[d] : 0.0;
        }
        return prob.clamp(std::move(y));
    };

    SlpOutcome flat = run_slp(prob, start_flat(), cfg);
    SlpOutcome chosen;
    std::string start_used;
    if (flat.converged) {
        chosen = std::move(flat);
        start_used = "flat";
    } else {
        SlpOutcome warm = run_slp(prob, start_warm(), cfg);
        if (warm.converged || warm.merit < flat.merit) {
            chosen = std::move(warm);
            start_used = "dc-warm";
        } else {
            chosen = std::move(flat);
            start_used = "flat";
        }
    }

    RecoveryResult result;
    result.start_used = start_used;
    result.iterations = chosen.iterations;
    const Vector& y = chosen.y;

    AcState state;
    state.v.resize(net.n_buses());
    state.theta.resize(net.n_buses());
    state.p_g.resize(net.n_devices());
    state.q_g.resize(net.n_devices());
    for (int i = 0; i < net.n_buses(); ++i) {
        state.theta[i] = y[prob.th(i)];
        state.v[i] = y[prob.vv(i)];
    }
    for (int d = 0; d < net.n_devices(); ++d) {
        state.p_g[d] = y[prob.pg(d)];
        state.q_g[d] = y[prob.qg(d)];
    }
    refresh_flows(net, state, topology, cfg.pi_model);

    result.slacks = Vector::Zero(net.n_branches());
    for (int e = 0; e < net.n_branches(); ++e) {
        if (topology[e] == 0) continue;
        double viol = std::abs(state.p_e[e]) - net.branches[e].p_max;
        if (cfg.pi_model) {
            const Branch& br = net.branches[e];
            int o = net.bus_index.at(br.origin);
            int d = net.bus_index.at(br.dest);
            FlowEval f = eval_branch(br.g, br.b, state.v[o], state.v[d], state.theta[o],
                                     state.theta[d], true);
            viol = std::max(viol, std::abs(f.p_do) - br.p_max);
        }
        result.slacks[e] = std::max(viol, 0.0);
    }
    result.max_slack = result.slacks.size() > 0 ? result.slacks.maxCoeff() : 0.0;

    auto [dp, dq] = ac_residuals(net, state, topology, cfg.pi_model);
    double feas = std::max(dp.cwiseAbs().maxCoeff(), dq.cwiseAbs().maxCoeff());
    result.converged = chosen.converged && feas <= 1e-6;

    result.state = std::move(state);
    result.dispatch_cost = prob.dispatch_cost(y);
    result.objective = result.dispatch_cost + prob.penalty * result.slacks.sum();
    result.redispatch = dc.p_g.size() == net.n_devices()
                            ? Vector(result.state.p_g - dc.p_g)
                            : Vector::Zero(net.n_devices());
    if (!result.converged) {
        result.classification = SolutionClass::Infeasible;
    } else if (result.max_slack > cfg.tol_overload) {
        result.classification = SolutionClass::Overloaded;
    } else {
        result.classification = SolutionClass::Safe;
    }
    return result;
}

RecoveryResult solve_ac_recovery(const Network& net, const IntVector& topology,
                                 const OpfSolution& dc, const RecoveryConfig& cfg) {
    return solve_ac_recovery(net, topology, IntVector::Ones(net.n_devices()), dc, cfg);
}

SolutionClass classify_solution(const RecoveryResult& result, double best_known_cost,
                                double tol_overload) {
    if (!result.converged) return SolutionClass::Infeasible;
    if (result.max_slack > tol_overload) return SolutionClass::Overloaded;
    if (result.dispatch_cost <= best_known_cost + 1e-6) return SolutionClass::Optimal;
    return SolutionClass::Safe;
}

RedispatchStats redispatch_stats(const Network& net,
                                 const std::vector<OpfSolution>& dc_solutions,
                                 const std::vector<RecoveryResult>& recoveries) {
    if (dc_solutions.size() != recoveries.size()) {
        throw std::invalid_argument("redispatch_stats: input lists are not aligned");
    }
    RedispatchStats stats;
    stats.per_alternative_mean.resize(static_cast<int>(recoveries.size()));
    for (size_t a = 0; a < recoveries.size(); ++a) {
        const Vector delta = recoveries[a].state.p_g - dc_solutions[a].p_g;
        stats.per_alternative_mean[static_cast<int>(a)] =
            delta.size() > 0 ? delta.cwiseAbs().mean() : 0.0;
        for (int d = 0; d < delta.size(); ++d) {
            stats.per_device.push_back({net.devices[d].id, delta[d], static_cast<int>(a)});
        }
    }
    return stats;
}

} // namespace altopf
