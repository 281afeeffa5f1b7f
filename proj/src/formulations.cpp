#include "altopf/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace altopf {

namespace {

std::string suffixed(const std::string& base, int t, int horizon) {
    return horizon > 1 ? base + "@" + std::to_string(t) : base;
}

/// Adds the per-period dispatch/flow/angle variables and the nodal balance
/// and (for in-service branches) DC flow rows shared by all formulations.
struct PeriodBlock {
    std::vector<int> p_g, p_e, theta;
};

PeriodBlock add_period(DcModel& model, const Network& net, int t, int horizon,
                       double fixed_load_scale, bool flow_rows_for_onlines) {
    PeriodBlock block;
    LinearProgram& lp = model.milp.lp;
    auto& names = model.milp.var_names;

    for (const Device& dev : net.devices) {
        double lo = dev.p_min, up = dev.p_max;
        if (dev.p_min == dev.p_max) { // non-dispatchable, scaled per period
            lo *= fixed_load_scale;
            up *= fixed_load_scale;
        }
        int j = lp.add_var(lo, up);
        lp.objective[j] = dev.cost;
        names.push_back(suffixed("p_g[" + std::to_string(dev.id) + "]", t, horizon));
        block.p_g.push_back(j);
    }
    for (const Branch& br : net.branches) {
        int j = lp.add_var(-br.p_max, br.p_max);
        names.push_back(suffixed("p_e[" + std::to_string(br.id) + "]", t, horizon));
        block.p_e.push_back(j);
    }
    int ref = reference_bus_pos(net);
    for (int i = 0; i < net.n_buses(); ++i) {
        double lo = i == ref ? 0.0 : -kInf;
        double up = i == ref ? 0.0 : kInf;
        int j = lp.add_var(lo, up);
        names.push_back(suffixed("theta[" + std::to_string(net.buses[i].id) + "]", t, horizon));
        block.theta.push_back(j);
    }

    // Nodal balance: device injections minus branch departures plus arrivals.
    for (int i = 0; i < net.n_buses(); ++i) {
        std::vector<int> idx;
        std::vector<double> coef;
        for (int d : net.devices_at[i]) {
            idx.push_back(block.p_g[d]);
            coef.push_back(1.0);
        }
        for (int e : net.out_branches[i]) {
            idx.push_back(block.p_e[e]);
            coef.push_back(-1.0);
        }
        for (int e : net.in_branches[i]) {
            idx.push_back(block.p_e[e]);
            coef.push_back(1.0);
        }
        lp.add_row(std::move(idx), std::move(coef), 0.0, 0.0,
                   suffixed("balance[" + std::to_string(net.buses[i].id) + "]", t, horizon));
    }

    if (flow_rows_for_onlines) {
        for (int e = 0; e < net.n_branches(); ++e) {
            const Branch& br = net.branches[e];
            int o = net.bus_index.at(br.origin);
            int d = net.bus_index.at(br.dest);
            if (br.x0 == 1) {
                lp.add_row({block.p_e[e], block.theta[o], block.theta[d]},
                           {1.0, -br.b, br.b}, 0.0, 0.0,
                           suffixed("dcflow[" + std::to_string(br.id) + "]", t, horizon));
            } else {
                lp.var_lo[block.p_e[e]] = 0.0;
                lp.var_up[block.p_e[e]] = 0.0;
            }
        }
    }
    return block;
}

void append_block(DcModel& model, const PeriodBlock& block) {
    model.p_g_vars.insert(model.p_g_vars.end(), block.p_g.begin(), block.p_g.end());
    model.p_e_vars.insert(model.p_e_vars.end(), block.p_e.begin(), block.p_e.end());
    model.theta_vars.insert(model.theta_vars.end(), block.theta.begin(), block.theta.end());
}

} // namespace

DcModel build_dc_opf(const Network& net) {
    if (net.n_devices() == 0) {
        throw ValidationError("dc-opf: network has no devices");
    }
    DcModel model;
    model.kind = ProblemKind::DcOpf;
    model.net = &net;
    PeriodBlock block = add_period(model, net, 0, 1, 1.0, /*flow_rows_for_onlines=*/true);
    append_block(model, block);
    model.cost = model.milp.lp.objective;
    return model;
}

DcModel build_dc_ots(const Network& net, const FormulationConfig& cfg) {
    bool any_switchable = std::any_of(net.branches.begin(), net.branches.end(),
                                      [](const Branch& b) { return b.switchable; });
    if (!any_switchable) {
        throw ValidationError("dc-ots: network has no switchable branch");
    }
    if (cfg.big_m_auto && !(std::isfinite(cfg.theta_bound) && cfg.theta_bound > 0)) {
        throw ValidationError("dc-ots: automatic big-M needs a finite positive theta bound");
    }

    DcModel model;
    model.kind = ProblemKind::DcOts;
    model.net = &net;
    LinearProgram& lp = model.milp.lp;

    PeriodBlock block = add_period(model, net, 0, 1, 1.0, /*flow_rows_for_onlines=*/false);
    append_block(model, block);

    // Switch binaries for every branch; non-switchable ones are pinned at x0.
    std::vector<int> x_vars;
    for (const Branch& br : net.branches) {
        double lo = br.switchable ? 0.0 : static_cast<double>(br.x0);
        double up = br.switchable ? 1.0 : static_cast<double>(br.x0);
        int j = lp.add_var(lo, up);
        model.milp.var_names.push_back("x_e[" + std::to_string(br.id) + "]");
        model.milp.binary_vars.push_back(j);
        x_vars.push_back(j);
    }
    model.decision_vars = x_vars;

    for (int e = 0; e < net.n_branches(); ++e) {
        const Branch& br = net.branches[e];
        int o = net.bus_index.at(br.origin);
        int d = net.bus_index.at(br.dest);
        double big_m = cfg.big_m_auto
                           ? 1.01 * std::max(br.p_max, std::abs(br.b) * 2.0 * cfg.theta_bound)
                           : cfg.big_m_value;
        if (!(big_m > 0) || !std::isfinite(big_m)) {
            throw ValidationError("dc-ots: invalid big-M for branch " + std::to_string(br.id));
        }
        int pe = block.p_e[e];
        int th_o = block.theta[o];
        int th_d = block.theta[d];
        int xe = x_vars[e];
        std::string id = std::to_string(br.id);
        // p_e <= b*(theta_o - theta_d) + M*(1 - x_e), and the mirror below.
        lp.add_row({pe, th_o, th_d, xe}, {1.0, -br.b, br.b, big_m}, -kInf, big_m,
                   "bigm_hi[" + id + "]");
        lp.add_row({pe, th_o, th_d, xe}, {1.0, -br.b, br.b, -big_m}, -big_m, kInf,
                   "bigm_lo[" + id + "]");
        // |p_e| <= M * x_e forces zero flow on open branches.
        lp.add_row({pe, xe}, {1.0, -big_m}, -kInf, 0.0, "onoff_hi[" + id + "]");
        lp.add_row({pe, xe}, {1.0, big_m}, 0.0, kInf, "onoff_lo[" + id + "]");
        if (!cfg.theta_bound_per_bus) {
            lp.add_row({th_o, th_d}, {1.0, -1.0}, -cfg.theta_bound, cfg.theta_bound,
                       "angle[" + id + "]");
        }
    }
    if (cfg.theta_bound_per_bus) {
        int ref = reference_bus_pos(net);
        for (int i = 0; i < net.n_buses(); ++i) {
            if (i == ref) continue;
            lp.var_lo[block.theta[i]] = -cfg.theta_bound;
            lp.var_up[block.theta[i]] = cfg.theta_bound;
        }
    }

    if (cfg.anti_islanding) {
        for (int i = 0; i < net.n_buses(); ++i) {
            int need = std::min(2, net.degree(i));
            if (need == 0) continue;
            std::vector<int> idx;
            std::vector<double> coef;
            for (int e : net.out_branches[i]) {
                idx.push_back(x_vars[e]);
                coef.push_back(1.0);
            }
            for (int e : net.in_branches[i]) {
                idx.push_back(x_vars[e]);
                coef.push_back(1.0);
            }
            lp.add_row(std::move(idx), std::move(coef), static_cast<double>(need), kInf,
                       "degree[" + std::to_string(net.buses[i].id) + "]");
        }
    }

    if (cfg.switch_budget) {
        // sum(x_e - x0_e) <= n_s^max, as a bound relative to the seed state.
        double x0_sum = 0.0;
        std::vector<int> idx;
        std::vector<double> coef;
        for (int e = 0; e < net.n_branches(); ++e) {
            idx.push_back(x_vars[e]);
            coef.push_back(1.0);
            x0_sum += net.branches[e].x0;
        }
        lp.add_row(std::move(idx), std::move(coef), -kInf,
                   x0_sum + cfg.switch_budget->max_switches, "switch_budget");
    }

    for (auto [id_a, id_b] : cfg.pairwise_exclusions) {
        auto it_a = net.branch_index.find(id_a);
        auto it_b = net.branch_index.find(id_b);
        if (it_a == net.branch_index.end() || it_b == net.branch_index.end()) {
            std::ostringstream os;
            os << "dc-ots: pairwise exclusion references unknown branch (" << id_a << ", "
               << id_b << ")";
            throw ValidationError(os.str());
        }
        lp.add_row({x_vars[it_a->second], x_vars[it_b->second]}, {1.0, 1.0}, -kInf, 1.0,
                   "exclude[" + std::to_string(id_a) + "," + std::to_string(id_b) + "]");
    }

    model.cost = lp.objective;
    return model;
}

DcModel build_dc_uc(const Network& net, const FormulationConfig& cfg) {
    bool any_commitable = std::any_of(net.devices.begin(), net.devices.end(),
                                      [](const Device& d) { return d.commitable; });
    if (!any_commitable) {
        throw ValidationError("dc-uc: network has no commitable device");
    }
    if (cfg.horizon < 1) throw ValidationError("dc-uc: horizon must be >= 1");
    if (!cfg.load_scale.empty() &&
        static_cast<int>(cfg.load_scale.size()) != cfg.horizon) {
        throw ValidationError("dc-uc: load_scale must have one entry per period");
    }

    DcModel model;
    model.kind = ProblemKind::DcUc;
    model.net = &net;
    model.horizon = cfg.horizon;
    LinearProgram& lp = model.milp.lp;
    const int T = cfg.horizon;

    std::vector<PeriodBlock> blocks;
    for (int t = 0; t < T; ++t) {
        double scale = cfg.load_scale.empty() ? 1.0 : cfg.load_scale[t];
        blocks.push_back(add_period(model, net, t, T, scale, /*flow_rows_for_onlines=*/true));
        append_block(model, blocks.back());
    }

    // Commitment binaries: one per commitable device when T = 1, one per
    // device and period otherwise.
    std::vector<int> commitable;
    for (int d = 0; d < net.n_devices(); ++d) {
        if (net.devices[d].commitable) commitable.push_back(d);
    }
    const int n_sets = T > 1 ? T : 1;
    std::vector<std::vector<int>> x_g(n_sets, std::vector<int>(net.n_devices(), -1));
    for (int s = 0; s < n_sets; ++s) {
        for (int d : commitable) {
            int j = lp.add_var(0.0, 1.0);
            model.milp.var_names.push_back(
                suffixed("x_g[" + std::to_string(net.devices[d].id) + "]", s, n_sets));
            model.milp.binary_vars.push_back(j);
            model.decision_vars.push_back(j);
            x_g[s][d] = j;
        }
    }

    for (int t = 0; t < T; ++t) {
        const PeriodBlock& block = blocks[t];
        int s = T > 1 ? t : 0;
        for (int d : commitable) {
            const Device& dev = net.devices[d];
            int pj = block.p_g[d];
            int xj = x_g[s][d];
            // Relax the plain bounds; the commitment rows take over.
            lp.var_lo[pj] = std::min(0.0, dev.p_min);
            lp.var_up[pj] = std::max(0.0, dev.p_max);
            std::string id = std::to_string(dev.id);
            lp.add_row({pj, xj}, {1.0, -dev.p_max}, -kInf, 0.0,
                       suffixed("commit_hi[" + id + "]", t, T));
            lp.add_row({pj, xj}, {1.0, -dev.p_min}, 0.0, kInf,
                       suffixed("commit_lo[" + id + "]", t, T));
        }
        if (t > 0) {
            for (int d = 0; d < net.n_devices(); ++d) {
                const Device& dev = net.devices[d];
                if (!std::isfinite(dev.ramp)) continue;
                lp.add_row({block.p_g[d], blocks[t - 1].p_g[d]}, {1.0, -1.0}, -dev.ramp,
                           dev.ramp, "ramp[" + std::to_string(dev.id) + "]@" + std::to_string(t));
            }
        }
    }

    model.cost = lp.objective;
    return model;
}

OpfSolution extract_solution(const DcModel& model, const MilpSolution& sol) {
    if (sol.status != MilpStatus::Optimal && !sol.has_incumbent) {
        throw std::runtime_error("extract_solution: no solution attached");
    }
    const Network& net = *model.net;
    OpfSolution out;
    out.problem_kind = model.kind;
    out.objective = sol.objective;

    out.p_g.resize(net.n_devices());
    for (int d = 0; d < net.n_devices(); ++d) out.p_g[d] = sol.x[model.p_g_vars[d]];
    out.p_e.resize(net.n_branches());
    for (int e = 0; e < net.n_branches(); ++e) out.p_e[e] = sol.x[model.p_e_vars[e]];
    out.theta.resize(net.n_buses());
    for (int i = 0; i < net.n_buses(); ++i) out.theta[i] = sol.x[model.theta_vars[i]];
    out.x.resize(static_cast<int>(model.decision_vars.size()));
    for (size_t k = 0; k < model.decision_vars.size(); ++k) {
        out.x[static_cast<int>(k)] = sol.x[model.decision_vars[k]] > 0.5 ? 1 : 0;
    }

    // Solution invariants: nodal balance, thermal limits, open branches idle.
    for (int i = 0; i < net.n_buses(); ++i) {
        double residual = 0.0;
        for (int d : net.devices_at[i]) residual += out.p_g[d];
        for (int e : net.out_branches[i]) residual -= out.p_e[e];
        for (int e : net.in_branches[i]) residual += out.p_e[e];
        if (std::abs(residual) > 1e-6) {
            throw std::runtime_error("extract_solution: balance residual " +
                                     std::to_string(residual) + " at bus " +
                                     std::to_string(net.buses[i].id));
        }
    }
    IntVector on = topology_of(model, out);
    for (int e = 0; e < net.n_branches(); ++e) {
        double limit = on[e] == 1 ? net.branches[e].p_max + 1e-6 : 1e-6;
        if (std::abs(out.p_e[e]) > limit) {
            throw std::runtime_error("extract_solution: branch " +
                                     std::to_string(net.branches[e].id) +
                                     " flow violates its state");
        }
    }
    return out;
}

IntVector topology_of(const DcModel& model, const OpfSolution& sol) {
    const Network& net = *model.net;
    IntVector on(net.n_branches());
    if (model.kind == ProblemKind::DcOts) {
        for (int e = 0; e < net.n_branches(); ++e) on[e] = sol.x[e];
    } else {
        for (int e = 0; e < net.n_branches(); ++e) on[e] = net.branches[e].x0;
    }
    return on;
}

} // namespace altopf
