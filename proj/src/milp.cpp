#include "altopf/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

namespace altopf {

void MilpModel::check_well_formed() const {
    lp.check_well_formed();
    for (int j : binary_vars) {
        if (j < 0 || j >= lp.n_vars) {
            throw std::invalid_argument("milp: binary index " + std::to_string(j) +
                                        " out of range");
        }
        if (lp.var_lo[j] < -1e-12 || lp.var_up[j] > 1.0 + 1e-12) {
            throw std::invalid_argument("milp: binary variable " + std::to_string(j) +
                                        " has bounds outside [0,1]");
        }
    }
}

namespace {

struct Node {
    double bound = -kInf;                      // parent LP objective
    std::int64_t id = 0;                       // FIFO tie break
    std::vector<std::pair<int, double>> fixes; // (var, value)
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound; // min-heap on bound
        return a.id > b.id;                               // then FIFO
    }
};

} // namespace

MilpSolution solve_milp(const MilpModel& model, const MilpConfig& config) {
    model.check_well_formed();
    const auto t_start = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        if (!std::isfinite(config.time_limit_s)) return false;
        auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start);
        return dt.count() > config.time_limit_s;
    };

    MilpSolution best;
    best.status = MilpStatus::Infeasible;
    double best_obj = kInf;

    LinearProgram work = model.lp;
    auto solve_with = [&](const std::vector<std::pair<int, double>>& fixes) {
        for (auto [j, v] : fixes) {
            work.var_lo[j] = v;
            work.var_up[j] = v;
        }
        LpSolution sol = solve_lp(work, config.lp);
        for (auto [j, v] : fixes) { // restore
            work.var_lo[j] = model.lp.var_lo[j];
            work.var_up[j] = model.lp.var_up[j];
        }
        return sol;
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    std::int64_t next_id = 0;
    open.push(Node{-kInf, next_id++, {}});
    std::int64_t nodes = 0;
    bool hit_limit = false;
    double root_bound = -kInf;

    while (!open.empty()) {
        if (nodes >= config.max_nodes || out_of_time()) {
            hit_limit = true;
            break;
        }
        Node node = open.top();
        open.pop();
        if (node.bound >= best_obj - 1e-9) continue; // cannot improve

        ++nodes;
        LpSolution relax = solve_with(node.fixes);
        if (relax.status == LpStatus::Infeasible) continue;
        if (relax.status == LpStatus::Unbounded) {
            MilpSolution sol;
            sol.status = MilpStatus::Unbounded;
            sol.node_count = nodes;
            return sol;
        }
        if (relax.status != LpStatus::Optimal) {
            MilpSolution sol;
            sol.status = MilpStatus::NumericalFailure;
            sol.node_count = nodes;
            return sol;
        }
        if (nodes == 1) root_bound = relax.objective;
        if (relax.objective >= best_obj - 1e-9) continue;

        // Most fractional binary, ties to the lowest index.
        int branch_var = -1;
        double worst_frac = config.int_tol;
        for (int j : model.binary_vars) {
            double frac = std::min(relax.x[j], 1.0 - relax.x[j]);
            frac = std::max(frac, 0.0);
            if (frac > worst_frac + 1e-15) {
                worst_frac = frac;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            // Integral within tolerance: polish with binaries pinned so the
            // continuous part is consistent with exact {0,1} values.
            std::vector<std::pair<int, double>> pinned = node.fixes;
            for (int j : model.binary_vars) {
                double v = relax.x[j] > 0.5 ? 1.0 : 0.0;
                pinned.emplace_back(j, v);
            }
            LpSolution polished =
                model.binary_vars.empty() ? relax : solve_with(pinned);
            if (polished.status == LpStatus::Optimal) {
                if (polished.objective < best_obj - 1e-9) {
                    best_obj = polished.objective;
                    best.status = MilpStatus::Optimal;
                    best.x = polished.x;
                    best.objective = polished.objective;
                    best.has_incumbent = true;
                }
                continue;
            }
            // Pinning failed (tolerance-edge case): force explicit branching
            // on the least integral binary not yet fixed.
            branch_var = -1;
            double least = -1.0;
            for (int j : model.binary_vars) {
                bool fixed = false;
                for (auto [k, v] : node.fixes) fixed = fixed || k == j;
                if (work.var_lo[j] == work.var_up[j]) fixed = true;
                if (fixed) continue;
                double frac = std::min(relax.x[j], 1.0 - relax.x[j]);
                if (frac > least) {
                    least = frac;
                    branch_var = j;
                }
            }
            if (branch_var < 0) continue; // everything fixed, nothing to do
        }

        Node up;
        up.bound = relax.objective;
        up.id = next_id++;
        up.fixes = node.fixes;
        up.fixes.emplace_back(branch_var, 1.0);
        Node down;
        down.bound = relax.objective;
        down.id = next_id++;
        down.fixes = node.fixes;
        down.fixes.emplace_back(branch_var, 0.0);
        open.push(std::move(up));
        open.push(std::move(down));
    }

    best.node_count = nodes;
    best.root_relaxation = root_bound;
    if (hit_limit) best.status = MilpStatus::IterLimit;
    return best;
}

} // namespace altopf
