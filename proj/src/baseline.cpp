#include "altopf/baseline.hpp"

#include <chrono>

namespace altopf {

namespace {

OpfSolution neutral_reference(const Network& net) {
    OpfSolution ref;
    ref.p_g = Vector::Zero(net.n_devices());
    for (int d = 0; d < net.n_devices(); ++d) {
        const Device& dev = net.devices[d];
        ref.p_g[d] = std::min(std::max(0.0, dev.p_min), dev.p_max);
    }
    ref.theta = Vector::Zero(net.n_buses());
    ref.p_e = Vector::Zero(net.n_branches());
    return ref;
}

} // namespace

GreedyTrajectory greedy_switch_search(const Network& net, const IntVector& x0,
                                      const GreedyConfig& cfg) {
    if (x0.size() != net.n_branches()) {
        throw std::invalid_argument("greedy_switch_search: x0 size mismatch");
    }
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    OpfSolution ref = neutral_reference(net);

    GreedyTrajectory traj;
    RecoveryResult seed = solve_ac_recovery(net, x0, ref, cfg.recovery);
    if (seed.classification != SolutionClass::Safe) {
        throw std::runtime_error(
            "greedy_switch_search: starting topology is not AC-safe (" +
            class_name(seed.classification) + "); provide a feasible seed");
    }
    IntVector current = x0;
    double current_cost = seed.dispatch_cost;
    traj.steps.push_back({std::nullopt, current_cost, elapsed()});

    const int current_islands = connectivity_check(net, x0).island_count;

    while (true) {
        int evals = 0;
        int best_branch = -1; // position
        double best_cost = kInf;
        for (int e = 0; e < net.n_branches(); ++e) {
            IntVector candidate = current;
            candidate[e] = 1 - candidate[e];
            if (connectivity_check(net, candidate).island_count > current_islands) {
                ++traj.island_skips;
                continue;
            }
            ++evals;
            RecoveryResult rec = solve_ac_recovery(net, candidate, ref, cfg.recovery);
            if (rec.classification != SolutionClass::Safe) continue;
            if (rec.dispatch_cost < best_cost - 1e-12) {
                best_cost = rec.dispatch_cost;
                best_branch = e;
            }
        }
        traj.per_iteration_evals.push_back(evals);
        traj.ac_evals += evals;
        if (best_branch < 0 || best_cost > current_cost - cfg.tol) break;
        current[best_branch] = 1 - current[best_branch];
        current_cost = best_cost;
        traj.steps.push_back({net.branches[best_branch].id, current_cost, elapsed()});
    }
    traj.final_topology = current;
    return traj;
}

} // namespace altopf
