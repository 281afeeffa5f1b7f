#pragma once

#include "altopf/ac.hpp"

#include <optional>
#include <vector>

namespace altopf {

struct GreedyStep {
    std::optional<int> switched_branch; // branch id; empty for the seed entry
    double ac_cost = 0.0;
    double wall_time_s = 0.0;
};

struct GreedyTrajectory {
    std::vector<GreedyStep> steps; // seed first, then one entry per committed flip
    int ac_evals = 0;              // candidate recovery solves (seed excluded)
    int island_skips = 0;          // flips rejected by the union-find test
    std::vector<int> per_iteration_evals;
    IntVector final_topology;
};

struct GreedyConfig {
    double tol = 1.0; // minimum cost improvement to keep switching
    RecoveryConfig recovery;
};

/// Exhaustive single-switch descent: each iteration recovers every
/// single-branch flip of the current topology that does not create a new
/// island, commits the safe flip with the lowest cost if it improves by at
/// least tol (ties to the lowest branch id), and stops otherwise.
/// Throws std::runtime_error when x0 is not AC-safe.
GreedyTrajectory greedy_switch_search(const Network& net, const IntVector& x0,
                                      const GreedyConfig& cfg = {});

} // namespace altopf
