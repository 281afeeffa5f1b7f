#pragma once

#include "altopf/lp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace altopf {

/// Mixed-binary linear program: an LP plus the indices of variables
/// restricted to {0,1}. Binary variables must have bounds inside [0,1]
/// (fixed binaries carry lo == up).
struct MilpModel {
    LinearProgram lp;
    std::vector<int> binary_vars;
    std::vector<std::string> var_names;

    void check_well_formed() const;
};

enum class MilpStatus { Optimal, Infeasible, Unbounded, IterLimit, NumericalFailure };

struct MilpConfig {
    double int_tol = 1e-6;
    std::int64_t max_nodes = 200000;
    double time_limit_s = kInf;
    LpConfig lp;
};

struct MilpSolution {
    MilpStatus status = MilpStatus::NumericalFailure;
    Vector x;
    double objective = 0.0;
    std::int64_t node_count = 0;
    double root_relaxation = -kInf; // root LP bound, for duality spot checks
    bool has_incumbent = false;     // set when IterLimit still carries a solution
};

/// Deterministic best-first branch and bound. Branching picks the most
/// fractional binary (ties to the lowest index); the x_j = 1 child is
/// queued before the x_j = 0 child; node selection is best parent bound
/// with FIFO tie break. Incumbents are re-solved with binaries fixed to
/// their rounded values so returned binary entries are exact.
MilpSolution solve_milp(const MilpModel& model, const MilpConfig& config = {});

} // namespace altopf
