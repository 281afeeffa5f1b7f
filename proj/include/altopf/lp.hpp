#pragma once

#include "altopf/types.hpp"

#include <string>
#include <vector>

namespace altopf {

/// Canonical computational form:
///   min objective . x + objective_constant
///   s.t. row.lo <= a_r . x <= row.up   for every row
///        var_lo <= x <= var_up         (entries may be +-inf)
struct LinearProgram {
    int n_vars = 0;
    Vector objective;
    double objective_constant = 0.0;

    struct Row {
        std::vector<int> idx;
        std::vector<double> coef;
        double lo = -kInf;
        double up = kInf;
        std::string name;
    };
    std::vector<Row> rows;
    Vector var_lo, var_up;

    int add_var(double lo, double up);
    void add_row(std::vector<int> idx, std::vector<double> coef, double lo, double up,
                 std::string name = {});
    /// Throws std::invalid_argument on malformed indices or crossed bounds.
    void check_well_formed() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit, NumericalFailure };

struct LpConfig {
    double feas_tol = 1e-7; // reported violation contract
    double opt_tol = 1e-7;
    int max_iters = 50000;
};

struct LpSolution {
    LpStatus status = LpStatus::NumericalFailure;
    Vector x;
    double objective = 0.0;
    int iterations = 0;
    double max_violation = 0.0; // max row/bound violation at x
};

/// Bounded-variable primal simplex (dense, two-phase). Deterministic:
/// Dantzig pricing with lowest-index tie break, falling back to Bland's
/// rule after a degenerate stall, one clean restart before giving up.
LpSolution solve_lp(const LinearProgram& lp, const LpConfig& config = {});

/// Maximum row/bound violation of x (for reporting and tests).
double lp_violation(const LinearProgram& lp, const Vector& x);

/// Debug dump in LP text format for cross-checking against external solvers.
std::string write_lp_format(const LinearProgram& lp,
                            const std::vector<std::string>& var_names = {});

} // namespace altopf
