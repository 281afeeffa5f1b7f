#pragma once

#include "altopf/formulations.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace altopf {

enum class MgaCriterion { Hsj, HsjNegative, HsjZeroBias, RandomVector };

std::string criterion_name(MgaCriterion c);
MgaCriterion criterion_from_name(const std::string& name);

struct MgaConfig {
    MgaCriterion criterion = MgaCriterion::Hsj;
    double delta_f = 0.0; // tolerated objective increase over the base optimum
    int max_iter = 30;
    std::uint64_t seed = 0; // random-vector weights only
};

/// One accumulated objective update. Kept in factored form so the zero-bias
/// update evaluates exactly: at the all-ones vector the on and off fractions
/// are n_on/n_on and n_off/n_off and cancel to exactly zero.
struct MgaTerm {
    MgaCriterion criterion = MgaCriterion::Hsj;
    std::vector<int> on_idx;  // positions on in the source solution
    std::vector<int> off_idx; // positions off in the source solution
    int n_on = 0;
    int n_off = 0;

    double value_at(const IntVector& x) const;
    void add_coefficients(Vector& coeffs) const;
};

struct MgaState {
    Vector f_coeffs; // accumulated objective over the decision block
    std::vector<IntVector> history;
    int n_on = 0;  // at the latest solution
    int n_off = 0;
    std::vector<MgaTerm> terms;
    std::vector<std::string> notes; // e.g. empty zero-bias sums
};

/// Folds the latest binary solution into the search objective. Previous
/// contributions remain; only new coefficients are added.
MgaState next_objective(MgaState state, const IntVector& latest, MgaCriterion criterion);

/// Latin hypercube weights: n_samples vectors in [-1,1]^n_dims with exactly
/// one sample per dimension in each of the n_samples equal strata.
/// Deterministic for a given seed.
std::vector<Vector> lhs_weights(int n_dims, int n_samples, std::uint64_t seed);

struct Alternative {
    IntVector x;
    OpfSolution dispatch;
    double dc_objective = 0.0;
    int iteration = 0;
    MgaCriterion criterion = MgaCriterion::Hsj;
};

struct MgaRun {
    std::vector<Alternative> alternatives; // includes the base at iteration 0
    std::vector<int> skipped_iterations;   // subproblems that hit solver limits
    std::vector<std::string> notes;
    bool converged_early = false; // HSJ family: stopped on a repeated solution
    bool ok = true;
    std::string error;
};

/// Runs one MGA search over a solved DC model: adds the quality constraint
/// (original cost within delta_f of the base optimum), then re-solves under
/// the criterion's objective. HSJ variants iterate until a repeated binary
/// vector or max_iter; random vectors run max_iter independent solves and
/// drop repeats.
MgaRun run_mga(const DcModel& model, const MilpSolution& base, const MgaConfig& cfg,
               const MilpConfig& milp_cfg = {});

/// Random-vector search with explicit weight vectors (one solve per weight);
/// run_mga feeds it lhs_weights. Exposed so orderings can be studied.
MgaRun run_mga_random(const DcModel& model, const MilpSolution& base,
                      const std::vector<Vector>& weights, double delta_f,
                      const MilpConfig& milp_cfg = {});

} // namespace altopf
