#pragma once

#include "altopf/ac.hpp"
#include "altopf/baseline.hpp"
#include "altopf/mga.hpp"

#include <optional>
#include <string>
#include <vector>

namespace altopf {

enum class PipelineProblem { Ots, Uc };

struct PipelineOptions {
    PipelineProblem problem = PipelineProblem::Ots;
    std::vector<MgaCriterion> criteria = {MgaCriterion::Hsj, MgaCriterion::HsjNegative,
                                          MgaCriterion::HsjZeroBias,
                                          MgaCriterion::RandomVector};
    double delta_f = 0.0;
    int max_iter = 30;
    std::uint64_t seed = 0;
    FormulationConfig formulation;
    RecoveryConfig recovery;
    MilpConfig milp;
    bool greedy_baseline = false;
    std::optional<IntVector> greedy_x0; // default: everything on
    double greedy_tol = 1.0;
};

/// One recovered solution inside the report.
struct AlternativeRecord {
    int iteration = 0;
    IntVector x;
    double dc_objective = 0.0;
    int connected_on = 0; // ones in x: on-branches (ots) or committed units (uc)
    bool converged = false;
    std::string classification; // after the optimal-cost upgrade
    double max_slack = 0.0;
    double objective = 0.0;
    double dispatch_cost = 0.0;
    double redispatch_mean = 0.0;
    std::string start_used;
    Vector v, theta, p_g, q_g, p_e, q_e, slacks, redispatch;
};

struct CriterionRecord {
    std::string criterion;
    std::vector<AlternativeRecord> alternatives; // base at iteration 0
    std::vector<int> skipped_iterations;
    std::vector<std::string> notes;
    bool converged_early = false;
    std::vector<int> n_on_trajectory; // connected count per iteration
};

struct OverlapRecord {
    std::vector<std::string> methods;
    std::vector<std::vector<int>> pairwise; // |feasible_i intersect feasible_j|
    int in_all = 0;
    int union_size = 0;
};

struct GreedyRecord {
    bool ran = false;
    std::string error;
    std::vector<GreedyStep> steps;
    int ac_evals = 0;
    int island_skips = 0;
    std::vector<int> per_iteration_evals;
    IntVector final_topology;
};

struct RedispatchEntry {
    std::string criterion;
    int iteration = 0;
    int device_id = 0;
    double delta = 0.0;
};

struct PipelineTimings {
    double parse_s = 0, build_s = 0, base_solve_s = 0, mga_s = 0, recovery_s = 0,
           greedy_s = 0, total_s = 0;
};

struct PipelineReport {
    std::string case_path;
    int n_buses = 0, n_branches = 0, n_devices = 0;
    std::string problem;
    std::string status; // "ok" or "base_infeasible"
    // Config echo with every default resolved.
    double delta_f = 0.0;
    int max_iter = 30;
    std::uint64_t seed = 0;
    std::vector<std::string> criteria_requested;
    double theta_bound = 0.0;
    bool theta_bound_per_bus = false;
    bool big_m_auto = true;
    double big_m_value = 0.0;
    bool anti_islanding = true;
    int horizon = 1;
    std::vector<double> load_scale;
    std::vector<std::pair<int, int>> pairwise_exclusions;
    std::optional<int> switch_budget;
    double tol_overload = 0.0;
    double penalty_weight = 0.0; // resolved value
    bool pi_model = false;
    std::vector<std::string> defaults_applied;

    AlternativeRecord base;
    std::vector<CriterionRecord> criteria;
    double best_known_cost = kInf;
    OverlapRecord overlap;
    Vector redispatch_per_alternative_mean;
    std::vector<RedispatchEntry> redispatch_entries;
    GreedyRecord greedy;
    int recovery_solves = 0;
    int recovery_solves_to_first_safe = -1; // -1 when no safe solution was found
    PipelineTimings timings;
};

/// End-to-end run: parse and validate the case, build and solve the DC
/// problem, search alternatives per criterion, recover each distinct
/// alternative in AC, classify, and aggregate the analyses. Deterministic
/// for fixed inputs and seed (timings aside).
PipelineReport run_pipeline(const std::string& case_path, const PipelineOptions& options);

/// Exact pairwise intersections between per-method feasible solution sets.
OverlapRecord overlap_analysis(const std::vector<std::string>& methods,
                               const std::vector<std::vector<IntVector>>& feasible_sets);

enum class ReportFormat { Json, CsvBundle };

/// Writes report.json or the CSV bundle (iterations.csv, overlap.csv,
/// redispatch.csv) under out_dir; returns the created paths.
std::vector<std::string> emit_report(const PipelineReport& report, ReportFormat format,
                                     const std::string& out_dir);

std::string report_to_json(const PipelineReport& report);
PipelineReport report_from_json(const std::string& text);

} // namespace altopf
