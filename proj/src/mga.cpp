#include "altopf/mga.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace altopf {

std::string criterion_name(MgaCriterion c) {
    switch (c) {
        case MgaCriterion::Hsj: return "hsj";
        case MgaCriterion::HsjNegative: return "hsj-neg";
        case MgaCriterion::HsjZeroBias: return "hsj0";
        case MgaCriterion::RandomVector: return "random";
    }
    return "?";
}

MgaCriterion criterion_from_name(const std::string& name) {
    if (name == "hsj") return MgaCriterion::Hsj;
    if (name == "hsj-neg") return MgaCriterion::HsjNegative;
    if (name == "hsj0") return MgaCriterion::HsjZeroBias;
    if (name == "random") return MgaCriterion::RandomVector;
    throw std::invalid_argument("unknown MGA criterion '" + name + "'");
}

double MgaTerm::value_at(const IntVector& x) const {
    // Integer sums first, one division each: the zero-bias value at the
    // all-ones vector is n_on/n_on - n_off/n_off == 0 exactly.
    switch (criterion) {
        case MgaCriterion::Hsj: {
            long on = 0;
            for (int j : on_idx) on += x[j];
            return static_cast<double>(on);
        }
        case MgaCriterion::HsjNegative: {
            long off = 0;
            for (int j : off_idx) off += x[j];
            return -static_cast<double>(off);
        }
        case MgaCriterion::HsjZeroBias: {
            double value = 0.0;
            if (n_on > 0) {
                long on = 0;
                for (int j : on_idx) on += x[j];
                value += static_cast<double>(on) / static_cast<double>(n_on);
            }
            if (n_off > 0) {
                long off = 0;
                for (int j : off_idx) off += x[j];
                value -= static_cast<double>(off) / static_cast<double>(n_off);
            }
            return value;
        }
        case MgaCriterion::RandomVector: break;
    }
    return 0.0;
}

void MgaTerm::add_coefficients(Vector& coeffs) const {
    switch (criterion) {
        case MgaCriterion::Hsj:
            for (int j : on_idx) coeffs[j] += 1.0;
            break;
        case MgaCriterion::HsjNegative:
            for (int j : off_idx) coeffs[j] -= 1.0;
            break;
        case MgaCriterion::HsjZeroBias:
            if (n_on > 0) {
                for (int j : on_idx) coeffs[j] += 1.0 / static_cast<double>(n_on);
            }
            if (n_off > 0) {
                for (int j : off_idx) coeffs[j] -= 1.0 / static_cast<double>(n_off);
            }
            break;
        case MgaCriterion::RandomVector: break;
    }
}

MgaState next_objective(MgaState state, const IntVector& latest, MgaCriterion criterion) {
    const int n = static_cast<int>(latest.size());
    for (int j = 0; j < n; ++j) {
        if (latest[j] != 0 && latest[j] != 1) {
            throw std::invalid_argument("next_objective: latest is not a 0/1 vector");
        }
    }
    if (state.f_coeffs.size() == 0) state.f_coeffs = Vector::Zero(n);
    if (state.f_coeffs.size() != n) {
        throw std::invalid_argument("next_objective: dimension changed between updates");
    }

    MgaTerm term;
    term.criterion = criterion;
    for (int j = 0; j < n; ++j) {
        if (latest[j] == 1) term.on_idx.push_back(j);
        else term.off_idx.push_back(j);
    }
    term.n_on = static_cast<int>(term.on_idx.size());
    term.n_off = static_cast<int>(term.off_idx.size());
    if (criterion == MgaCriterion::HsjZeroBias) {
        if (term.n_on == 0) state.notes.push_back("zero-bias update: no on elements, on-sum empty");
        if (term.n_off == 0) state.notes.push_back("zero-bias update: no off elements, off-sum empty");
    }
    term.add_coefficients(state.f_coeffs);
    state.n_on = term.n_on;
    state.n_off = term.n_off;
    state.history.push_back(latest);
    state.terms.push_back(std::move(term));
    return state;
}

std::vector<Vector> lhs_weights(int n_dims, int n_samples, std::uint64_t seed) {
    if (n_dims < 1 || n_samples < 1) {
        throw std::invalid_argument("lhs_weights: n_dims and n_samples must be >= 1");
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    // Explicit generators keep output identical across standard libraries.
    auto next_unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto next_below = [&rng](int bound) {
        // Rejection sampling for an unbiased integer in [0, bound).
        std::uint64_t span = static_cast<std::uint64_t>(bound);
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t draw;
        do {
            draw = rng();
        } while (draw >= limit);
        return static_cast<int>(draw % span);
    };

    std::vector<Vector> samples(n_samples, Vector::Zero(n_dims));
    std::vector<int> perm(n_samples);
    const double margin = 0x1.0p-20; // keep values strictly inside their stratum
    for (int d = 0; d < n_dims; ++d) {
        for (int k = 0; k < n_samples; ++k) perm[k] = k;
        for (int k = n_samples - 1; k > 0; --k) {
            std::swap(perm[k], perm[next_below(k + 1)]);
        }
        for (int s = 0; s < n_samples; ++s) {
            double u = margin + next_unit() * (1.0 - 2.0 * margin);
            samples[s][d] = -1.0 + 2.0 * (perm[s] + u) / n_samples;
        }
    }
    return samples;
}

namespace {

IntVector decision_values(const DcModel& model, const Vector& x) {
    IntVector out(static_cast<int>(model.decision_vars.size()));
    for (size_t k = 0; k < model.decision_vars.size(); ++k) {
        out[static_cast<int>(k)] = x[model.decision_vars[k]] > 0.5 ? 1 : 0;
    }
    return out;
}

bool seen_before(const std::vector<IntVector>& history, const IntVector& x) {
    return std::any_of(history.begin(), history.end(),
                       [&](const IntVector& h) { return h == x; });
}

/// The shared subproblem: original constraints plus the quality row
/// cost . v <= f* + delta_f; the objective is swapped per iteration.
MilpModel make_quality_model(const DcModel& model, double base_objective, double delta_f) {
    MilpModel mga = model.milp;
    std::vector<int> idx;
    std::vector<double> coef;
    for (int j = 0; j < model.milp.lp.n_vars; ++j) {
        if (model.cost[j] != 0.0) {
            idx.push_back(j);
            coef.push_back(model.cost[j]);
        }
    }
    double rhs = base_objective - model.milp.lp.objective_constant + delta_f;
    mga.lp.add_row(std::move(idx), std::move(coef), -kInf, rhs, "quality");
    return mga;
}

Alternative make_alternative(const DcModel& model, const MilpSolution& sol, int iteration,
                             MgaCriterion criterion, double quality_cap) {
    Alternative alt;
    alt.x = decision_values(model, sol.x);
    alt.iteration = iteration;
    alt.criterion = criterion;
    alt.dc_objective = model.cost.dot(sol.x) + model.milp.lp.objective_constant;
    // The subproblem objective is the search function; report the original
    // cost, and keep the dispatch consistent with it.
    MilpSolution reshaped = sol;
    reshaped.objective = alt.dc_objective;
    alt.dispatch = extract_solution(model, reshaped);
    if (alt.dc_objective > quality_cap + 1e-6) {
        throw std::runtime_error("mga: alternative violates the quality constraint");
    }
    return alt;
}

} // namespace

MgaRun run_mga_random(const DcModel& model, const MilpSolution& base,
                      const std::vector<Vector>& weights, double delta_f,
                      const MilpConfig& milp_cfg) {
    MgaRun run;
    if (base.status != MilpStatus::Optimal) {
        run.ok = false;
        run.error = "base solution is not optimal";
        return run;
    }
    const double f_star = base.objective;
    MilpModel mga = make_quality_model(model, f_star, delta_f);

    MilpSolution base_reshaped = base;
    base_reshaped.objective = model.cost.dot(base.x) + model.milp.lp.objective_constant;
    Alternative base_alt;
    base_alt.x = decision_values(model, base.x);
    base_alt.iteration = 0;
    base_alt.criterion = MgaCriterion::RandomVector;
    base_alt.dc_objective = base_reshaped.objective;
    base_alt.dispatch = extract_solution(model, base_reshaped);
    run.alternatives.push_back(base_alt);
    std::vector<IntVector> seen{base_alt.x};

    for (size_t w = 0; w < weights.size(); ++w) {
        if (weights[w].size() != static_cast<int>(model.decision_vars.size())) {
            run.ok = false;
            run.error = "weight vector dimension mismatch";
            return run;
        }
        mga.lp.objective = Vector::Zero(mga.lp.n_vars);
        for (size_t k = 0; k < model.decision_vars.size(); ++k) {
            mga.lp.objective[model.decision_vars[k]] = weights[w][static_cast<int>(k)];
        }
        MilpSolution sol = solve_milp(mga, milp_cfg);
        int iteration = static_cast<int>(w) + 1;
        if (sol.status == MilpStatus::IterLimit) {
            run.skipped_iterations.push_back(iteration);
            continue;
        }
        if (sol.status != MilpStatus::Optimal) {
            run.ok = false;
            run.error = "mga subproblem unexpectedly " +
                        std::string(sol.status == MilpStatus::Infeasible ? "infeasible"
                                                                         : "failed");
            return run;
        }
        IntVector x = decision_values(model, sol.x);
        if (seen_before(seen, x)) continue; // repeated solutions are dropped
        seen.push_back(x);
        run.alternatives.push_back(
            make_alternative(model, sol, iteration, MgaCriterion::RandomVector,
                             f_star + delta_f));
    }
    return run;
}

MgaRun run_mga(const DcModel& model, const MilpSolution& base, const MgaConfig& cfg,
               const MilpConfig& milp_cfg) {
    if (cfg.delta_f < 0) throw std::invalid_argument("mga: delta_f must be >= 0");
    if (cfg.max_iter < 1) throw std::invalid_argument("mga: max_iter must be >= 1");

    if (cfg.criterion == MgaCriterion::RandomVector) {
        auto weights = lhs_weights(static_cast<int>(model.decision_vars.size()),
                                   cfg.max_iter, cfg.seed);
        return run_mga_random(model, base, weights, cfg.delta_f, milp_cfg);
    }

    MgaRun run;
    if (base.status != MilpStatus::Optimal) {
        run.ok = false;
        run.error = "base solution is not optimal";
        return run;
    }
    const double f_star = base.objective;
    MilpModel mga = make_quality_model(model, f_star, cfg.delta_f);

    MilpSolution base_reshaped = base;
    base_reshaped.objective = model.cost.dot(base.x) + model.milp.lp.objective_constant;
    Alternative base_alt;
    base_alt.x = decision_values(model, base.x);
    base_alt.iteration = 0;
    base_alt.criterion = cfg.criterion;
    base_alt.dc_objective = base_reshaped.objective;
    base_alt.dispatch = extract_solution(model, base_reshaped);
    run.alternatives.push_back(base_alt);

    // The base solution seeds the history so the search cannot return it
    // as a new alternative.
    MgaState state = next_objective(MgaState{}, base_alt.x, cfg.criterion);

    for (int iteration = 1; iteration <= cfg.max_iter; ++iteration) {
        mga.lp.objective = Vector::Zero(mga.lp.n_vars);
        for (size_t k = 0; k < model.decision_vars.size(); ++k) {
            mga.lp.objective[model.decision_vars[k]] = state.f_coeffs[static_cast<int>(k)];
        }
        MilpSolution sol = solve_milp(mga, milp_cfg);
        if (sol.status == MilpStatus::IterLimit) {
            run.skipped_iterations.push_back(iteration);
            run.notes.push_back("iteration " + std::to_string(iteration) +
                                " hit the solver limit; search stopped");
            break;
        }
        if (sol.status != MilpStatus::Optimal) {
            run.ok = false;
            run.error = "mga subproblem unexpectedly " +
                        std::string(sol.status == MilpStatus::Infeasible ? "infeasible"
                                                                         : "failed");
            return run;
        }
        IntVector x = decision_values(model, sol.x);
        if (seen_before(state.history, x)) {
            run.converged_early = true;
            break;
        }
        run.alternatives.push_back(
            make_alternative(model, sol, iteration, cfg.criterion, f_star + cfg.delta_f));
        state = next_objective(std::move(state), x, cfg.criterion);
    }
    run.notes.insert(run.notes.end(), state.notes.begin(), state.notes.end());
    return run;
}

} // namespace altopf
