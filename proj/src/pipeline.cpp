#include "altopf/pipeline.hpp"

#include "altopf/json_io.hpp"
#include "altopf/matpower.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace altopf {

namespace {

using nlohmann::ordered_json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Network load_case(const std::string& path, std::vector<std::string>* defaults_applied) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open case file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (path.size() >= 2 && path.substr(path.size() - 2) == ".m") {
        return parse_matpower_case(buffer.str());
    }
    return parse_network_json(buffer.str(), defaults_applied);
}

IntVector device_mask(const Network& net, ProblemKind kind, const IntVector& x) {
    IntVector on = IntVector::Ones(net.n_devices());
    if (kind == ProblemKind::DcUc) {
        int k = 0;
        for (int d = 0; d < net.n_devices(); ++d) {
            if (net.devices[d].commitable) {
                on[d] = x[k];
                ++k;
            }
        }
    }
    return on;
}

IntVector recovery_topology(const Network& net, ProblemKind kind, const IntVector& x) {
    IntVector topo(net.n_branches());
    if (kind == ProblemKind::DcOts) {
        for (int e = 0; e < net.n_branches(); ++e) topo[e] = x[e];
    } else {
        for (int e = 0; e < net.n_branches(); ++e) topo[e] = net.branches[e].x0;
    }
    return topo;
}

std::vector<int> cache_key(const IntVector& topo, const IntVector& mask) {
    std::vector<int> key;
    key.reserve(topo.size() + mask.size());
    for (int i = 0; i < topo.size(); ++i) key.push_back(topo[i]);
    for (int i = 0; i < mask.size(); ++i) key.push_back(mask[i]);
    return key;
}

AlternativeRecord make_record(const Alternative& alt, const RecoveryResult& rec) {
    AlternativeRecord record;
    record.iteration = alt.iteration;
    record.x = alt.x;
    record.dc_objective = alt.dc_objective;
    record.connected_on = alt.x.sum();
    record.converged = rec.converged;
    record.classification = class_name(rec.classification);
    record.max_slack = rec.max_slack;
    record.objective = rec.objective;
    record.dispatch_cost = rec.dispatch_cost;
    record.redispatch_mean =
        rec.redispatch.size() > 0 ? rec.redispatch.cwiseAbs().mean() : 0.0;
    record.start_used = rec.start_used;
    record.v = rec.state.v;
    record.theta = rec.state.theta;
    record.p_g = rec.state.p_g;
    record.q_g = rec.state.q_g;
    record.p_e = rec.state.p_e;
    record.q_e = rec.state.q_e;
    record.slacks = rec.slacks;
    record.redispatch = rec.redispatch;
    return record;
}

} // namespace

OverlapRecord overlap_analysis(const std::vector<std::string>& methods,
                               const std::vector<std::vector<IntVector>>& feasible_sets) {
    if (methods.size() != feasible_sets.size()) {
        throw std::invalid_argument("overlap_analysis: methods/sets size mismatch");
    }
    OverlapRecord overlap;
    overlap.methods = methods;
    const int n = static_cast<int>(feasible_sets.size());
    overlap.pairwise.assign(n, std::vector<int>(n, 0));
    auto contains = [](const std::vector<IntVector>& set, const IntVector& x) {
        for (const auto& s : set) {
            if (s == x) return true;
        }
        return false;
    };
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            int count = 0;
            for (const auto& x : feasible_sets[a]) {
                if (a == b || contains(feasible_sets[b], x)) ++count;
            }
            overlap.pairwise[a][b] = count;
        }
    }
    std::vector<IntVector> all;
    for (const auto& set : feasible_sets) {
        for (const auto& x : set) {
            if (!contains(all, x)) all.push_back(x);
        }
    }
    overlap.union_size = static_cast<int>(all.size());
    overlap.in_all = 0;
    if (n > 0) {
        for (const auto& x : feasible_sets[0]) {
            bool everywhere = true;
            for (int b = 1; b < n && everywhere; ++b) everywhere = contains(feasible_sets[b], x);
            if (everywhere) ++overlap.in_all;
        }
    }
    return overlap;
}

PipelineReport run_pipeline(const std::string& case_path, const PipelineOptions& options) {
    const auto t_total = std::chrono::steady_clock::now();
    PipelineReport report;
    report.case_path = case_path;
    report.problem = options.problem == PipelineProblem::Ots ? "ots" : "uc";
    report.delta_f = options.delta_f;
    report.max_iter = options.max_iter;
    report.seed = options.seed;
    for (MgaCriterion c : options.criteria) report.criteria_requested.push_back(criterion_name(c));
    report.theta_bound = options.formulation.theta_bound;
    report.theta_bound_per_bus = options.formulation.theta_bound_per_bus;
    report.big_m_auto = options.formulation.big_m_auto;
    report.big_m_value = options.formulation.big_m_value;
    report.anti_islanding = options.formulation.anti_islanding;
    report.horizon = options.formulation.horizon;
    report.load_scale = options.formulation.load_scale;
    report.pairwise_exclusions = options.formulation.pairwise_exclusions;
    if (options.formulation.switch_budget) {
        report.switch_budget = options.formulation.switch_budget->max_switches;
    }
    report.tol_overload = options.recovery.tol_overload;
    report.pi_model = options.recovery.pi_model;

    auto t_parse = std::chrono::steady_clock::now();
    Network net = load_case(case_path, &report.defaults_applied);
    for (const Diagnostic& diag : validate_network(net)) {
        if (diag.severity == Severity::Error) {
            throw ValidationError("case validation: " + diag.entity + ": " + diag.message);
        }
    }
    report.n_buses = net.n_buses();
    report.n_branches = net.n_branches();
    report.n_devices = net.n_devices();
    report.timings.parse_s = seconds_since(t_parse);

    {
        double max_cost = 1.0;
        for (const Device& dev : net.devices) max_cost = std::max(max_cost, std::abs(dev.cost));
        report.penalty_weight = options.recovery.penalty_weight > 0
                                    ? options.recovery.penalty_weight
                                    : 1e4 * max_cost;
    }

    auto t_build = std::chrono::steady_clock::now();
    DcModel model = options.problem == PipelineProblem::Ots
                        ? build_dc_ots(net, options.formulation)
                        : build_dc_uc(net, options.formulation);
    report.timings.build_s = seconds_since(t_build);

    auto t_base = std::chrono::steady_clock::now();
    MilpSolution base = solve_milp(model.milp, options.milp);
    report.timings.base_solve_s = seconds_since(t_base);
    if (base.status != MilpStatus::Optimal) {
        report.status = "base_infeasible";
        report.timings.total_s = seconds_since(t_total);
        return report;
    }
    report.status = "ok";

    // Shared recovery cache: identical integer decisions recover identically.
    std::map<std::vector<int>, RecoveryResult> cache;
    double recovery_time = 0.0;
    auto recover = [&](const Alternative& alt) -> const RecoveryResult& {
        IntVector topo = recovery_topology(net, model.kind, alt.x);
        IntVector mask = device_mask(net, model.kind, alt.x);
        auto key = cache_key(topo, mask);
        auto it = cache.find(key);
        if (it == cache.end()) {
            auto t0 = std::chrono::steady_clock::now();
            RecoveryResult rec = solve_ac_recovery(net, topo, mask, alt.dispatch,
                                                   options.recovery);
            recovery_time += seconds_since(t0);
            ++report.recovery_solves;
            bool safe = rec.classification == SolutionClass::Safe;
            if (safe && report.recovery_solves_to_first_safe < 0) {
                report.recovery_solves_to_first_safe = report.recovery_solves;
            }
            it = cache.emplace(std::move(key), std::move(rec)).first;
        }
        return it->second;
    };

    OpfSolution base_dispatch = extract_solution(model, base);
    Alternative base_alt;
    base_alt.x = base_dispatch.x;
    base_alt.iteration = 0;
    base_alt.dc_objective = base.objective;
    base_alt.dispatch = base_dispatch;
    const RecoveryResult& base_rec = recover(base_alt);
    report.base = make_record(base_alt, base_rec);

    struct Recovered {
        Alternative alt;
        const RecoveryResult* rec;
        int criterion_index;
        int alt_index;
    };
    std::vector<Recovered> recovered;

    auto t_mga = std::chrono::steady_clock::now();
    const double recovery_before_mga = recovery_time;
    for (size_t c = 0; c < options.criteria.size(); ++c) {
        MgaConfig mga_cfg;
        mga_cfg.criterion = options.criteria[c];
        mga_cfg.delta_f = options.delta_f;
        mga_cfg.max_iter = options.max_iter;
        mga_cfg.seed = options.seed;
        MgaRun run = run_mga(model, base, mga_cfg, options.milp);
        if (!run.ok) {
            throw std::runtime_error("mga (" + criterion_name(options.criteria[c]) +
                                     "): " + run.error);
        }
        CriterionRecord record;
        record.criterion = criterion_name(options.criteria[c]);
        record.skipped_iterations = run.skipped_iterations;
        record.notes = run.notes;
        record.converged_early = run.converged_early;
        for (size_t a = 0; a < run.alternatives.size(); ++a) {
            const Alternative& alt = run.alternatives[a];
            const RecoveryResult& rec = recover(alt);
            record.alternatives.push_back(make_record(alt, rec));
            record.n_on_trajectory.push_back(alt.x.sum());
            recovered.push_back(
                {alt, &cache.at(cache_key(recovery_topology(net, model.kind, alt.x),
                                          device_mask(net, model.kind, alt.x))),
                 static_cast<int>(c), static_cast<int>(a)});
        }
        report.criteria.push_back(std::move(record));
    }
    report.timings.mga_s = seconds_since(t_mga) - (recovery_time - recovery_before_mga);
    report.timings.recovery_s = recovery_time;

    // Best known safe cost across the run, then the optimal-cost upgrade.
    double best_known = kInf;
    for (const auto& [key, rec] : cache) {
        if (rec.classification == SolutionClass::Safe) {
            best_known = std::min(best_known, rec.dispatch_cost);
        }
    }
    report.best_known_cost = best_known;
    auto final_class = [&](const RecoveryResult& rec) {
        return class_name(classify_solution(rec, best_known, options.recovery.tol_overload));
    };
    report.base.classification = final_class(base_rec);
    for (auto& entry : recovered) {
        report.criteria[entry.criterion_index].alternatives[entry.alt_index].classification =
            final_class(*entry.rec);
    }

    // Overlap of AC-feasible (safe or optimal) solutions between methods.
    std::vector<std::vector<IntVector>> feasible_sets(report.criteria.size());
    for (size_t c = 0; c < report.criteria.size(); ++c) {
        for (const auto& alt : report.criteria[c].alternatives) {
            if (alt.classification == "safe" || alt.classification == "optimal") {
                bool dup = false;
                for (const auto& x : feasible_sets[c]) dup = dup || x == alt.x;
                if (!dup) feasible_sets[c].push_back(alt.x);
            }
        }
    }
    report.overlap = overlap_analysis(report.criteria_requested, feasible_sets);

    // Re-dispatch statistics over every recovered alternative.
    {
        std::vector<OpfSolution> dc_list;
        std::vector<RecoveryResult> rec_list;
        for (const auto& entry : recovered) {
            dc_list.push_back(entry.alt.dispatch);
            rec_list.push_back(*entry.rec);
        }
        RedispatchStats stats = redispatch_stats(net, dc_list, rec_list);
        report.redispatch_per_alternative_mean = stats.per_alternative_mean;
        for (const auto& e : stats.per_device) {
            const Recovered& src = recovered[e.alternative];
            report.redispatch_entries.push_back(
                {report.criteria[src.criterion_index].criterion, src.alt.iteration,
                 e.device_id, e.delta});
        }
    }

    if (options.greedy_baseline && options.problem == PipelineProblem::Ots) {
        auto t_greedy = std::chrono::steady_clock::now();
        IntVector x0 = options.greedy_x0 ? *options.greedy_x0
                                         : IntVector::Ones(net.n_branches());
        GreedyConfig greedy_cfg;
        greedy_cfg.tol = options.greedy_tol;
        greedy_cfg.recovery = options.recovery;
        try {
            GreedyTrajectory traj = greedy_switch_search(net, x0, greedy_cfg);
            report.greedy.ran = true;
            report.greedy.steps = traj.steps;
            report.greedy.ac_evals = traj.ac_evals;
            report.greedy.island_skips = traj.island_skips;
            report.greedy.per_iteration_evals = traj.per_iteration_evals;
            report.greedy.final_topology = traj.final_topology;
        } catch (const std::runtime_error& e) {
            report.greedy.ran = false;
            report.greedy.error = e.what();
        }
        report.timings.greedy_s = seconds_since(t_greedy);
    }

    report.timings.total_s = seconds_since(t_total);
    return report;
}

namespace {

ordered_json vec_json(const Vector& v) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

ordered_json ivec_json(const IntVector& v) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector json_vec(const ordered_json& arr) {
    Vector v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr[i].get<double>();
    return v;
}

IntVector json_ivec(const ordered_json& arr) {
    IntVector v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr[i].get<int>();
    return v;
}

ordered_json alternative_json(const AlternativeRecord& a) {
    ordered_json j;
    j["iteration"] = a.iteration;
    j["x"] = ivec_json(a.x);
    j["dc_objective"] = a.dc_objective;
    j["connected_on"] = a.connected_on;
    j["converged"] = a.converged;
    j["classification"] = a.classification;
    j["max_slack"] = a.max_slack;
    j["objective"] = a.objective;
    j["dispatch_cost"] = a.dispatch_cost;
    j["redispatch_mean"] = a.redispatch_mean;
    j["start_used"] = a.start_used;
    j["v"] = vec_json(a.v);
    j["theta"] = vec_json(a.theta);
    j["p_g"] = vec_json(a.p_g);
    j["q_g"] = vec_json(a.q_g);
    j["p_e"] = vec_json(a.p_e);
    j["q_e"] = vec_json(a.q_e);
    j["slacks"] = vec_json(a.slacks);
    j["redispatch"] = vec_json(a.redispatch);
    return j;
}

AlternativeRecord alternative_from(const ordered_json& j) {
    AlternativeRecord a;
    a.iteration = j.at("iteration").get<int>();
    a.x = json_ivec(j.at("x"));
    a.dc_objective = j.at("dc_objective").get<double>();
    a.connected_on = j.at("connected_on").get<int>();
    a.converged = j.at("converged").get<bool>();
    a.classification = j.at("classification").get<std::string>();
    a.max_slack = j.at("max_slack").get<double>();
    a.objective = j.at("objective").get<double>();
    a.dispatch_cost = j.at("dispatch_cost").get<double>();
    a.redispatch_mean = j.at("redispatch_mean").get<double>();
    a.start_used = j.at("start_used").get<std::string>();
    a.v = json_vec(j.at("v"));
    a.theta = json_vec(j.at("theta"));
    a.p_g = json_vec(j.at("p_g"));
    a.q_g = json_vec(j.at("q_g"));
    a.p_e = json_vec(j.at("p_e"));
    a.q_e = json_vec(j.at("q_e"));
    a.slacks = json_vec(j.at("slacks"));
    a.redispatch = json_vec(j.at("redispatch"));
    return a;
}

} // namespace

std::string report_to_json(const PipelineReport& report) {
    ordered_json j;
    j["case_path"] = report.case_path;
    j["n_buses"] = report.n_buses;
    j["n_branches"] = report.n_branches;
    j["n_devices"] = report.n_devices;
    j["problem"] = report.problem;
    j["status"] = report.status;
    ordered_json cfg;
    cfg["delta_f"] = report.delta_f;
    cfg["max_iter"] = report.max_iter;
    cfg["seed"] = report.seed;
    cfg["criteria"] = report.criteria_requested;
    cfg["theta_bound"] = report.theta_bound;
    cfg["theta_bound_per_bus"] = report.theta_bound_per_bus;
    cfg["big_m_auto"] = report.big_m_auto;
    cfg["big_m_value"] = report.big_m_value;
    cfg["anti_islanding"] = report.anti_islanding;
    cfg["horizon"] = report.horizon;
    cfg["load_scale"] = report.load_scale;
    ordered_json pairs = ordered_json::array();
    for (auto [a, b] : report.pairwise_exclusions) pairs.push_back({a, b});
    cfg["pairwise_exclusions"] = pairs;
    if (report.switch_budget) cfg["switch_budget"] = *report.switch_budget;
    else cfg["switch_budget"] = nullptr;
    cfg["tol_overload"] = report.tol_overload;
    cfg["penalty_weight"] = report.penalty_weight;
    cfg["pi_model"] = report.pi_model;
    cfg["defaults_applied"] = report.defaults_applied;
    j["config"] = cfg;

    if (report.status == "ok") {
        j["base"] = alternative_json(report.base);
        ordered_json crits = ordered_json::array();
        for (const auto& c : report.criteria) {
            ordered_json jc;
            jc["criterion"] = c.criterion;
            ordered_json alts = ordered_json::array();
            for (const auto& a : c.alternatives) alts.push_back(alternative_json(a));
            jc["alternatives"] = alts;
            jc["skipped_iterations"] = c.skipped_iterations;
            jc["notes"] = c.notes;
            jc["converged_early"] = c.converged_early;
            jc["n_on_trajectory"] = c.n_on_trajectory;
            crits.push_back(jc);
        }
        j["criteria"] = crits;
        j["best_known_cost"] =
            std::isfinite(report.best_known_cost) ? ordered_json(report.best_known_cost)
                                                  : ordered_json(nullptr);
        ordered_json ov;
        ov["methods"] = report.overlap.methods;
        ov["pairwise"] = report.overlap.pairwise;
        ov["in_all"] = report.overlap.in_all;
        ov["union_size"] = report.overlap.union_size;
        j["overlap"] = ov;
        j["redispatch_per_alternative_mean"] = vec_json(report.redispatch_per_alternative_mean);
        ordered_json red = ordered_json::array();
        for (const auto& e : report.redispatch_entries) {
            ordered_json je;
            je["criterion"] = e.criterion;
            je["iteration"] = e.iteration;
            je["device_id"] = e.device_id;
            je["delta"] = e.delta;
            red.push_back(je);
        }
        j["redispatch"] = red;
        ordered_json greedy;
        greedy["ran"] = report.greedy.ran;
        greedy["error"] = report.greedy.error;
        ordered_json steps = ordered_json::array();
        for (const auto& s : report.greedy.steps) {
            ordered_json js;
            js["switched_branch"] =
                s.switched_branch ? ordered_json(*s.switched_branch) : ordered_json(nullptr);
            js["ac_cost"] = s.ac_cost;
            js["wall_time_s"] = s.wall_time_s;
            steps.push_back(js);
        }
        greedy["steps"] = steps;
        greedy["ac_evals"] = report.greedy.ac_evals;
        greedy["island_skips"] = report.greedy.island_skips;
        greedy["per_iteration_evals"] = report.greedy.per_iteration_evals;
        greedy["final_topology"] = ivec_json(report.greedy.final_topology);
        j["greedy"] = greedy;
        j["recovery_solves"] = report.recovery_solves;
        j["recovery_solves_to_first_safe"] = report.recovery_solves_to_first_safe;
    }

    ordered_json timings;
    timings["parse_s"] = report.timings.parse_s;
    timings["build_s"] = report.timings.build_s;
    timings["base_solve_s"] = report.timings.base_solve_s;
    timings["mga_s"] = report.timings.mga_s;
    timings["recovery_s"] = report.timings.recovery_s;
    timings["greedy_s"] = report.timings.greedy_s;
    timings["total_s"] = report.timings.total_s;
    j["timings"] = timings;
    return j.dump(2);
}

PipelineReport report_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    PipelineReport report;
    report.case_path = j.at("case_path").get<std::string>();
    report.n_buses = j.at("n_buses").get<int>();
    report.n_branches = j.at("n_branches").get<int>();
    report.n_devices = j.at("n_devices").get<int>();
    report.problem = j.at("problem").get<std::string>();
    report.status = j.at("status").get<std::string>();
    const auto& cfg = j.at("config");
    report.delta_f = cfg.at("delta_f").get<double>();
    report.max_iter = cfg.at("max_iter").get<int>();
    report.seed = cfg.at("seed").get<std::uint64_t>();
    report.criteria_requested = cfg.at("criteria").get<std::vector<std::string>>();
    report.theta_bound = cfg.at("theta_bound").get<double>();
    report.theta_bound_per_bus = cfg.at("theta_bound_per_bus").get<bool>();
    report.big_m_auto = cfg.at("big_m_auto").get<bool>();
    report.big_m_value = cfg.at("big_m_value").get<double>();
    report.anti_islanding = cfg.at("anti_islanding").get<bool>();
    report.horizon = cfg.at("horizon").get<int>();
    report.load_scale = cfg.at("load_scale").get<std::vector<double>>();
    for (const auto& p : cfg.at("pairwise_exclusions")) {
        report.pairwise_exclusions.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
    if (!cfg.at("switch_budget").is_null()) {
        report.switch_budget = cfg.at("switch_budget").get<int>();
    }
    report.tol_overload = cfg.at("tol_overload").get<double>();
    report.penalty_weight = cfg.at("penalty_weight").get<double>();
    report.pi_model = cfg.at("pi_model").get<bool>();
    report.defaults_applied = cfg.at("defaults_applied").get<std::vector<std::string>>();

    if (report.status == "ok") {
        report.base = alternative_from(j.at("base"));
        for (const auto& jc : j.at("criteria")) {
            CriterionRecord c;
            c.criterion = jc.at("criterion").get<std::string>();
            for (const auto& ja : jc.at("alternatives")) {
                c.alternatives.push_back(alternative_from(ja));
            }
            c.skipped_iterations = jc.at("skipped_iterations").get<std::vector<int>>();
            c.notes = jc.at("notes").get<std::vector<std::string>>();
            c.converged_early = jc.at("converged_early").get<bool>();
            c.n_on_trajectory = jc.at("n_on_trajectory").get<std::vector<int>>();
            report.criteria.push_back(std::move(c));
        }
        report.best_known_cost = j.at("best_known_cost").is_null()
                                     ? kInf
                                     : j.at("best_known_cost").get<double>();
        const auto& ov = j.at("overlap");
        report.overlap.methods = ov.at("methods").get<std::vector<std::string>>();
        report.overlap.pairwise = ov.at("pairwise").get<std::vector<std::vector<int>>>();
        report.overlap.in_all = ov.at("in_all").get<int>();
        report.overlap.union_size = ov.at("union_size").get<int>();
        report.redispatch_per_alternative_mean =
            json_vec(j.at("redispatch_per_alternative_mean"));
        for (const auto& je : j.at("redispatch")) {
            report.redispatch_entries.push_back({je.at("criterion").get<std::string>(),
                                                 je.at("iteration").get<int>(),
                                                 je.at("device_id").get<int>(),
                                                 je.at("delta").get<double>()});
        }
        const auto& greedy = j.at("greedy");
        report.greedy.ran = greedy.at("ran").get<bool>();
        report.greedy.error = greedy.at("error").get<std::string>();
        for (const auto& js : greedy.at("steps")) {
            GreedyStep s;
            if (!js.at("switched_branch").is_null()) {
                s.switched_branch = js.at("switched_branch").get<int>();
            }
            s.ac_cost = js.at("ac_cost").get<double>();
            s.wall_time_s = js.at("wall_time_s").get<double>();
            report.greedy.steps.push_back(s);
        }
        report.greedy.ac_evals = greedy.at("ac_evals").get<int>();
        report.greedy.island_skips = greedy.at("island_skips").get<int>();
        report.greedy.per_iteration_evals =
            greedy.at("per_iteration_evals").get<std::vector<int>>();
        report.greedy.final_topology = json_ivec(greedy.at("final_topology"));
        report.recovery_solves = j.at("recovery_solves").get<int>();
        report.recovery_solves_to_first_safe =
            j.at("recovery_solves_to_first_safe").get<int>();
    }

    const auto& timings = j.at("timings");
    report.timings.parse_s = timings.at("parse_s").get<double>();
    report.timings.build_s = timings.at("build_s").get<double>();
    report.timings.base_solve_s = timings.at("base_solve_s").get<double>();
    report.timings.mga_s = timings.at("mga_s").get<double>();
    report.timings.recovery_s = timings.at("recovery_s").get<double>();
    report.timings.greedy_s = timings.at("greedy_s").get<double>();
    report.timings.total_s = timings.at("total_s").get<double>();
    return report;
}

std::vector<std::string> emit_report(const PipelineReport& report, ReportFormat format,
                                     const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::vector<std::string> written;
    auto open_out = [&](const std::string& name) {
        std::string path = (fs::path(out_dir) / name).string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        written.push_back(path);
        return out;
    };
    auto num = [](double v) {
        std::ostringstream os;
        os << std::setprecision(17) << v;
        return os.str();
    };

    if (format == ReportFormat::Json) {
        auto out = open_out("report.json");
        out << report_to_json(report) << "\n";
        return written;
    }

    {
        auto out = open_out("iterations.csv");
        out << "criterion,iteration,dc_objective,ac_classification,connected_branches,"
               "redispatch_mean\n";
        for (const auto& c : report.criteria) {
            for (const auto& a : c.alternatives) {
                out << c.criterion << "," << a.iteration << "," << num(a.dc_objective) << ","
                    << a.classification << "," << a.connected_on << ","
                    << num(a.redispatch_mean) << "\n";
            }
        }
    }
    {
        auto out = open_out("overlap.csv");
        out << "method_a,method_b,overlap\n";
        for (size_t a = 0; a < report.overlap.methods.size(); ++a) {
            for (size_t b = 0; b < report.overlap.methods.size(); ++b) {
                out << report.overlap.methods[a] << "," << report.overlap.methods[b] << ","
                    << report.overlap.pairwise[a][b] << "\n";
            }
        }
    }
    {
        auto out = open_out("redispatch.csv");
        out << "criterion,iteration,device_id,delta_p\n";
        for (const auto& e : report.redispatch_entries) {
            out << e.criterion << "," << e.iteration << "," << e.device_id << ","
                << num(e.delta) << "\n";
        }
    }
    return written;
}

} // namespace altopf
