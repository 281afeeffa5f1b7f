#include "altopf/json_io.hpp"
#include "altopf/lp.hpp"
#include "altopf/matpower.hpp"
#include "altopf/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<altopf::MgaCriterion> parse_criteria(const std::vector<std::string>& names) {
    std::vector<altopf::MgaCriterion> out;
    for (const std::string& name : names) {
        if (name == "all") {
            return {altopf::MgaCriterion::Hsj, altopf::MgaCriterion::HsjNegative,
                    altopf::MgaCriterion::HsjZeroBias, altopf::MgaCriterion::RandomVector};
        }
        out.push_back(altopf::criterion_from_name(name));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"altopf - mixed-integer DC optimal power flow with MGA alternatives "
                 "and AC recovery"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand(
        "solve", "Solve a case, search alternatives, recover them in AC, write reports");
    std::string case_path, out_dir, dump_lp_path;
    std::string problem = "ots";
    std::vector<std::string> criteria{"all"};
    double delta_f = 0.0;
    int max_iter = 30;
    std::uint64_t seed = 0;
    bool greedy = false;
    int horizon = 1;
    double theta_bound = 0.5236;
    bool no_anti_islanding = false;
    bool pi_model = false;
    double tol_overload = 1e-4;
    double greedy_tol = 1.0;
    std::vector<std::string> exclusions;
    int switch_budget = -1;
    std::vector<double> load_scale;
    std::string greedy_x0_text;

    solve->add_option("--case", case_path, "Case file (.json native schema or .m MATPOWER)")
        ->required();
    solve->add_option("--problem", problem, "Problem kind: ots or uc")
        ->check(CLI::IsMember({"ots", "uc"}));
    solve->add_option("--criterion", criteria,
                      "MGA criteria: hsj, hsj-neg, hsj0, random, all (repeatable)");
    solve->add_option("--delta-f", delta_f, "Tolerated objective increase (currency)");
    solve->add_option("--max-iter", max_iter, "MGA iteration cap per criterion");
    solve->add_option("--seed", seed, "Random-vector seed");
    solve->add_option("--out", out_dir, "Output directory for report.json and CSV bundle")
        ->required();
    solve->add_flag("--greedy-baseline", greedy, "Also run the greedy single-switch search");
    solve->add_option("--greedy-x0", greedy_x0_text,
                      "Greedy start: comma-separated 0/1 per branch (default all on)");
    solve->add_option("--greedy-tol", greedy_tol, "Greedy improvement tolerance (currency)");
    solve->add_option("--horizon", horizon, "Unit-commitment periods");
    solve->add_option("--load-scale", load_scale,
                      "Per-period multiplier on fixed loads (uc, repeatable)");
    solve->add_option("--theta-bound", theta_bound,
                      "Angle-difference bound per branch (radians, ots)");
    solve->add_flag("--no-anti-islanding", no_anti_islanding,
                    "Drop the degree-2 connectivity heuristic rows");
    solve->add_option("--exclude", exclusions,
                      "Pairwise exclusion 'id_a,id_b': at most one of the two on (repeatable)");
    solve->add_option("--switch-budget", switch_budget,
                      "Maximum switches relative to the initial branch states");
    solve->add_flag("--pi-model", pi_model,
                    "Use the standard two-sided pi-model in the AC stage");
    solve->add_option("--tol-overload", tol_overload,
                      "Thermal slack separating safe from overloaded (pu)");
    solve->add_option("--dump-lp", dump_lp_path,
                      "Write the base problem in LP text format to this path");

    CLI11_PARSE(app, argc, argv);

    try {
        altopf::PipelineOptions options;
        options.problem = problem == "uc" ? altopf::PipelineProblem::Uc
                                          : altopf::PipelineProblem::Ots;
        options.criteria = parse_criteria(criteria);
        options.delta_f = delta_f;
        options.max_iter = max_iter;
        options.seed = seed;
        options.greedy_baseline = greedy;
        options.greedy_tol = greedy_tol;
        options.formulation.horizon = horizon;
        options.formulation.load_scale = load_scale;
        options.formulation.theta_bound = theta_bound;
        options.formulation.anti_islanding = !no_anti_islanding;
        if (switch_budget >= 0) {
            options.formulation.switch_budget = altopf::SwitchBudget{switch_budget};
        }
        for (const std::string& pair : exclusions) {
            auto comma = pair.find(',');
            if (comma == std::string::npos) {
                std::cerr << "error: --exclude expects 'id_a,id_b'\n";
                return 1;
            }
            options.formulation.pairwise_exclusions.emplace_back(
                std::stoi(pair.substr(0, comma)), std::stoi(pair.substr(comma + 1)));
        }
        options.recovery.pi_model = pi_model;
        options.recovery.tol_overload = tol_overload;
        if (!greedy_x0_text.empty()) {
            std::vector<int> bits;
            std::stringstream ss(greedy_x0_text);
            std::string tok;
            while (std::getline(ss, tok, ',')) bits.push_back(std::stoi(tok));
            altopf::IntVector x0(static_cast<int>(bits.size()));
            for (size_t i = 0; i < bits.size(); ++i) x0[static_cast<int>(i)] = bits[i];
            options.greedy_x0 = x0;
        }

        if (!dump_lp_path.empty()) {
            std::ifstream in(case_path);
            if (!in) throw altopf::ParseError("cannot open case file: " + case_path);
            std::stringstream buffer;
            buffer << in.rdbuf();
            altopf::Network net =
                case_path.size() >= 2 && case_path.substr(case_path.size() - 2) == ".m"
                    ? altopf::parse_matpower_case(buffer.str())
                    : altopf::parse_network_json(buffer.str());
            altopf::DcModel model = options.problem == altopf::PipelineProblem::Ots
                                        ? altopf::build_dc_ots(net, options.formulation)
                                        : altopf::build_dc_uc(net, options.formulation);
            std::ofstream lp_out(dump_lp_path);
            if (!lp_out) throw std::runtime_error("cannot write " + dump_lp_path);
            lp_out << altopf::write_lp_format(model.milp.lp, model.milp.var_names);
        }

        altopf::PipelineReport report = altopf::run_pipeline(case_path, options);
        altopf::emit_report(report, altopf::ReportFormat::Json, out_dir);
        altopf::emit_report(report, altopf::ReportFormat::CsvBundle, out_dir);

        if (report.status == "base_infeasible") {
            std::cerr << "base problem infeasible; report written to " << out_dir << "\n";
            return 2;
        }
        int safe = 0, total = 0;
        for (const auto& c : report.criteria) {
            for (const auto& a : c.alternatives) {
                ++total;
                if (a.classification == "safe" || a.classification == "optimal") ++safe;
            }
        }
        std::cout << "base " << report.base.classification << "; " << total
                  << " alternatives across " << report.criteria.size() << " criteria, "
                  << safe << " AC-feasible; report in " << out_dir << "\n";
        return 0;
    } catch (const altopf::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const altopf::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
