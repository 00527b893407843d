#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hetsleep/harness.hpp"
#include "hetsleep/nonuniform.hpp"
#include "hetsleep/uniform.hpp"
#include "hetsleep/validation.hpp"

namespace {

using nlohmann::json;
using namespace hetsleep;

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot write " + out_path);
    out << text;
}

struct SolveOutput {
    std::string algorithm;
    OperationMode mode;
    Evaluation eval;
    json extra;
};

std::string solve_csv(const SolveOutput& r) {
    std::ostringstream os;
    os << "algorithm,mode,n_active,p_t_w,p_het_w,feasible\n";
    os << r.algorithm << ',' << r.mode.to_string() << ',' << r.mode.count_active() << ','
       << fmt6(r.eval.p_t_w) << ',' << fmt6(r.eval.p_het_w) << ','
       << (r.eval.feasible ? 1 : 0) << "\n";
    return os.str();
}

std::string solve_json(const SolveOutput& r) {
    json j{{"algorithm", r.algorithm},
           {"mode", r.mode.to_string()},
           {"n_active", r.mode.count_active()},
           {"p_t_w", r.eval.p_t_w},
           {"traffic_factor_w", r.eval.traffic_factor_w},
           {"efficiency_factor", r.eval.efficiency_factor},
           {"p_het_w", r.eval.p_het_w},
           {"mu", r.eval.mu},
           {"feasible", r.eval.feasible}};
    for (auto& [k, v] : r.extra.items()) j[k] = v;
    return j.dump(2) + "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"Small-cell on/off planner for two-tier cellular networks"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_path;
    std::string format = "csv";
    app.add_option("--out", out_path, "Write output to a file instead of stdout");
    app.add_option("--format", format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    std::string scenario_path;
    std::string algorithm = "auto";
    auto* solve = app.add_subcommand("solve", "Pick the cell on/off mode for a scenario");
    solve->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    solve->add_option("--algorithm", algorithm, "auto, uniform or nonuniform")
        ->check(CLI::IsMember({"auto", "uniform", "nonuniform"}));

    std::string sweep_path;
    auto* sweep = app.add_subcommand("sweep", "Run a density sweep across schemes");
    sweep->add_option("spec", sweep_path, "Sweep spec JSON file")->required();

    std::string val_scenario;
    std::string val_mode;
    std::uint64_t val_draws = 100000;
    std::uint64_t val_seed = 1;
    auto* validate = app.add_subcommand("validate", "Monte-Carlo check of one mode");
    validate->add_option("scenario", val_scenario, "Scenario JSON file")->required();
    validate->add_option("--mode", val_mode, "Mode bits, cell 0 first (e.g. 1010)")
        ->required();
    validate->add_option("--draws", val_draws, "Network realizations to draw");
    validate->add_option("--seed", val_seed, "Random seed");

    std::string th_scenario;
    auto* thresholds =
        app.add_subcommand("thresholds", "Density thresholds and per-cell regimes");
    thresholds->add_option("scenario", th_scenario, "Scenario JSON file")->required();

    std::string t2_path;
    auto* table2 = app.add_subcommand("table2", "Optimality-ratio benchmark vs the oracle");
    table2->add_option("spec", t2_path, "Sweep spec JSON file (M <= 24)")->required();

    std::string oracle_path;
    auto* oracle = app.add_subcommand("oracle", "Exhaustive-search optimum (M <= 24)");
    oracle->add_option("scenario", oracle_path, "Scenario JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) {
        const Scenario s = load_scenario(scenario_path);
        std::string algo = algorithm;
        if (algo == "auto") algo = is_uniform(s) ? "uniform" : "nonuniform";
        SolveOutput r;
        if (algo == "uniform") {
            const UniformSolution sol = solve_uniform(s);
            r = {"uniform", sol.mode, sol.eval,
                 json{{"m_th", sol.m_th}, {"m_th1", sol.m_th1}, {"m_th2", sol.m_th2}}};
        } else {
            const Candidate cand = solve_nonuniform(s);
            r = {"nonuniform", cand.mode, cand.eval, json{{"list_id", cand.list_id}}};
        }
        emit(format == "json" ? solve_json(r) : solve_csv(r), out_path);
        return 0;
    }

    if (sweep->parsed()) {
        const SweepSpec spec = load_sweep_spec(sweep_path);
        const std::vector<SweepRow> rows = run_sweep(spec);
        if (format == "json") {
            json arr = json::array();
            for (const SweepRow& r : rows) {
                arr.push_back({{"lambda0", r.lambda0},
                               {"seed", r.seed},
                               {"scheme", r.scheme},
                               {"estimator", r.estimator},
                               {"p_het_w", r.p_het_w},
                               {"p_mbs_w", r.p_mbs_w},
                               {"u_pt_w", r.u_pt_w},
                               {"p_sbs_w", r.p_sbs_w},
                               {"feasible_before_admission", r.feasible_before_admission},
                               {"admitted_fraction", r.admitted_fraction},
                               {"n_active", r.n_active}});
            }
            emit(arr.dump(2) + "\n", out_path);
        } else {
            emit(sweep_csv(rows), out_path);
        }
        return 0;
    }

    if (validate->parsed()) {
        const Scenario s = load_scenario(val_scenario);
        const OperationMode mode = OperationMode::from_string(val_mode);
        const McReport rep = monte_carlo_validate(s, mode, val_draws, val_seed);
        if (format == "json") {
            emit(rep.to_json_text(), out_path);
        } else {
            std::ostringstream os;
            os << "p_t_analytic_w,p_t_empirical_mean_w,std_error_w,n_draws,outage_rate,"
                  "approx_error_z\n"
               << fmt6(rep.p_t_analytic_w) << ',' << fmt6(rep.p_t_empirical_mean_w) << ','
               << fmt6(rep.std_error_w) << ',' << rep.n_draws << ','
               << fmt6(rep.outage_rate) << ',' << fmt6(rep.approx_error_z) << "\n";
            emit(os.str(), out_path);
        }
        return 0;
    }

    if (thresholds->parsed()) {
        const Scenario s = load_scenario(th_scenario);
        const RegimeClassification reg = classify_regimes(s);
        const std::vector<double> dist = sbs_distances(s);
        const bool uniform = is_uniform(s);
        double lam_off = 0.0;
        double lam_on = 0.0;
        if (s.cell_count() > 0) {
            lam_off = threshold_lambda_off(s);
            lam_on = threshold_lambda_on(s);
        }
        const auto regime_of = [&](std::size_t m) -> std::string {
            for (std::size_t i : reg.forced_off) {
                if (i == m) return "forced_off";
            }
            for (std::size_t i : reg.forced_on) {
                if (i == m) return "forced_on";
            }
            return "free";
        };
        if (format == "json") {
            json cells = json::array();
            for (std::size_t m = 0; m < s.cell_count(); ++m) {
                cells.push_back({{"cell", m},
                                 {"distance_m", dist[m]},
                                 {"lambda_per_m2", s.lambdas_per_m2[m]},
                                 {"lambda_th_off", reg.lambda_th_off[m]},
                                 {"lambda_th_on", reg.lambda_th_on[m]},
                                 {"regime", regime_of(m)}});
            }
            json j{{"uniform", uniform},
                   {"lambda_th_off_uniform", lam_off},
                   {"lambda_th_on_uniform", lam_on},
                   {"cells", cells}};
            emit(j.dump(2) + "\n", out_path);
        } else {
            std::ostringstream os;
            os << "cell,distance_m,lambda_per_m2,lambda_th_off,lambda_th_on,regime\n";
            os << "uniform," << fmt6(0.0) << ',' << fmt6(s.lambda0_per_m2) << ','
               << fmt6(lam_off) << ',' << fmt6(lam_on) << ",-\n";
            for (std::size_t m = 0; m < s.cell_count(); ++m) {
                os << m << ',' << fmt6(dist[m]) << ',' << fmt6(s.lambdas_per_m2[m]) << ','
                   << fmt6(reg.lambda_th_off[m]) << ',' << fmt6(reg.lambda_th_on[m]) << ','
                   << regime_of(m) << "\n";
            }
            emit(os.str(), out_path);
        }
        return 0;
    }

    if (table2->parsed()) {
        const SweepSpec spec = load_sweep_spec(t2_path);
        const std::vector<Table2Row> rows = table2_benchmark(spec);
        if (format == "json") {
            json arr = json::array();
            for (const Table2Row& r : rows) {
                arr.push_back({{"lambda0", r.lambda0},
                               {"n_seeds", r.n_seeds},
                               {"mean_ratio", r.mean_ratio},
                               {"min_ratio", r.min_ratio},
                               {"max_ratio", r.max_ratio}});
            }
            emit(arr.dump(2) + "\n", out_path);
        } else {
            emit(table2_csv(rows), out_path);
        }
        return 0;
    }

    if (oracle->parsed()) {
        const Scenario s = load_scenario(oracle_path);
        const auto [mode, eval] = exhaustive_search(s);
        SolveOutput r{"exhaustive", mode, eval, json::object()};
        emit(format == "json" ? solve_json(r) : solve_csv(r), out_path);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleScenario& e) {
        std::cerr << "error: " << e.what()
                  << " (apply admission control or raise the cap)\n";
        return 3;
    } catch (const TooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
