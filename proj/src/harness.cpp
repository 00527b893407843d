#include "hetsleep/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hetsleep/nonuniform.hpp"
#include "hetsleep/rng.hpp"
#include "hetsleep/uniform.hpp"
#include "hetsleep/validation.hpp"

namespace hetsleep {

namespace {

// Substream ids hanging off each sweep-cell seed.
constexpr std::uint64_t kDensityStream = 0;
constexpr std::uint64_t kActivationStream = 1;

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void SweepSpec::validate() const {
    if (lambda0_grid.empty()) throw ValidationError("sweep: lambda0_grid must be non-empty");
    for (std::size_t i = 0; i + 1 < lambda0_grid.size(); ++i) {
        if (!(lambda0_grid[i] < lambda0_grid[i + 1])) {
            throw ValidationError("sweep: lambda0_grid must be strictly increasing");
        }
    }
    if (seeds.empty()) throw ValidationError("sweep: seeds must be non-empty");
    if (!(p_active >= 0.0 && p_active <= 1.0)) {
        throw ValidationError("sweep: p_active must lie in [0, 1]");
    }
    if (!(sigma2 >= 0.0)) throw ValidationError("sweep: sigma2 must be non-negative");
    if (schemes.empty()) throw ValidationError("sweep: schemes must be non-empty");
    for (const std::string& s : schemes) {
        if (s != "alg" && s != "always_on" && s != "prob_on") {
            throw ValidationError("sweep: unknown scheme \"" + s + "\"");
        }
    }
    base.validate();
}

Scenario generate_scenario(const Scenario& base, double lambda0, double sigma2,
                           std::uint64_t seed) {
    const double half_width = std::sqrt(3.0 * sigma2);
    const double lo = 50.0 * lambda0 - half_width;
    const double hi = 50.0 * lambda0 + half_width;
    if (!(lo > 0.0)) {
        throw ValidationError("generate_scenario: density range reaches zero; "
                              "lower sigma2 or raise lambda0");
    }
    Scenario s = base;
    s.lambda0_per_m2 = lambda0;
    Rng rng = Rng::substream(seed, kDensityStream);
    for (double& lam : s.lambdas_per_m2) lam = rng.uniform(lo, hi);
    s.validate();
    return s;
}

std::pair<Scenario, double> admission_control(const Scenario& s, const OperationMode& m) {
    const Evaluation before = evaluate(s, m);
    if (before.feasible) {
        throw std::logic_error("admission_control: mode is already feasible");
    }
    const auto thinned = [&](double a) {
        Scenario scaled = s;
        scaled.lambda0_per_m2 *= a;
        for (std::size_t i = 0; i < scaled.lambdas_per_m2.size(); ++i) {
            if (!m.active(i)) scaled.lambdas_per_m2[i] *= a;
        }
        return scaled;
    };
    const double cap = s.power.p_t_max_w;
    double lo = 0.0;
    double hi = 1.0;
    double p_lo = 0.0;
    for (int it = 0; it < 200 && cap - p_lo > 1e-6; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double p_mid = evaluate(thinned(mid), m).p_t_w;
        if (p_mid > cap) {
            hi = mid;
        } else {
            lo = mid;
            p_lo = p_mid;
        }
    }
    return {thinned(lo), lo};
}

namespace {

SweepRow make_row(const Scenario& sc, const OperationMode& mode, const Evaluation& ev,
                  double lambda0, std::uint64_t seed, const std::string& scheme,
                  bool feasible_before, double admitted) {
    SweepRow row;
    row.lambda0 = lambda0;
    row.seed = seed;
    row.scheme = scheme;
    row.estimator = "sampled";
    row.u_pt_w = sc.power.u_slope * ev.p_t_w;
    row.p_mbs_w = sc.power.p_base_w + row.u_pt_w;
    row.p_sbs_w = static_cast<double>(sc.cell_count()) * sc.power.p_sbs_sleep_w +
                  static_cast<double>(mode.count_active()) * sc.power.delta_p_w();
    row.p_het_w = ev.p_het_w;
    row.feasible_before_admission = feasible_before;
    row.admitted_fraction = admitted;
    row.n_active = static_cast<long long>(mode.count_active());
    return row;
}

// Evaluates a fixed mode, thinning the users first when it breaks the cap.
SweepRow run_fixed_mode(const Scenario& sc, const OperationMode& mode, double lambda0,
                        std::uint64_t seed, const std::string& scheme) {
    const Evaluation ev = evaluate(sc, mode);
    if (ev.feasible) {
        return make_row(sc, mode, ev, lambda0, seed, scheme, true, 1.0);
    }
    const auto [thinned, a] = admission_control(sc, mode);
    return make_row(thinned, mode, evaluate(thinned, mode), lambda0, seed, scheme, false, a);
}

SweepRow run_alg(const Scenario& sc, double lambda0, std::uint64_t seed) {
    try {
        if (is_uniform(sc)) {
            const UniformSolution sol = solve_uniform(sc);
            return make_row(sc, sol.mode, sol.eval, lambda0, seed, "alg", true, 1.0);
        }
        const Candidate cand = solve_nonuniform(sc);
        return make_row(sc, cand.mode, cand.eval, lambda0, seed, "alg", true, 1.0);
    } catch (const InfeasibleScenario&) {
        // Thin to the cap with everything active; with the cap binding no
        // deactivation can help, so all-on is the solution afterwards.
        const OperationMode all_on = OperationMode::all_on(sc.cell_count());
        const auto [thinned, a] = admission_control(sc, all_on);
        return make_row(thinned, all_on, evaluate(thinned, all_on), lambda0, seed, "alg",
                        false, a);
    }
}

SweepRow run_prob_on(const Scenario& sc, double lambda0, std::uint64_t seed, double p_active) {
    Rng rng = Rng::substream(seed, kActivationStream);
    OperationMode mode = OperationMode::all_on(sc.cell_count());
    for (std::size_t i = 0; i < sc.cell_count(); ++i) {
        mode.set(i, rng.u01() < p_active);
    }
    return run_fixed_mode(sc, mode, lambda0, seed, "prob_on");
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t m_cells = spec.base.cell_count();

    // Independent cells, run on a small worker pool and written to fixed
    // slots so scheduling never changes the output.
    std::vector<std::function<SweepRow()>> tasks;
    for (double lambda0 : spec.lambda0_grid) {
        // All-on feasibility depends only on lambda0, not on the seed.
        const Scenario probe =
            generate_scenario(spec.base, lambda0, spec.sigma2, spec.seeds.front());
        const bool all_on_feasible =
            evaluate(probe, OperationMode::all_on(m_cells)).feasible;
        for (const std::string& scheme : spec.schemes) {
            if (scheme == "prob_on" && !all_on_feasible) {
                // Cap binding for every activation draw, so the expected
                // total has a closed form.
                tasks.push_back([&spec, lambda0, m_cells] {
                    SweepRow row;
                    row.lambda0 = lambda0;
                    row.seed = 0;
                    row.scheme = "prob_on";
                    row.estimator = "expectation";
                    row.u_pt_w = spec.base.power.u_slope * spec.base.power.p_t_max_w;
                    row.p_mbs_w = spec.base.power.p_base_w + row.u_pt_w;
                    row.p_sbs_w =
                        static_cast<double>(m_cells) * spec.base.power.p_sbs_sleep_w +
                        static_cast<double>(m_cells) * spec.p_active *
                            spec.base.power.delta_p_w();
                    row.p_het_w = row.p_mbs_w + row.p_sbs_w;
                    row.feasible_before_admission = false;
                    row.admitted_fraction = -1.0;
                    row.n_active = -1;
                    return row;
                });
            }
            for (std::uint64_t seed : spec.seeds) {
                tasks.push_back([&spec, scheme, lambda0, seed, m_cells] {
                    const Scenario sc =
                        generate_scenario(spec.base, lambda0, spec.sigma2, seed);
                    if (scheme == "alg") return run_alg(sc, lambda0, seed);
                    if (scheme == "always_on") {
                        return run_fixed_mode(sc, OperationMode::all_on(m_cells), lambda0,
                                              seed, "always_on");
                    }
                    return run_prob_on(sc, lambda0, seed, spec.p_active);
                });
            }
        }
    }

    std::vector<SweepRow> rows(tasks.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_workers =
        static_cast<unsigned>(std::min<std::size_t>(hw, tasks.size()));
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) rows[i] = tasks[i]();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < tasks.size(); i += n_workers) {
                    rows[i] = tasks[i]();
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.lambda0 != b.lambda0) return a.lambda0 < b.lambda0;
        if (a.scheme != b.scheme) return a.scheme < b.scheme;
        if (a.estimator != b.estimator) return a.estimator < b.estimator;
        return a.seed < b.seed;
    });
    return rows;
}

std::string sweep_csv_header() {
    return "lambda0,seed,scheme,estimator,p_het_w,p_mbs_w,u_pt_w,p_sbs_w,"
           "feasible_before_admission,admitted_fraction,n_active";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << sweep_csv_header() << "\n";
    for (const SweepRow& r : rows) {
        os << fmt6(r.lambda0) << ',' << r.seed << ',' << r.scheme << ',' << r.estimator
           << ',' << fmt6(r.p_het_w) << ',' << fmt6(r.p_mbs_w) << ',' << fmt6(r.u_pt_w)
           << ',' << fmt6(r.p_sbs_w) << ',' << (r.feasible_before_admission ? 1 : 0) << ','
           << fmt6(r.admitted_fraction) << ',' << r.n_active << "\n";
    }
    return os.str();
}

std::vector<Table2Row> table2_benchmark(const SweepSpec& spec) {
    spec.validate();
    if (spec.base.cell_count() > 24) {
        throw TooLarge("table2_benchmark: exhaustive oracle capped at 24 cells");
    }
    std::vector<Table2Row> rows;
    for (double lambda0 : spec.lambda0_grid) {
        Table2Row row;
        row.lambda0 = lambda0;
        row.n_seeds = spec.seeds.size();
        double sum = 0.0;
        double lo = 2.0;
        double hi = 0.0;
        for (std::uint64_t seed : spec.seeds) {
            const Scenario sc = generate_scenario(spec.base, lambda0, spec.sigma2, seed);
            const auto [opt_mode, opt_eval] = exhaustive_search(sc);
            const Candidate cand = solve_nonuniform(sc);
            const double ratio = opt_eval.p_het_w / cand.eval.p_het_w;
            sum += ratio;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        row.mean_ratio = sum / static_cast<double>(spec.seeds.size());
        row.min_ratio = lo;
        row.max_ratio = hi;
        rows.push_back(row);
    }
    return rows;
}

std::string table2_csv(const std::vector<Table2Row>& rows) {
    std::ostringstream os;
    os << "lambda0,n_seeds,mean_ratio,min_ratio,max_ratio\n";
    for (const Table2Row& r : rows) {
        os << fmt6(r.lambda0) << ',' << r.n_seeds << ',' << fmt6(r.mean_ratio) << ','
           << fmt6(r.min_ratio) << ',' << fmt6(r.max_ratio) << "\n";
    }
    return os.str();
}

namespace {

Scenario reference_parameters(Scenario s) {
    s.channel = ChannelParams::from_db(-35.0, 1.0, 2.5, -174.0, 1.0);
    s.qos = {0.1e6, 0.05, 10e6};
    s.power = {712.0, 14.5, 40.0, 10.0, 3.0};
    return s;
}

}  // namespace

Scenario default_grid_scenario() {
    Scenario s;
    s.r_macro_m = 500.0;
    s.r_small_m = 20.0;
    const int side = 12;
    const double pitch = 60.0;
    for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) {
            const double x = (static_cast<double>(i) - (side - 1) / 2.0) * pitch;
            const double y = (static_cast<double>(j) - (side - 1) / 2.0) * pitch;
            s.sbs_positions_m.push_back({x, y});
        }
    }
    s.lambda0_per_m2 = 1e-3;
    s.lambdas_per_m2.assign(s.sbs_positions_m.size(), 50e-3);
    s = reference_parameters(std::move(s));
    s.validate();
    return s;
}

Scenario random_layout_scenario(std::size_t m_cells, std::uint64_t layout_seed,
                                double r_macro_m, double r_small_m) {
    Scenario s;
    s.r_macro_m = r_macro_m;
    s.r_small_m = r_small_m;
    Rng rng = Rng::substream(layout_seed, 0);
    const double reach = r_macro_m - 1.05 * r_small_m;
    const double min_gap = 2.1 * r_small_m;
    int attempts = 0;
    while (s.sbs_positions_m.size() < m_cells) {
        if (++attempts > 200000) {
            throw ValidationError("random_layout_scenario: cannot pack that many cells");
        }
        const double rr = reach * std::sqrt(rng.u01());
        const double ph = 2.0 * std::numbers::pi * rng.u01();
        const Point p{rr * std::cos(ph), rr * std::sin(ph)};
        bool ok = true;
        for (const Point& q : s.sbs_positions_m) {
            if (std::hypot(p.x - q.x, p.y - q.y) < min_gap) {
                ok = false;
                break;
            }
        }
        if (ok) s.sbs_positions_m.push_back(p);
    }
    s.lambda0_per_m2 = 1e-3;
    s.lambdas_per_m2.assign(m_cells, 50e-3);
    s = reference_parameters(std::move(s));
    s.validate();
    return s;
}

namespace {

using nlohmann::json;

}  // namespace

SweepSpec sweep_spec_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("sweep spec: ") + e.what());
    }
    SweepSpec spec;
    try {
        spec.lambda0_grid = j.at("lambda0_grid").get<std::vector<double>>();
        spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("sigma2")) spec.sigma2 = j.at("sigma2").get<double>();
        if (j.contains("schemes")) {
            spec.schemes = j.at("schemes").get<std::vector<std::string>>();
        } else {
            spec.schemes = {"alg", "always_on", "prob_on"};
        }
        if (j.contains("p_active")) spec.p_active = j.at("p_active").get<double>();

        if (j.contains("base_scenario")) {
            const json& base = j.at("base_scenario");
            if (base.is_string()) {
                spec.base = load_scenario(base.get<std::string>());
            } else {
                spec.base = scenario_from_json_text(base.dump());
            }
        } else if (j.contains("random_layout")) {
            const json& rl = j.at("random_layout");
            spec.base = random_layout_scenario(
                rl.at("m_cells").get<std::size_t>(), rl.at("layout_seed").get<std::uint64_t>(),
                rl.value("r_macro_m", 500.0), rl.value("r_small_m", 20.0));
        } else {
            spec.base = default_grid_scenario();
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("sweep spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("sweep spec: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return sweep_spec_from_json_text(buf.str());
}

}  // namespace hetsleep
