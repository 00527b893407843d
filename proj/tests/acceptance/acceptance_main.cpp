// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Workloads are sized for a single-core runner; every tolerance is pinned
// here, not in a config.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "hetsleep/harness.hpp"
#include "hetsleep/nonuniform.hpp"
#include "hetsleep/rng.hpp"
#include "hetsleep/uniform.hpp"
#include "hetsleep/validation.hpp"

using namespace hetsleep;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int g_failures = 0;

void report(const char* name, const Outcome& o, double seconds) {
    std::printf("[%s] %s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", name, seconds,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++g_failures;
}

template <class Fn>
void run(const char* name, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(name, o, secs);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

Scenario reference_params(Scenario s) {
    s.channel = ChannelParams::from_db(-35.0, 1.0, 2.5, -174.0, 1.0);
    s.qos = {0.1e6, 0.05, 10e6};
    s.power = {712.0, 14.5, 40.0, 10.0, 3.0};
    return s;
}

std::vector<Point> layout(Rng& rng, std::size_t m_cells, double r_macro, double r_small,
                          double d_min) {
    std::vector<Point> pts;
    const double reach = r_macro - 1.05 * r_small;
    while (pts.size() < m_cells) {
        const double d = std::sqrt(rng.uniform(d_min * d_min, reach * reach));
        const double ph = rng.uniform(0.0, 2.0 * 3.141592653589793);
        const Point p{d * std::cos(ph), d * std::sin(ph)};
        bool ok = true;
        for (const Point& q : pts) {
            if (std::hypot(p.x - q.x, p.y - q.y) < 2.1 * r_small) ok = false;
        }
        if (ok) pts.push_back(p);
    }
    return pts;
}

// Small-radius scenarios keep the expected user count low enough for 1e6
// Monte-Carlo draws per scenario on one core. The cell radius stays well
// under the macro radius so the closed form's flat-disc shortcut (whose
// absolute error grows like Rs^4 d^{alpha-2}) stays far below the
// Monte-Carlo standard error.
Scenario mc_random_scenario(Rng& rng) {
    Scenario s;
    s.r_macro_m = 200.0;
    s.r_small_m = 6.0;
    s.sbs_positions_m = layout(rng, 4, s.r_macro_m, s.r_small_m, 50.0);
    s.lambda0_per_m2 = rng.uniform(2e-4, 3e-4);
    s.lambdas_per_m2.resize(4);
    for (double& lam : s.lambdas_per_m2) lam = rng.uniform(1e-3, 5e-3);
    s = reference_params(std::move(s));
    s.validate();
    return s;
}

Scenario uniform_random_scenario(Rng& rng, std::size_t m_cells) {
    Scenario s;
    s.r_macro_m = 140.0;
    s.r_small_m = 15.0;
    s.sbs_positions_m = layout(rng, m_cells, s.r_macro_m, s.r_small_m, 0.0);
    const double lam = 1e-2 * std::exp(rng.u01() * std::log(4.5));
    s.lambda0_per_m2 = lam;
    s.lambdas_per_m2.assign(m_cells, lam);
    s = reference_params(std::move(s));
    s.validate();
    return s;
}

Scenario nonuniform_random_scenario(Rng& rng, std::size_t m_cells) {
    Scenario s;
    s.r_macro_m = 200.0;
    s.r_small_m = 8.0;
    s.sbs_positions_m = layout(rng, m_cells, s.r_macro_m, s.r_small_m, 0.0);
    const double lam = 1e-4 * std::exp(rng.u01() * std::log(12.0));
    s.lambda0_per_m2 = lam;
    s.lambdas_per_m2.resize(m_cells);
    for (double& v : s.lambdas_per_m2) {
        v = lam * 5.0 * std::exp(rng.u01() * std::log(40.0));
    }
    s = reference_params(std::move(s));
    s.validate();
    return s;
}

// C1: Monte-Carlo transmit power vs the analytic product, 10 scenarios,
// 1e6 draws, within 3 standard errors and 1% relative.
Outcome c1_theorem1_monte_carlo() {
    Rng rng(101);
    double worst_sigmas = 0.0;
    double worst_rel = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Scenario s = mc_random_scenario(rng);
        OperationMode mode = OperationMode::all_on(4);
        for (std::size_t m = 0; m < 4; ++m) mode.set(m, rng.u01() < 0.5);
        const McReport rep = monte_carlo_validate(s, mode, 1000000, 1000 + i);
        const double gap = std::fabs(rep.p_t_empirical_mean_w - rep.p_t_analytic_w);
        const double sigmas = rep.std_error_w > 0.0 ? gap / rep.std_error_w : 0.0;
        const double rel = gap / rep.p_t_analytic_w;
        worst_sigmas = std::max(worst_sigmas, sigmas);
        worst_rel = std::max(worst_rel, rel);
        if (sigmas > 3.0 || rel > 0.01) {
            return {false, fmt("scenario %g: gap = %.2f se, rel = %.3f%%",
                               static_cast<double>(i), sigmas, rel * 100.0)};
        }
    }
    return {true, fmt("worst gap = %.2f se, worst rel = %.4f%%", worst_sigmas,
                      worst_rel * 100.0)};
}

// C2: per-user outage equals 0.05 within +-0.005 at 1e5 fading draws.
Outcome c2_outage() {
    Rng rng(202);
    Scenario s;
    s.r_macro_m = 500.0;
    s.r_small_m = 20.0;
    s.sbs_positions_m = {{100.0, 0.0}, {0.0, 200.0}, {-300.0, 0.0}, {0.0, -400.0}};
    s.lambda0_per_m2 = 1e-3;
    s.lambdas_per_m2 = {5e-2, 2e-2, 1e-2, 5e-3};
    s = reference_params(std::move(s));
    s.validate();

    double worst = 0.0;
    for (int i = 0; i < 12; ++i) {
        const double r = rng.uniform(0.0, s.r_macro_m);
        const std::uint64_t k = 1 + rng.poisson(rng.uniform(5.0, 900.0));
        const double outage = outage_for_user(s, r, k, 100000, 300 + i);
        worst = std::max(worst, std::fabs(outage - 0.05));
        if (std::fabs(outage - 0.05) > 0.005) {
            return {false, fmt("r = %.0f m, K = %.0f: outage %.4f", r,
                               static_cast<double>(k), outage)};
        }
    }
    return {true, fmt("12 users, worst |outage - 0.05| = %.4f", worst)};
}

// C3: the distance-prefix solver equals the 2^M oracle on 200 uniform
// scenarios, and every oracle optimum has the off-cells-nearest structure.
Outcome c3_uniform_optimality() {
    Rng rng(303);
    int done = 0;
    int interior = 0;
    double worst_rel = 0.0;
    while (done < 200) {
        const Scenario s = uniform_random_scenario(rng, 4 + done % 11);
        if (!evaluate(s, OperationMode::all_on(s.cell_count())).feasible) continue;
        const UniformSolution sol = solve_uniform(s);
        const auto [opt_mode, opt_eval] = exhaustive_search(s);
        const double rel = std::fabs(sol.eval.p_het_w - opt_eval.p_het_w) /
                           opt_eval.p_het_w;
        worst_rel = std::max(worst_rel, rel);
        if (rel > 1e-9) {
            return {false, fmt("instance %g: relative power gap %.2e",
                               static_cast<double>(done), rel)};
        }
        // Prefix structure in distance order: no sleeping cell may follow
        // an active one.
        const std::vector<double> d = sbs_distances(s);
        std::vector<std::size_t> order(s.cell_count());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
        bool seen_active = false;
        for (std::size_t idx : order) {
            if (opt_mode.active(idx)) {
                seen_active = true;
            } else if (seen_active) {
                return {false, fmt("instance %g: oracle optimum is not a distance prefix",
                                   static_cast<double>(done))};
            }
        }
        if (sol.m_th > 0 && sol.m_th < s.cell_count()) ++interior;
        ++done;
    }
    return {true, fmt("200 instances, worst rel gap %.1e, %g interior stops", worst_rel,
                      static_cast<double>(interior))};
}

// C4: the heuristic stays within 1% of the oracle on the M = 20 benchmark
// grid (20 seeds per density; sigma2 = 1e-5, documented in the README).
Outcome c4_ratio_benchmark() {
    SweepSpec spec;
    spec.base = random_layout_scenario(20, 42, 500.0, 20.0);
    spec.lambda0_grid = {2e-4, 4e-4, 6e-4, 8e-4, 1e-3, 1.2e-3, 1.4e-3, 1.6e-3};
    spec.seeds.resize(20);
    std::iota(spec.seeds.begin(), spec.seeds.end(), 1);
    spec.sigma2 = 1e-5;
    spec.schemes = {"alg"};
    const std::vector<Table2Row> rows = table2_benchmark(spec);
    double worst_mean = 1.0;
    for (const Table2Row& r : rows) {
        worst_mean = std::min(worst_mean, r.mean_ratio);
        if (r.mean_ratio < 0.99) {
            return {false,
                    fmt("lambda0 = %.1e: mean ratio %.4f < 0.99", r.lambda0, r.mean_ratio)};
        }
        if (r.max_ratio > 1.0 + 1e-12) {
            return {false, fmt("lambda0 = %.1e: ratio above one (%.6f)", r.lambda0,
                               r.max_ratio)};
        }
    }
    return {true, fmt("8 grid points x 20 seeds, worst mean ratio %.4f", worst_mean)};
}

// C5: closed-form totals in the overloaded regime with the 12 x 12 grid.
Outcome c5_reference_constants() {
    SweepSpec spec;
    spec.base = default_grid_scenario();
    spec.lambda0_grid = {6e-3};
    spec.seeds = {4};
    spec.sigma2 = 1e-6;
    spec.schemes = {"alg", "always_on", "prob_on"};
    spec.p_active = 0.7;
    const std::vector<SweepRow> rows = run_sweep(spec);

    double err = 0.0;
    bool saw_on = false, saw_alg = false, saw_exp = false;
    for (const SweepRow& r : rows) {
        if (r.scheme == "always_on") {
            saw_on = true;
            err = std::max({err, std::fabs(r.p_het_w - 2732.0),
                            std::fabs(r.p_mbs_w - 1292.0), std::fabs(r.p_sbs_w - 1440.0)});
        } else if (r.scheme == "alg") {
            saw_alg = true;
            err = std::max(err, std::fabs(r.p_het_w - 2732.0));
        } else if (r.estimator == "expectation") {
            saw_exp = true;
            err = std::max(err, std::fabs(r.p_het_w - 2429.6));
        }
    }
    if (!(saw_on && saw_alg && saw_exp)) return {false, "missing scheme rows"};

    // Light-load end: the planner sleeps the whole tier at 3 W per cell.
    SweepSpec low = spec;
    low.lambda0_grid = {2e-5};
    low.sigma2 = 0.0;
    low.schemes = {"alg"};
    for (const SweepRow& r : run_sweep(low)) {
        if (r.n_active != 0) return {false, "light-load run kept cells active"};
        err = std::max(err, std::fabs(r.p_sbs_w - 432.0));
    }
    if (err > 0.1) return {false, fmt("worst constant error %.3f W", err)};
    return {true, fmt("2732 / 2429.6 / 1292 / 1440 / 432 W, worst error %.2e W", err)};
}

// C6: the all-off density threshold moves monotonically under +10%
// parameter bumps.
Outcome c6_threshold_monotonicity() {
    Rng rng(606);
    for (int i = 0; i < 20; ++i) {
        const Scenario s = nonuniform_random_scenario(rng, 3 + i % 6);
        const double base = threshold_lambda_off(s);

        Scenario v = s;
        v.channel = ChannelParams::from_db(v.channel.d_db, v.channel.r0_m, v.channel.alpha,
                                           v.channel.n0_dbm_hz + 10.0 * std::log10(1.1),
                                           v.channel.gamma_cap);
        if (threshold_lambda_off(v) > base) return {false, "rose with the noise density"};

        v = s;
        v.channel = ChannelParams::from_db(v.channel.d_db, v.channel.r0_m,
                                           v.channel.alpha * 1.1, v.channel.n0_dbm_hz,
                                           v.channel.gamma_cap);
        if (threshold_lambda_off(v) > base) {
            return {false, "rose with the path-loss exponent"};
        }

        v = s;
        v.qos.rate_bps *= 1.1;
        if (threshold_lambda_off(v) > base) return {false, "rose with the rate target"};

        v = s;
        v.qos.epsilon *= 1.1;
        if (threshold_lambda_off(v) < base) return {false, "fell with the outage budget"};

        v = s;
        v.qos.bandwidth_hz *= 1.1;
        if (threshold_lambda_off(v) < base) return {false, "fell with the bandwidth"};
    }
    return {true, "20 scenarios x 5 parameters, zero violations"};
}

// C7: the marginal macro cost strictly increases along the distance order.
Outcome c7_marginal_cost_monotone() {
    Rng rng(707);
    for (int i = 0; i < 100; ++i) {
        const Scenario s = uniform_random_scenario(rng, 3 + i % 10);
        double prev = delta_p_macro(s, 1);
        for (std::size_t m = 2; m <= s.cell_count(); ++m) {
            const double cur = delta_p_macro(s, m);
            if (!(cur > prev)) {
                return {false, fmt("instance %g: step %g does not increase",
                                   static_cast<double>(i), static_cast<double>(m))};
            }
            prev = cur;
        }
    }
    return {true, "100 scenarios, strictly increasing throughout"};
}

// C8: the network power rewrite through phat and the per-cell savings is
// exact to 1e-9 relative on 1000 random (scenario, mode) pairs.
Outcome c8_rewrite_identity() {
    Rng rng(808);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Scenario s = nonuniform_random_scenario(rng, 1 + i % 10);
        OperationMode mode = OperationMode::all_on(s.cell_count());
        for (std::size_t m = 0; m < s.cell_count(); ++m) mode.set(m, rng.u01() < 0.5);
        const ModelTerms t = ModelTerms::from(s);
        double load = 0.0;
        for (std::size_t m = 0; m < s.cell_count(); ++m) {
            if (!mode.active(m)) load += t.cell_load[m];
        }
        double savings = 0.0;
        for (std::size_t m = 0; m < s.cell_count(); ++m) {
            if (!mode.active(m)) savings += delta_m(s, m, load);
        }
        const double m_d = static_cast<double>(s.cell_count());
        const double fixed =
            s.power.p_base_w + m_d * s.power.p_sbs_sleep_w + m_d * s.power.delta_p_w();
        const double lhs = evaluate(s, mode).p_het_w - fixed;
        const double rhs = phat(s, load) - savings;
        const double rel = std::fabs(lhs - rhs) /
                           std::max({std::fabs(lhs), std::fabs(rhs), s.power.delta_p_w()});
        worst = std::max(worst, rel);
        if (rel > 1e-9) {
            return {false, fmt("pair %g: relative gap %.2e", static_cast<double>(i), rel)};
        }
    }
    return {true, fmt("1000 pairs, worst relative gap %.1e", worst)};
}

// C9: the flat-disc shortcut inside the closed-form efficiency factor is
// within 1% of the exact integral at Rs/R0 <= 0.05 and improves as the
// cells shrink.
Outcome c9_approximation_audit() {
    double prev = 1.0;
    std::string detail = "errors:";
    for (const double ratio : {0.1, 0.05, 0.01}) {
        Scenario s;
        s.r_macro_m = 200.0;
        s.r_small_m = ratio * s.r_macro_m;
        s.sbs_positions_m = {{80.0, 0.0}, {0.0, 120.0}, {-160.0, 0.0}, {90.0, 110.0}};
        s.lambda0_per_m2 = 5e-4;
        s.lambdas_per_m2 = {5e-3, 2e-3, 1e-3, 4e-3};
        s = reference_params(std::move(s));
        s.validate();
        const OperationMode mode = OperationMode::from_string("0100");
        const double z_exact = efficiency_factor_exact(s, mode);
        const double err = std::fabs(efficiency_factor(s, mode) - z_exact) / z_exact;
        detail += fmt(" %.2e", err);
        if (!(err < prev)) return {false, detail + " (not decreasing)"};
        if (ratio <= 0.05 && err > 0.01) return {false, detail + " (above 1%)"};
        prev = err;
    }
    return {true, detail};
}

// C10: a fixed-seed sweep emits byte-identical CSV twice.
Outcome c10_determinism() {
    SweepSpec spec;
    spec.base = random_layout_scenario(12, 91, 300.0, 15.0);
    spec.lambda0_grid = {2e-4, 6e-4, 1e-3};
    spec.seeds = {1, 2, 3};
    spec.sigma2 = 1e-6;
    spec.schemes = {"alg", "always_on", "prob_on"};
    spec.p_active = 0.7;
    const std::string a = sweep_csv(run_sweep(spec));
    const std::string b = sweep_csv(run_sweep(spec));
    if (a != b) return {false, "two runs differ"};
    const double rows = static_cast<double>(std::count(a.begin(), a.end(), '\n')) - 1.0;
    return {true, fmt("byte-identical CSV, %g rows", rows)};
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    run("C1 monte-carlo transmit power agreement (10 x 1e6 draws)", c1_theorem1_monte_carlo);
    run("C2 per-user outage pinned at epsilon", c2_outage);
    run("C3 uniform solver equals the exhaustive oracle (200 runs)", c3_uniform_optimality);
    run("C4 heuristic within 1% of the oracle, M = 20 grid", c4_ratio_benchmark);
    run("C5 closed-form power constants, M = 144 grid", c5_reference_constants);
    run("C6 all-off threshold parameter monotonicity", c6_threshold_monotonicity);
    run("C7 marginal macro cost increases with distance rank", c7_marginal_cost_monotone);
    run("C8 power rewrite identity, 1000 random pairs", c8_rewrite_identity);
    run("C9 closed-form efficiency approximation audit", c9_approximation_audit);
    run("C10 sweep determinism", c10_determinism);
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
