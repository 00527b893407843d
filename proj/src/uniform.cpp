#include "hetsleep/uniform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "hetsleep/bisect.hpp"

namespace hetsleep {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::size_t> distance_order(const Scenario& s) {
    std::vector<std::size_t> order(s.cell_count());
    std::iota(order.begin(), order.end(), 0);
    const std::vector<double> d = sbs_distances(s);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    return order;
}

// Density-threshold equations share this shape: the left side grows from 0
// to infinity in lambda, so the root is bracketed by doubling.
double solve_density_threshold(const std::function<double(double)>& lhs_minus_dp) {
    BisectOptions opt;
    opt.rel_tol = 1e-12;
    opt.max_iter = 200;
    return bisect_increasing_from(lhs_minus_dp, 1e-12, 1e-6, 1e30, opt);
}

}  // namespace

double f_helper(const Scenario& s, double expected_users) {
    return ModelTerms::from(s).f_of_load(expected_users);
}

double f_helper_limit0(const Scenario& s) { return ModelTerms::from(s).f_limit0(); }

double uniform_traffic_factor(const Scenario& s, const OperationMode& m) {
    const ModelTerms t = ModelTerms::from(s);
    const double h_active = static_cast<double>(m.count_active());
    const double area = kPi * (s.r_macro_m * s.r_macro_m - h_active * s.r_small_m * s.r_small_m);
    return t.traffic(s.lambda0_per_m2 * area);
}

double uniform_efficiency_factor(const Scenario& s, const OperationMode& m) {
    const ModelTerms t = ModelTerms::from(s);
    double sum_active_da = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.active(i)) sum_active_da += t.dist_alpha[i];
    }
    const double h_active = static_cast<double>(m.count_active());
    const double area = kPi * (s.r_macro_m * s.r_macro_m - h_active * s.r_small_m * s.r_small_m);
    return (t.macro_geom - t.area_small_m2 * sum_active_da) / (t.r0_alpha * area);
}

UniformSolution solve_uniform(const Scenario& s) {
    if (!is_uniform(s)) {
        throw std::invalid_argument("solve_uniform: user densities are not uniform");
    }
    const std::size_t m_cells = s.cell_count();
    const ModelTerms t = ModelTerms::from(s);

    UniformSolution sol;
    sol.order = distance_order(s);

    const Evaluation all_on_eval = evaluate(s, OperationMode::all_on(m_cells));
    if (!all_on_eval.feasible) {
        throw InfeasibleScenario("solve_uniform: all-on mode exceeds the MBS transmit cap");
    }

    // Transmit power after sleeping the k nearest cells, via the
    // uniform-density closed form. Area shrinks by one cell per step and the
    // active-set geometry sum loses the k-th nearest distance term.
    const double lambda0 = s.lambda0_per_m2;
    const double r0_alpha = t.r0_alpha;
    std::vector<double> p_t(m_cells + 1);
    {
        double sum_active_da = 0.0;
        for (std::size_t i = 0; i < m_cells; ++i) sum_active_da += t.dist_alpha[sol.order[i]];
        double area = t.area_rest_m2;  // pi (R0^2 - (M - k) Rs^2) at k = 0
        for (std::size_t k = 0; k <= m_cells; ++k) {
            const double z = (t.macro_geom - t.area_small_m2 * sum_active_da) /
                             (r0_alpha * area);
            p_t[k] = t.traffic(lambda0 * area) * z;
            if (k < m_cells) {
                area += t.area_small_m2;
                sum_active_da -= t.dist_alpha[sol.order[k]];
            }
        }
    }

    // m_th1: last prefix whose marginal MBS cost stays below the sleep
    // saving (equality stops). m_th2: last prefix within the transmit cap.
    sol.m_th1 = m_cells;
    for (std::size_t k = 1; k <= m_cells; ++k) {
        const double delta_p_macro_k = s.power.u_slope * (p_t[k] - p_t[k - 1]);
        if (delta_p_macro_k >= t.delta_p_w) {
            sol.m_th1 = k - 1;
            break;
        }
    }
    sol.m_th2 = m_cells;
    for (std::size_t k = 1; k <= m_cells; ++k) {
        if (p_t[k] > t.p_t_max_w) {
            sol.m_th2 = k - 1;
            break;
        }
    }
    sol.m_th = std::min(sol.m_th1, sol.m_th2);

    for (;;) {
        OperationMode mode = OperationMode::all_on(m_cells);
        for (std::size_t i = 0; i < sol.m_th; ++i) mode.set(sol.order[i], false);
        sol.eval = evaluate(s, mode);
        sol.mode = std::move(mode);
        if (sol.eval.feasible || sol.m_th == 0) break;
        --sol.m_th;  // boundary rounding between the two evaluation paths
    }
    return sol;
}

double threshold_lambda_off(const Scenario& s) {
    if (s.cell_count() == 0) {
        throw std::invalid_argument("threshold_lambda_off: scenario has no small cells");
    }
    const ModelTerms t = ModelTerms::from(s);
    const double r0 = s.r_macro_m;
    const double rs = s.r_small_m;
    const double d_max_alpha = *std::max_element(t.dist_alpha.begin(), t.dist_alpha.end());
    const auto lhs = [&](double lam) {
        const double f_all_off = t.f_of_load(lam * kPi * r0 * r0);
        const double f_one_on = t.f_of_load(lam * kPi * (r0 * r0 - rs * rs));
        return lam * t.macro_geom * (f_all_off - f_one_on) +
               lam * t.area_small_m2 * d_max_alpha * f_one_on;
    };
    return solve_density_threshold([&](double lam) { return lhs(lam) - t.delta_p_w; });
}

double threshold_lambda_on(const Scenario& s) {
    const std::size_t m_cells = s.cell_count();
    if (m_cells == 0) {
        throw std::invalid_argument("threshold_lambda_on: scenario has no small cells");
    }
    const ModelTerms t = ModelTerms::from(s);
    const std::vector<std::size_t> order = distance_order(s);
    const double d_min_alpha = t.dist_alpha[order.front()];
    double sum_far_da = 0.0;  // every sorted cell but the nearest
    for (std::size_t i = 1; i < m_cells; ++i) sum_far_da += t.dist_alpha[order[i]];

    const double r0 = s.r_macro_m;
    const double rs = s.r_small_m;
    const double m_d = static_cast<double>(m_cells);
    const auto lhs = [&](double lam) {
        const double f_one_off =
            t.f_of_load(lam * kPi * (r0 * r0 - (m_d - 1.0) * rs * rs));
        const double f_all_on = t.f_of_load(lam * kPi * (r0 * r0 - m_d * rs * rs));
        return (lam * t.macro_geom - lam * t.area_small_m2 * sum_far_da) *
                   (f_one_off - f_all_on) +
               f_all_on * lam * t.area_small_m2 * d_min_alpha;
    };
    return solve_density_threshold([&](double lam) { return lhs(lam) - t.delta_p_w; });
}

}  // namespace hetsleep
