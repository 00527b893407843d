#include "hetsleep/nonuniform.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "hetsleep/bisect.hpp"

namespace hetsleep {

namespace {

void check_cell(const Scenario& s, std::size_t m) {
    if (m >= s.cell_count()) throw std::invalid_argument("cell index out of range");
}

void check_load(const ModelTerms& t, double load) {
    if (load < 0.0 || load > t.sum_cell_load * (1.0 + 1e-12) + 1e-12) {
        throw std::invalid_argument("handover load outside [0, sum lambda_m pi Rs^2]");
    }
}

double phat_terms(const ModelTerms& t, double load) {
    const double x = t.base_load + load;
    if (x == 0.0) throw DegenerateLoad("phat: zero expected macro load");
    return t.f_of_load(x) * t.upsilon;
}

double delta_m_terms(const ModelTerms& t, std::size_t m, double load) {
    const double x = t.base_load + load;
    if (x == 0.0) throw DegenerateLoad("delta_m: zero expected macro load");
    return t.delta_p_w - t.f_of_load(x) * t.cell_geom[m];
}

double q_terms(const ModelTerms& t, std::size_t m, double load) {
    return delta_m_terms(t, m, load) / t.cell_load[m];
}

// Per-cell density thresholds. A cell is compared against the marginal MBS
// cost of absorbing its users at the extreme handover loads: every other
// cell sleeping (upper bound, decides forced-off) or every other cell
// active (lower bound, decides forced-on). Both right sides grow from 0 to
// infinity in the candidate density, giving a unique root.
double cell_threshold_off(const ModelTerms& t, std::size_t m) {
    double others_load = 0.0;
    double others_geom = 0.0;
    for (std::size_t n = 0; n < t.cells(); ++n) {
        if (n == m) continue;
        others_load += t.cell_load[n];
        others_geom += t.cell_geom[n];
    }
    const double base = t.base_load + others_load;
    const double area = t.area_small_m2;
    const double da = t.dist_alpha[m];
    if (!std::isfinite(t.f_of_load(base))) {
        // The marginal macro cost already overflows at this base load, so
        // no positive density makes sleeping worthwhile.
        return 0.0;
    }
    const auto lhs = [&](double lam) {
        const double f_hi = t.f_of_load(base + lam * area);
        const double f_lo = t.f_of_load(base);
        return (t.upsilon + others_geom + lam * area * da) * (f_hi - f_lo) +
               f_lo * lam * area * da;
    };
    BisectOptions opt;
    opt.rel_tol = 1e-12;
    return bisect_increasing_from([&](double lam) { return lhs(lam) - t.delta_p_w; },
                                  1e-12, 1e-6, 1e30, opt);
}

double cell_threshold_on(const ModelTerms& t, std::size_t m) {
    const double area = t.area_small_m2;
    const double da = t.dist_alpha[m];
    if (!std::isfinite(t.f_of_load(t.base_load))) return 0.0;
    const auto lhs = [&](double lam) {
        const double f_hi = t.f_of_load(t.base_load + lam * area);
        const double f_lo = t.f_of_load(t.base_load);
        return t.upsilon * (f_hi - f_lo) + f_hi * lam * area * da;
    };
    BisectOptions opt;
    opt.rel_tol = 1e-12;
    return bisect_increasing_from([&](double lam) { return lhs(lam) - t.delta_p_w; },
                                  1e-12, 1e-6, 1e30, opt);
}

std::vector<SwitchingPoint> switching_points_impl(const ModelTerms& t,
                                                  const std::vector<std::size_t>& cells,
                                                  double l_lo, double l_hi) {
    std::vector<SwitchingPoint> pts;
    if (l_hi <= l_lo) return pts;
    constexpr int kGrid = 64;
    for (std::size_t a = 0; a < cells.size(); ++a) {
        for (std::size_t b = a + 1; b < cells.size(); ++b) {
            const std::size_t m = cells[a];
            const std::size_t n = cells[b];
            const auto diff = [&](double load) {
                return q_terms(t, m, load) - q_terms(t, n, load);
            };
            // Grid pre-scan. The efficiency difference is monotone in the
            // load, so more than one crossing signals numerical trouble.
            int crossings = 0;
            double prev_load = l_lo;
            double prev_val = diff(l_lo);
            for (int g = 1; g <= kGrid; ++g) {
                const double load =
                    l_lo + (l_hi - l_lo) * static_cast<double>(g) / kGrid;
                const double val = diff(load);
                if ((prev_val < 0.0 && val > 0.0) || (prev_val > 0.0 && val < 0.0)) {
                    ++crossings;
                    BisectOptions opt;
                    opt.abs_tol = 1e-9;
                    opt.max_iter = 300;
                    pts.push_back({m, n, bisect(diff, prev_load, load, opt)});
                }
                prev_load = load;
                prev_val = val;
            }
            if (crossings > 1) {
                std::cerr << "switching_points: cells " << m << " and " << n
                          << " cross " << crossings
                          << " times; emitting every detected root\n";
            }
        }
    }
    std::sort(pts.begin(), pts.end(), [](const SwitchingPoint& x, const SwitchingPoint& y) {
        if (x.load_l != y.load_l) return x.load_l < y.load_l;
        if (x.m != y.m) return x.m < y.m;
        return x.n < y.n;
    });
    return pts;
}

}  // namespace

double phat(const Scenario& s, double handover_load) {
    const ModelTerms t = ModelTerms::from(s);
    check_load(t, handover_load);
    return phat_terms(t, handover_load);
}

double delta_m(const Scenario& s, std::size_t m, double handover_load) {
    check_cell(s, m);
    const ModelTerms t = ModelTerms::from(s);
    check_load(t, handover_load);
    return delta_m_terms(t, m, handover_load);
}

double power_saving_efficiency(const Scenario& s, std::size_t m, double handover_load) {
    check_cell(s, m);
    const ModelTerms t = ModelTerms::from(s);
    check_load(t, handover_load);
    return q_terms(t, m, handover_load);
}

RegimeClassification classify_regimes(const Scenario& s) {
    const ModelTerms t = ModelTerms::from(s);
    RegimeClassification reg;
    reg.lambda_th_off.resize(t.cells());
    reg.lambda_th_on.resize(t.cells());
    for (std::size_t m = 0; m < t.cells(); ++m) {
        reg.lambda_th_off[m] = cell_threshold_off(t, m);
        reg.lambda_th_on[m] = cell_threshold_on(t, m);
        const double lam = s.lambdas_per_m2[m];
        if (lam < reg.lambda_th_off[m]) {
            reg.forced_off.push_back(m);
        } else if (lam > reg.lambda_th_on[m]) {
            reg.forced_on.push_back(m);
        } else {
            reg.free.push_back(m);
        }
    }
    return reg;
}

std::vector<SwitchingPoint> switching_points(const Scenario& s) {
    const ModelTerms t = ModelTerms::from(s);
    std::vector<std::size_t> cells(t.cells());
    std::iota(cells.begin(), cells.end(), 0);
    return switching_points_impl(t, cells, 0.0, t.sum_cell_load);
}

std::vector<SwitchingPoint> switching_points(const Scenario& s,
                                             const std::vector<std::size_t>& cells,
                                             double l_lo, double l_hi) {
    const ModelTerms t = ModelTerms::from(s);
    for (std::size_t m : cells) check_cell(s, m);
    check_load(t, l_lo);
    check_load(t, l_hi);
    return switching_points_impl(t, cells, l_lo, l_hi);
}

namespace {

// Running best over candidate modes. The final winner is re-evaluated
// through the public path before being returned.
struct BestTracker {
    bool has = false;
    double p_het = 0.0;
    OperationMode mode;
    long long list_id = -1;

    void offer(double cand_p_het, const OperationMode& cand, long long id) {
        if (!has || cand_p_het < p_het) {
            has = true;
            p_het = cand_p_het;
            mode = cand;
            list_id = id;
        }
    }
};

}  // namespace

Candidate solve_nonuniform(const Scenario& s) {
    const std::size_t m_cells = s.cell_count();
    const ModelTerms t = ModelTerms::from(s);

    const OperationMode all_on = OperationMode::all_on(m_cells);
    const Evaluation ev_on = evaluate(s, all_on);
    if (!ev_on.feasible) {
        throw InfeasibleScenario("solve_nonuniform: all-on mode exceeds the MBS transmit cap");
    }

    Candidate best{all_on, ev_on, -1};

    const RegimeClassification reg = classify_regimes(s);

    OperationMode base_mode = all_on;
    double l_base = 0.0;
    double geom_base = 0.0;
    for (std::size_t m : reg.forced_off) {
        base_mode.set(m, false);
        l_base += t.cell_load[m];
        geom_base += t.cell_geom[m];
    }
    const auto consider_eval = [&](const OperationMode& mode, long long id) {
        const Evaluation ev = evaluate(s, mode);
        if (ev.feasible && ev.p_het_w < best.eval.p_het_w) best = Candidate{mode, ev, id};
    };
    if (!reg.forced_off.empty()) consider_eval(base_mode, -2);

    if (reg.free.empty()) return best;

    double l_total = l_base;
    for (std::size_t m : reg.free) l_total += t.cell_load[m];

    const std::vector<SwitchingPoint> pts = switching_points_impl(t, reg.free, l_base, l_total);

    // Interval boundaries over the reachable handover load.
    std::vector<double> bounds;
    bounds.push_back(l_base);
    for (const SwitchingPoint& p : pts) bounds.push_back(p.load_l);
    bounds.push_back(l_total);

    // Power-saving list, highest efficiency first, ties by cell index.
    std::vector<std::size_t> list = reg.free;
    const auto sort_by_q_at = [&](double load) {
        std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
            return q_terms(t, a, load) > q_terms(t, b, load);
        });
    };
    sort_by_q_at(l_base);

    BestTracker tracker;
    const double base_off_count = static_cast<double>(reg.forced_off.size());
    const double p_fixed = s.power.p_base_w +
                           static_cast<double>(m_cells) * s.power.p_sbs_sleep_w +
                           static_cast<double>(m_cells) * t.delta_p_w;

    // Walks the prefixes of the current list, evaluating candidates whose
    // cumulative handover load falls inside [lo, hi] (boundaries inclusive
    // on both sides, so boundary prefixes belong to both intervals). A
    // negative lo admits every prefix.
    OperationMode scratch = base_mode;
    const auto scan_prefixes = [&](double lo, double hi, long long id) {
        double mu = t.base_load + l_base;
        double z_num = t.upsilon + geom_base;
        double off_count = base_off_count;
        scratch = base_mode;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::size_t m = list[i];
            mu += t.cell_load[m];
            z_num += t.cell_geom[m];
            off_count += 1.0;
            scratch.set(m, false);
            const double load = mu - t.base_load;
            if (load < lo) continue;
            if (load > hi) break;
            const double p_t = t.traffic(mu) * z_num / (t.r0_alpha * mu);
            if (p_t > t.p_t_max_w) continue;
            const double p_het = p_fixed + s.power.u_slope * p_t -
                                 off_count * t.delta_p_w;
            tracker.offer(p_het, scratch, id);
        }
    };

    // Every prefix of the initial list is always admitted as a candidate;
    // the interval-gated scans below follow per list.
    scan_prefixes(-1.0, l_total, 0);

    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        if (k > 0) {
            // Entering interval k: apply switching point k-1.
            const SwitchingPoint& sw = pts[k - 1];
            const auto it_m = std::find(list.begin(), list.end(), sw.m);
            const auto it_n = std::find(list.begin(), list.end(), sw.n);
            if (it_m != list.end() && it_n != list.end() &&
                std::abs(std::distance(it_m, it_n)) == 1) {
                std::iter_swap(it_m, it_n);
            } else {
                // Coincident switching loads can leave the pair apart;
                // rebuild the order at the midpoint of this interval.
                sort_by_q_at(0.5 * (bounds[k] + bounds[k + 1]));
            }
        }
        scan_prefixes(bounds[k], bounds[k + 1], static_cast<long long>(k));
    }

    if (tracker.has) {
        const Evaluation ev = evaluate(s, tracker.mode);
        if (ev.feasible && ev.p_het_w < best.eval.p_het_w) {
            best = Candidate{tracker.mode, ev, tracker.list_id};
        }
    }
    return best;
}

}  // namespace hetsleep
