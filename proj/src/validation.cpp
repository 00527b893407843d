#include "hetsleep/validation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hetsleep/rng.hpp"

namespace hetsleep {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxExhaustiveCells = 24;
constexpr std::uint64_t kMcChunks = 64;

unsigned worker_count(std::uint64_t work_items) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(hw, work_items));
}

// True when the bit pattern `a` is lexicographically smaller than `b` read
// as mode vectors (cell 0 = bit 0, 0 sorts before 1).
bool mask_lex_less(std::uint32_t a, std::uint32_t b) {
    const std::uint32_t diff = a ^ b;
    if (diff == 0) return false;
    const int idx = std::countr_zero(diff);
    return (a & (1u << idx)) == 0;
}

struct RangeBest {
    bool has = false;
    double p_het = 0.0;
    std::uint32_t mask = 0;
};

}  // namespace

std::string McReport::to_json_text() const {
    nlohmann::json j{{"p_t_analytic_w", p_t_analytic_w},
                     {"p_t_empirical_mean_w", p_t_empirical_mean_w},
                     {"std_error_w", std_error_w},
                     {"n_draws", n_draws},
                     {"outage_rate", outage_rate},
                     {"approx_error_z", approx_error_z}};
    return j.dump(2) + "\n";
}

std::pair<OperationMode, Evaluation> exhaustive_search(const Scenario& s) {
    const std::size_t m_cells = s.cell_count();
    if (m_cells > kMaxExhaustiveCells) {
        throw TooLarge("exhaustive_search: more than 24 cells");
    }
    const ModelTerms t = ModelTerms::from(s);
    const std::uint64_t n_modes = 1ull << m_cells;

    // Gray-code scan: successive modes differ in one cell, so the load and
    // geometry sums update in O(1) per mode. Bit set = cell sleeping.
    const auto scan_range = [&](std::uint64_t i0, std::uint64_t i1) {
        RangeBest best;
        std::uint32_t mask = static_cast<std::uint32_t>(i0 ^ (i0 >> 1));
        double mu = t.base_load;
        double z_num = t.upsilon;
        double h_active = static_cast<double>(m_cells);
        for (std::size_t m = 0; m < m_cells; ++m) {
            if (mask & (1u << m)) {
                mu += t.cell_load[m];
                z_num += t.cell_geom[m];
                h_active -= 1.0;
            }
        }
        const double p_fixed = s.power.p_base_w +
                               static_cast<double>(m_cells) * s.power.p_sbs_sleep_w;
        for (std::uint64_t i = i0;; ++i) {
            const double p_t = mu == 0.0 ? 0.0 : t.traffic(mu) * z_num / (t.r0_alpha * mu);
            if (p_t <= t.p_t_max_w) {
                const double p_het =
                    p_fixed + s.power.u_slope * p_t + h_active * t.delta_p_w;
                if (!best.has || p_het < best.p_het ||
                    (p_het == best.p_het && mask_lex_less(~mask, ~best.mask))) {
                    best.has = true;
                    best.p_het = p_het;
                    best.mask = mask;
                }
            }
            if (i + 1 >= i1) break;
            const std::uint32_t next = static_cast<std::uint32_t>((i + 1) ^ ((i + 1) >> 1));
            const std::uint32_t flip = mask ^ next;
            const int m = std::countr_zero(flip);
            if (next & flip) {
                mu += t.cell_load[m];
                z_num += t.cell_geom[m];
                h_active -= 1.0;
            } else {
                mu -= t.cell_load[m];
                z_num -= t.cell_geom[m];
                h_active += 1.0;
            }
            mask = next;
        }
        return best;
    };

    const unsigned n_workers = worker_count(n_modes >= 4096 ? 8 : 1);
    std::vector<RangeBest> partial(n_workers);
    if (n_workers == 1) {
        partial[0] = scan_range(0, n_modes);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t step = n_modes / n_workers;
        for (unsigned w = 0; w < n_workers; ++w) {
            const std::uint64_t i0 = w * step;
            const std::uint64_t i1 = (w + 1 == n_workers) ? n_modes : (w + 1) * step;
            pool.emplace_back([&, w, i0, i1] { partial[w] = scan_range(i0, i1); });
        }
        for (auto& th : pool) th.join();
    }

    RangeBest best;
    for (const RangeBest& rb : partial) {
        if (!rb.has) continue;
        if (!best.has || rb.p_het < best.p_het ||
            (rb.p_het == best.p_het && mask_lex_less(~rb.mask, ~best.mask))) {
            best = rb;
        }
    }
    if (!best.has) {
        throw InfeasibleScenario("exhaustive_search: no mode meets the MBS transmit cap");
    }

    OperationMode mode = OperationMode::all_on(m_cells);
    for (std::size_t m = 0; m < m_cells; ++m) {
        if (best.mask & (1u << m)) mode.set(m, false);
    }
    return {mode, evaluate(s, mode)};
}

namespace {

// Adaptive Simpson on [a, b] with recursion on the larger error half.
template <class Fn>
double adaptive_simpson(const Fn& fn, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = fn(lm);
    const double frm = fn(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (depth <= 0 || std::fabs(err) <= 15.0 * tol) {
        return left + right + err / 15.0;
    }
    return adaptive_simpson(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class Fn>
double integrate(const Fn& fn, double a, double b, double tol) {
    const double fa = fn(a);
    const double fb = fn(b);
    const double fm = fn(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(fn, a, b, fa, fm, fb, whole,
                            std::max(tol, 1e-300), 48);
}

struct McAccum {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t outage_users = 0;
    std::uint64_t total_users = 0;
};

}  // namespace

double exact_disc_integral(const Scenario& s, std::size_t m) {
    if (m >= s.cell_count()) throw std::invalid_argument("cell index out of range");
    const double d = std::hypot(s.sbs_positions_m[m].x, s.sbs_positions_m[m].y);
    const double rs = s.r_small_m;
    const double r0 = s.channel.r0_m;
    const double alpha = s.channel.alpha;
    const auto gain = [&](double r) {
        return r < r0 ? 1.0 : std::pow(r / r0, alpha);
    };
    // The integrand is symmetric about the center-to-origin axis, so the
    // angular integral runs over half a turn and doubles.
    const double scale = kPi * rs * rs * gain(std::max(d, r0));
    const auto ring = [&](double rho) {
        const auto ang = [&](double phi) {
            const double r = std::sqrt(d * d + rho * rho + 2.0 * d * rho * std::cos(phi));
            return gain(r);
        };
        return 2.0 * rho * integrate(ang, 0.0, kPi, 1e-11 * scale / std::max(rho, 1e-9));
    };
    return integrate(ring, 0.0, rs, 1e-10 * scale);
}

double efficiency_factor_exact(const Scenario& s, const OperationMode& m) {
    if (m.size() != s.cell_count()) {
        throw std::invalid_argument("operation mode length does not match the scenario");
    }
    const ModelTerms t = ModelTerms::from(s);
    const double mu = t.mu_of(m);
    if (mu == 0.0) throw DegenerateLoad("efficiency_factor_exact: zero expected load");

    const double r0 = s.channel.r0_m;
    const double alpha = s.channel.alpha;
    const double rmac = s.r_macro_m;
    // Exact integral of the path gain over the whole macro disc.
    double macro_int;
    if (r0 >= rmac) {
        macro_int = kPi * rmac * rmac;
    } else {
        macro_int = kPi * r0 * r0 +
                    2.0 * kPi / std::pow(r0, alpha) *
                        (std::pow(rmac, alpha + 2.0) - std::pow(r0, alpha + 2.0)) /
                        (alpha + 2.0);
    }
    double num = s.lambda0_per_m2 * macro_int;
    for (std::size_t i = 0; i < s.cell_count(); ++i) {
        const double cell_int = exact_disc_integral(s, i);
        num -= s.lambda0_per_m2 * cell_int;
        if (!m.active(i)) num += s.lambdas_per_m2[i] * cell_int;
    }
    return num / mu;
}

McReport monte_carlo_validate(const Scenario& s, const OperationMode& m,
                              std::uint64_t n_draws, std::uint64_t seed) {
    if (m.size() != s.cell_count()) {
        throw std::invalid_argument("operation mode length does not match the scenario");
    }
    if (n_draws < 1000) {
        throw std::invalid_argument("monte_carlo_validate: need at least 1000 draws");
    }
    const ModelTerms t = ModelTerms::from(s);
    const Evaluation analytic = evaluate(s, m);

    // Sampling weights for the macro-served regions: the outer region plus
    // every sleeping cell, proportional to expected user count.
    std::vector<std::size_t> sleeping;
    std::vector<double> cum_weight;
    double mu = t.base_load;
    cum_weight.push_back(mu);
    for (std::size_t i = 0; i < s.cell_count(); ++i) {
        if (!m.active(i)) {
            sleeping.push_back(i);
            mu += t.cell_load[i];
            cum_weight.push_back(mu);
        }
    }

    const double r0 = s.channel.r0_m;
    const double alpha = s.channel.alpha;
    const double rmac = s.r_macro_m;
    const double rs = s.r_small_m;
    const double w_hz = s.qos.bandwidth_hz;
    const double noise_gamma = s.channel.gamma_cap * s.channel.n0_w_hz * w_hz;
    const double d_lin = s.channel.d_ref_loss;
    const auto gain = [&](double r) { return r < r0 ? 1.0 : std::pow(r / r0, alpha); };
    const auto inside_any_cell = [&](double x, double y) {
        for (const Point& p : s.sbs_positions_m) {
            const double dx = x - p.x;
            const double dy = y - p.y;
            if (dx * dx + dy * dy < rs * rs) return true;
        }
        return false;
    };

    const auto run_chunk = [&](std::uint64_t chunk, std::uint64_t lo, std::uint64_t hi) {
        McAccum acc;
        Rng rng = Rng::substream(seed, chunk);
        for (std::uint64_t draw = lo; draw < hi; ++draw) {
            const std::uint64_t k_users = mu > 0.0 ? rng.poisson(mu) : 0;
            double total_w = 0.0;
            if (k_users > 0) {
                const double k = static_cast<double>(k_users);
                const double rate_term =
                    std::expm1(k * s.qos.rate_bps / w_hz * std::numbers::ln2) / k;
                const double noise_user = noise_gamma / k;  // Gamma N0 W / K
                for (std::uint64_t ku = 0; ku < k_users; ++ku) {
                    // Region choice, then a uniform position inside it.
                    const double pick = rng.u01() * mu;
                    const std::size_t region =
                        static_cast<std::size_t>(std::lower_bound(cum_weight.begin(),
                                                                  cum_weight.end(), pick) -
                                                 cum_weight.begin());
                    double x, y;
                    if (region == 0) {
                        do {
                            const double rr = rmac * std::sqrt(rng.u01());
                            const double ph = 2.0 * kPi * rng.u01();
                            x = rr * std::cos(ph);
                            y = rr * std::sin(ph);
                        } while (inside_any_cell(x, y));
                    } else {
                        const Point& c = s.sbs_positions_m[sleeping[region - 1]];
                        const double rr = rs * std::sqrt(rng.u01());
                        const double ph = 2.0 * kPi * rng.u01();
                        x = c.x + rr * std::cos(ph);
                        y = c.y + rr * std::sin(ph);
                    }
                    const double g = gain(std::hypot(x, y));
                    const double p_tx = t.tx_prefactor_w * rate_term * g;
                    total_w += p_tx;

                    const double fading = rng.exp1();
                    const double p_rx = p_tx * fading * d_lin / g;
                    const double rate =
                        w_hz / k * std::log2(1.0 + p_rx / noise_user);
                    acc.total_users += 1;
                    if (rate < s.qos.rate_bps) acc.outage_users += 1;
                }
            }
            acc.sum += total_w;
            acc.sum_sq += total_w * total_w;
        }
        return acc;
    };

    std::vector<McAccum> chunks(kMcChunks);
    const auto chunk_bounds = [&](std::uint64_t c) {
        const std::uint64_t lo = n_draws * c / kMcChunks;
        const std::uint64_t hi = n_draws * (c + 1) / kMcChunks;
        return std::pair{lo, hi};
    };
    const unsigned n_workers = worker_count(kMcChunks);
    if (n_workers == 1) {
        for (std::uint64_t c = 0; c < kMcChunks; ++c) {
            const auto [lo, hi] = chunk_bounds(c);
            chunks[c] = run_chunk(c, lo, hi);
        }
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t c = w; c < kMcChunks; c += n_workers) {
                    const auto [lo, hi] = chunk_bounds(c);
                    chunks[c] = run_chunk(c, lo, hi);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Deterministic merge in chunk order.
    McAccum all;
    for (const McAccum& acc : chunks) {
        all.sum += acc.sum;
        all.sum_sq += acc.sum_sq;
        all.outage_users += acc.outage_users;
        all.total_users += acc.total_users;
    }

    McReport rep;
    rep.n_draws = n_draws;
    rep.p_t_analytic_w = analytic.p_t_w;
    const double n = static_cast<double>(n_draws);
    rep.p_t_empirical_mean_w = all.sum / n;
    const double var =
        std::max(0.0, (all.sum_sq - n * rep.p_t_empirical_mean_w * rep.p_t_empirical_mean_w) /
                          (n - 1.0));
    rep.std_error_w = std::sqrt(var / n);
    rep.outage_rate = all.total_users == 0
                          ? 0.0
                          : static_cast<double>(all.outage_users) /
                                static_cast<double>(all.total_users);
    const double z_exact = mu == 0.0 ? 0.0 : efficiency_factor_exact(s, m);
    if (z_exact != 0.0) {
        const double z_closed = t.z_factor(t.z_numerator_of(m), mu);
        rep.approx_error_z = std::fabs(z_closed - z_exact) / std::fabs(z_exact);
    }
    return rep;
}

double outage_for_user(const Scenario& s, double r_m, std::uint64_t k_users,
                       std::uint64_t n_draws, std::uint64_t seed) {
    if (n_draws == 0) throw std::invalid_argument("outage_for_user: need draws");
    const double p_tx = per_user_tx_power(s, r_m, k_users);
    const double k = static_cast<double>(k_users);
    const double w_hz = s.qos.bandwidth_hz;
    const double noise_user = s.channel.gamma_cap * s.channel.n0_w_hz * w_hz / k;
    const double g = r_m < s.channel.r0_m
                         ? 1.0
                         : std::pow(r_m / s.channel.r0_m, s.channel.alpha);
    Rng rng = Rng::substream(seed, 0);
    std::uint64_t outages = 0;
    for (std::uint64_t i = 0; i < n_draws; ++i) {
        const double p_rx = p_tx * rng.exp1() * s.channel.d_ref_loss / g;
        const double rate = w_hz / k * std::log2(1.0 + p_rx / noise_user);
        if (rate < s.qos.rate_bps) ++outages;
    }
    return static_cast<double>(outages) / static_cast<double>(n_draws);
}

}  // namespace hetsleep
