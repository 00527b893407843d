#include "hetsleep/power_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace hetsleep {

namespace {
constexpr double kPi = std::numbers::pi;
const double kMaxExpArg = std::log(std::numeric_limits<double>::max());
}  // namespace

OperationMode::OperationMode(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (std::uint8_t b : bits_) {
        if (b > 1) throw std::invalid_argument("OperationMode: entries must be 0 or 1");
    }
}

OperationMode OperationMode::all_on(std::size_t m_cells) {
    return OperationMode(std::vector<std::uint8_t>(m_cells, 1));
}

OperationMode OperationMode::all_off(std::size_t m_cells) {
    return OperationMode(std::vector<std::uint8_t>(m_cells, 0));
}

OperationMode OperationMode::from_string(const std::string& bits) {
    std::vector<std::uint8_t> v;
    v.reserve(bits.size());
    for (char ch : bits) {
        if (ch != '0' && ch != '1') {
            throw std::invalid_argument("OperationMode: mode string must be 0/1 digits");
        }
        v.push_back(ch == '1' ? 1 : 0);
    }
    return OperationMode(std::move(v));
}

std::size_t OperationMode::count_active() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::string OperationMode::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (std::uint8_t b : bits_) s.push_back(b ? '1' : '0');
    return s;
}

ModelTerms ModelTerms::from(const Scenario& s) {
    ModelTerms t;
    const double w = s.qos.bandwidth_hz;
    t.c = std::expm1(s.qos.rate_bps / w * std::numbers::ln2);
    t.tx_prefactor_w = s.channel.gamma_cap * s.channel.n0_w_hz * w /
                       (-s.channel.d_ref_loss * std::log1p(-s.qos.epsilon));
    t.r0_alpha = std::pow(s.channel.r0_m, s.channel.alpha);
    t.f_prefactor_w = s.power.u_slope * t.tx_prefactor_w / t.r0_alpha;
    t.area_small_m2 = kPi * s.r_small_m * s.r_small_m;

    const std::size_t m_cells = s.cell_count();
    t.area_rest_m2 = kPi * s.r_macro_m * s.r_macro_m -
                     static_cast<double>(m_cells) * t.area_small_m2;
    t.base_load = s.lambda0_per_m2 * t.area_rest_m2;
    t.macro_geom = 2.0 * kPi / (s.channel.alpha + 2.0) *
                   (std::pow(s.r_macro_m, s.channel.alpha + 2.0) +
                    s.channel.alpha * std::pow(s.channel.r0_m, s.channel.alpha + 2.0) / 2.0);

    t.dist_m.reserve(m_cells);
    t.dist_alpha.reserve(m_cells);
    t.cell_load.reserve(m_cells);
    t.cell_geom.reserve(m_cells);
    double sum_dist_alpha = 0.0;
    for (std::size_t m = 0; m < m_cells; ++m) {
        const double d = std::hypot(s.sbs_positions_m[m].x, s.sbs_positions_m[m].y);
        const double da = std::pow(d, s.channel.alpha);
        const double load = s.lambdas_per_m2[m] * t.area_small_m2;
        t.dist_m.push_back(d);
        t.dist_alpha.push_back(da);
        t.cell_load.push_back(load);
        t.cell_geom.push_back(load * da);
        sum_dist_alpha += da;
        t.sum_cell_load += load;
    }
    t.upsilon = s.lambda0_per_m2 * t.macro_geom -
                s.lambda0_per_m2 * t.area_small_m2 * sum_dist_alpha;
    t.delta_p_w = s.power.delta_p_w();
    t.p_t_max_w = s.power.p_t_max_w;
    return t;
}

double ModelTerms::mu_of(const OperationMode& m) const {
    double mu = base_load;
    for (std::size_t i = 0; i < cell_load.size(); ++i) {
        if (!m.active(i)) mu += cell_load[i];
    }
    return mu;
}

double ModelTerms::z_numerator_of(const OperationMode& m) const {
    double num = upsilon;
    for (std::size_t i = 0; i < cell_geom.size(); ++i) {
        if (!m.active(i)) num += cell_geom[i];
    }
    return num;
}

double ModelTerms::traffic(double mu) const { return tx_prefactor_w * std::expm1(c * mu); }

double ModelTerms::z_factor(double z_num, double mu) const {
    if (mu == 0.0) throw DegenerateLoad("efficiency factor: expected macro load is zero");
    return z_num / (r0_alpha * mu);
}

double ModelTerms::f_of_load(double x) const {
    if (x < 0.0) throw std::invalid_argument("f: expected user count must be non-negative");
    if (x == 0.0) throw DegenerateLoad("f: zero expected load, use the limit value");
    return f_prefactor_w * std::expm1(c * x) / x;
}

double ModelTerms::f_limit0() const { return f_prefactor_w * c; }

namespace {

void check_mode(const Scenario& s, const OperationMode& m) {
    if (m.size() != s.cell_count()) {
        throw std::invalid_argument("operation mode length does not match the scenario");
    }
}

}  // namespace

double per_user_tx_power(const Scenario& s, double r_k_m, std::uint64_t k_users) {
    if (k_users < 1) throw std::invalid_argument("per_user_tx_power: K must be >= 1");
    if (r_k_m < 0.0) throw std::invalid_argument("per_user_tx_power: distance must be >= 0");
    const ModelTerms t = ModelTerms::from(s);
    const double k = static_cast<double>(k_users);
    const double exp_arg = k * s.qos.rate_bps / s.qos.bandwidth_hz * std::numbers::ln2;
    if (exp_arg > kMaxExpArg) {
        throw std::overflow_error("per_user_tx_power: 2^{K b / W} exceeds the double range");
    }
    const double rate_term = std::expm1(exp_arg) / k;
    const double geom = r_k_m < s.channel.r0_m
                            ? 1.0
                            : std::pow(r_k_m / s.channel.r0_m, s.channel.alpha);
    return t.tx_prefactor_w * rate_term * geom;
}

double traffic_factor(const Scenario& s, const OperationMode& m) {
    check_mode(s, m);
    const ModelTerms t = ModelTerms::from(s);
    return t.traffic(t.mu_of(m));
}

double efficiency_factor(const Scenario& s, const OperationMode& m) {
    check_mode(s, m);
    const ModelTerms t = ModelTerms::from(s);
    return t.z_factor(t.z_numerator_of(m), t.mu_of(m));
}

Evaluation evaluate(const Scenario& s, const OperationMode& m) {
    check_mode(s, m);
    const ModelTerms t = ModelTerms::from(s);
    Evaluation e;
    e.mu = t.mu_of(m);
    if (e.mu == 0.0) {
        // No macro-served users; the transmit power vanishes with the load.
        e.traffic_factor_w = 0.0;
        e.efficiency_factor = 0.0;
        e.p_t_w = 0.0;
    } else {
        e.traffic_factor_w = t.traffic(e.mu);
        e.efficiency_factor = t.z_factor(t.z_numerator_of(m), e.mu);
        e.p_t_w = e.traffic_factor_w * e.efficiency_factor;
    }
    const double h_active = static_cast<double>(m.count_active());
    e.p_het_w = ((s.power.p_base_w + s.power.u_slope * e.p_t_w) +
                 static_cast<double>(s.cell_count()) * s.power.p_sbs_sleep_w) +
                h_active * s.power.delta_p_w();
    e.feasible = e.p_t_w <= s.power.p_t_max_w;
    return e;
}

double delta_p_macro(const Scenario& s, std::size_t ordered_prefix_m) {
    const std::size_t m_cells = s.cell_count();
    if (ordered_prefix_m < 1 || ordered_prefix_m > m_cells) {
        throw std::invalid_argument("delta_p_macro: index must lie in [1, M]");
    }
    std::vector<std::size_t> order(m_cells);
    std::iota(order.begin(), order.end(), 0);
    const std::vector<double> d = sbs_distances(s);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    OperationMode with_on = OperationMode::all_on(m_cells);
    for (std::size_t i = 0; i + 1 < ordered_prefix_m; ++i) with_on.set(order[i], false);
    OperationMode with_off = with_on;
    with_off.set(order[ordered_prefix_m - 1], false);

    const Evaluation off = evaluate(s, with_off);
    const Evaluation on = evaluate(s, with_on);
    return s.power.u_slope * (off.p_t_w - on.p_t_w);
}

}  // namespace hetsleep
