#include "hetsleep/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hetsleep {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_per_hz_to_w_per_hz(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

}  // namespace

ChannelParams ChannelParams::from_db(double d_db, double r0_m, double alpha,
                                     double n0_dbm_hz, double gamma_cap) {
    ChannelParams c;
    c.d_db = d_db;
    c.r0_m = r0_m;
    c.alpha = alpha;
    c.n0_dbm_hz = n0_dbm_hz;
    c.gamma_cap = gamma_cap;
    c.d_ref_loss = db_to_linear(d_db);
    c.n0_w_hz = dbm_per_hz_to_w_per_hz(n0_dbm_hz);
    return c;
}

void Scenario::validate() const {
    if (!(r_small_m > 0.0)) fail("geometry: r_small_m must be positive");
    if (!(r_macro_m > r_small_m)) fail("geometry: r_macro_m must exceed r_small_m");

    if (!(channel.r0_m > 0.0)) fail("channel: r0_m must be positive");
    if (!(channel.alpha > 0.0)) fail("channel: alpha must be positive");
    if (!(channel.gamma_cap >= 1.0)) fail("channel: gamma must be >= 1");
    if (!(channel.d_ref_loss > 0.0) || !std::isfinite(channel.d_ref_loss))
        fail("channel: reference loss must convert to a positive linear gain");
    if (!(channel.n0_w_hz > 0.0) || !std::isfinite(channel.n0_w_hz))
        fail("channel: noise density must convert to a positive linear value");

    if (!(qos.epsilon > 0.0 && qos.epsilon < 1.0)) fail("qos: epsilon must lie in (0, 1)");
    if (!(qos.rate_bps > 0.0)) fail("qos: rate_bps must be positive");
    if (!(qos.bandwidth_hz > 0.0)) fail("qos: bandwidth_hz must be positive");

    if (!(power.p_base_w > 0.0)) fail("power: p_base_w must be positive");
    if (!(power.u_slope > 0.0)) fail("power: u must be positive");
    if (!(power.p_t_max_w > 0.0)) fail("power: p_t_max_w must be positive");
    if (!(power.p_sbs_sleep_w >= 0.0)) fail("power: p_sbs_sleep_w must be non-negative");
    if (!(power.p_sbs_active_w > power.p_sbs_sleep_w))
        fail("power: p_sbs_active_w must exceed p_sbs_sleep_w");

    if (lambdas_per_m2.size() != sbs_positions_m.size())
        fail("densities: lambdas_per_m2 length must match the number of SBS positions");
    if (!(lambda0_per_m2 > 0.0)) fail("densities: lambda0_per_m2 must be positive");
    for (std::size_t m = 0; m < lambdas_per_m2.size(); ++m) {
        if (!(lambdas_per_m2[m] > 0.0)) {
            std::ostringstream os;
            os << "densities: lambda of cell " << m << " must be positive";
            fail(os.str());
        }
    }

    const std::size_t m_cells = sbs_positions_m.size();
    for (std::size_t m = 0; m < m_cells; ++m) {
        const Point& p = sbs_positions_m[m];
        const double d = std::hypot(p.x, p.y);
        if (d + r_small_m > r_macro_m) {
            std::ostringstream os;
            os << "geometry: small cell " << m << " extends outside the macro cell"
               << " (|x| + r_small = " << d + r_small_m << " > " << r_macro_m << ")";
            fail(os.str());
        }
    }
    for (std::size_t m = 0; m < m_cells; ++m) {
        for (std::size_t n = m + 1; n < m_cells; ++n) {
            const double dx = sbs_positions_m[m].x - sbs_positions_m[n].x;
            const double dy = sbs_positions_m[m].y - sbs_positions_m[n].y;
            if (std::hypot(dx, dy) < 2.0 * r_small_m) {
                std::ostringstream os;
                os << "geometry: small cells " << m << " and " << n << " overlap";
                fail(os.str());
            }
        }
    }
}

namespace {

using nlohmann::json;

Scenario scenario_from_json(const json& j) {
    Scenario s;
    try {
        const json& geo = j.at("geometry");
        s.r_macro_m = geo.at("r_macro_m").get<double>();
        s.r_small_m = geo.at("r_small_m").get<double>();
        for (const auto& p : geo.at("sbs_positions_m")) {
            if (!p.is_array() || p.size() != 2) {
                throw ParseError("geometry: each SBS position must be an [x, y] pair");
            }
            s.sbs_positions_m.push_back({p[0].get<double>(), p[1].get<double>()});
        }

        const json& den = j.at("densities");
        s.lambda0_per_m2 = den.at("lambda0_per_m2").get<double>();
        s.lambdas_per_m2 = den.at("lambdas_per_m2").get<std::vector<double>>();

        const json& ch = j.at("channel");
        s.channel = ChannelParams::from_db(ch.at("d_db").get<double>(),
                                           ch.at("r0_m").get<double>(),
                                           ch.at("alpha").get<double>(),
                                           ch.at("n0_dbm_hz").get<double>(),
                                           ch.at("gamma").get<double>());

        const json& q = j.at("qos");
        s.qos.rate_bps = q.at("rate_bps").get<double>();
        s.qos.epsilon = q.at("epsilon").get<double>();
        s.qos.bandwidth_hz = q.at("bandwidth_hz").get<double>();

        const json& pw = j.at("power");
        s.power.p_base_w = pw.at("p_base_w").get<double>();
        s.power.u_slope = pw.at("u").get<double>();
        s.power.p_t_max_w = pw.at("p_t_max_w").get<double>();
        s.power.p_sbs_active_w = pw.at("p_sbs_active_w").get<double>();
        s.power.p_sbs_sleep_w = pw.at("p_sbs_sleep_w").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    s.validate();
    return s;
}

json scenario_to_json(const Scenario& s) {
    json positions = json::array();
    for (const Point& p : s.sbs_positions_m) positions.push_back({p.x, p.y});
    return json{
        {"geometry",
         {{"r_macro_m", s.r_macro_m},
          {"r_small_m", s.r_small_m},
          {"sbs_positions_m", positions}}},
        {"densities",
         {{"lambda0_per_m2", s.lambda0_per_m2}, {"lambdas_per_m2", s.lambdas_per_m2}}},
        {"channel",
         {{"d_db", s.channel.d_db},
          {"r0_m", s.channel.r0_m},
          {"alpha", s.channel.alpha},
          {"n0_dbm_hz", s.channel.n0_dbm_hz},
          {"gamma", s.channel.gamma_cap}}},
        {"qos",
         {{"rate_bps", s.qos.rate_bps},
          {"epsilon", s.qos.epsilon},
          {"bandwidth_hz", s.qos.bandwidth_hz}}},
        {"power",
         {{"p_base_w", s.power.p_base_w},
          {"u", s.power.u_slope},
          {"p_t_max_w", s.power.p_t_max_w},
          {"p_sbs_active_w", s.power.p_sbs_active_w},
          {"p_sbs_sleep_w", s.power.p_sbs_sleep_w}}}};
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    return scenario_from_json(j);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("scenario: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json_text(buf.str());
}

std::string scenario_to_json_text(const Scenario& s) {
    return scenario_to_json(s).dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("scenario: cannot write " + path);
    out << scenario_to_json_text(s);
}

bool is_uniform(const Scenario& s, double rel_tol) {
    for (double lam : s.lambdas_per_m2) {
        if (std::fabs(lam - s.lambda0_per_m2) > rel_tol * std::fabs(s.lambda0_per_m2)) {
            return false;
        }
    }
    return true;
}

std::vector<double> sbs_distances(const Scenario& s) {
    std::vector<double> d;
    d.reserve(s.sbs_positions_m.size());
    for (const Point& p : s.sbs_positions_m) d.push_back(std::hypot(p.x, p.y));
    return d;
}

}  // namespace hetsleep
