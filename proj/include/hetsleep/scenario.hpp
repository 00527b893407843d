#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hetsleep/errors.hpp"

namespace hetsleep {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Channel constants. Config files carry the reference loss in dB and the
// noise density in dBm/Hz; the linear values are derived once on
// construction and used for all computation. The raw dB figures are kept so
// re-serialization is lossless.
struct ChannelParams {
    double d_db = 0.0;        // reference path loss as configured [dB]
    double r0_m = 0.0;        // reference distance [m]
    double alpha = 0.0;       // path-loss exponent
    double n0_dbm_hz = 0.0;   // noise density as configured [dBm/Hz]
    double gamma_cap = 0.0;   // capacity-loss factor, >= 1

    double d_ref_loss = 0.0;  // linear reference path gain
    double n0_w_hz = 0.0;     // noise density [W/Hz]

    static ChannelParams from_db(double d_db, double r0_m, double alpha,
                                 double n0_dbm_hz, double gamma_cap);
};

struct QosParams {
    double rate_bps = 0.0;      // per-user required rate [bit/s]
    double epsilon = 0.0;       // max outage probability, in (0, 1)
    double bandwidth_hz = 0.0;  // macro-cell operating band [Hz]
};

struct PowerParams {
    double p_base_w = 0.0;        // MBS base consumption
    double u_slope = 0.0;         // MBS consumption per transmit watt
    double p_t_max_w = 0.0;       // MBS transmit power cap
    double p_sbs_active_w = 0.0;  // SBS consumption when active
    double p_sbs_sleep_w = 0.0;   // SBS consumption when sleeping

    double delta_p_w() const { return p_sbs_active_w - p_sbs_sleep_w; }
};

// A complete problem instance: one macro cell at the origin plus M small
// cells with per-region user densities. Treat as immutable once validated;
// every operation in this library takes it by const reference.
struct Scenario {
    double r_macro_m = 0.0;
    double r_small_m = 0.0;
    std::vector<Point> sbs_positions_m;
    double lambda0_per_m2 = 0.0;
    std::vector<double> lambdas_per_m2;
    ChannelParams channel;
    QosParams qos;
    PowerParams power;

    std::size_t cell_count() const { return sbs_positions_m.size(); }

    // Throws ValidationError naming the first violated invariant.
    void validate() const;
};

// Reads the documented JSON schema, converts dB fields to linear units and
// validates. Throws ParseError on malformed input, ValidationError otherwise.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text);

void save_scenario(const Scenario& s, const std::string& path);
std::string scenario_to_json_text(const Scenario& s);

// True iff every small-cell density matches lambda0 within rel_tol.
bool is_uniform(const Scenario& s, double rel_tol = 1e-9);

// Euclidean distance of each SBS from the macro BS, in input order.
std::vector<double> sbs_distances(const Scenario& s);

}  // namespace hetsleep
