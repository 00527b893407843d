#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetsleep/scenario.hpp"

namespace hetsleep {

// On/off states of the M small cells; 1 = active. Cell 0 comes first in
// the string form, so "10" means cell 0 active, cell 1 sleeping.
class OperationMode {
public:
    OperationMode() = default;
    explicit OperationMode(std::vector<std::uint8_t> bits);

    static OperationMode all_on(std::size_t m_cells);
    static OperationMode all_off(std::size_t m_cells);
    static OperationMode from_string(const std::string& bits);

    std::size_t size() const { return bits_.size(); }
    bool active(std::size_t m) const { return bits_[m] != 0; }
    void set(std::size_t m, bool on) { bits_[m] = on ? 1 : 0; }
    std::size_t count_active() const;
    std::string to_string() const;
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    bool operator==(const OperationMode& o) const { return bits_ == o.bits_; }

private:
    std::vector<std::uint8_t> bits_;
};

struct Evaluation {
    double p_t_w = 0.0;             // MBS transmit power, traffic * efficiency
    double traffic_factor_w = 0.0;  // load-dependent exponential term
    double efficiency_factor = 0.0; // mean per-user geometric term
    double p_het_w = 0.0;           // total network consumption
    bool feasible = false;          // p_t_w <= p_t_max_w
    double mu = 0.0;                // expected macro-served user count
};

// Scenario-derived constants shared by every mode evaluation. All public
// operations and both optimizers route their arithmetic through this struct
// so that separately computed factors match bit for bit.
struct ModelTerms {
    double c = 0.0;              // 2^{b/W} - 1
    double tx_prefactor_w = 0.0; // Gamma N0 W / (-D ln(1 - eps))
    double f_prefactor_w = 0.0;  // u * tx_prefactor / r0^alpha
    double r0_alpha = 0.0;       // r0^alpha
    double area_small_m2 = 0.0;  // pi Rs^2
    double area_rest_m2 = 0.0;   // pi R0^2 - M pi Rs^2
    double base_load = 0.0;      // lambda0 * area_rest, expected users outside all cells
    double macro_geom = 0.0;     // (2 pi / (alpha + 2)) (R0^{alpha+2} + alpha r0^{alpha+2} / 2)
    double upsilon = 0.0;        // lambda0 * macro_geom - lambda0 * area_small * sum d^alpha
    double sum_cell_load = 0.0;  // sum of cell_load
    double delta_p_w = 0.0;
    double p_t_max_w = 0.0;

    std::vector<double> dist_m;      // |x_m|
    std::vector<double> dist_alpha;  // d_m^alpha
    std::vector<double> cell_load;   // lambda_m pi Rs^2, expected users per cell
    std::vector<double> cell_geom;   // lambda_m pi Rs^2 d_m^alpha

    static ModelTerms from(const Scenario& s);

    std::size_t cells() const { return cell_load.size(); }

    double mu_of(const OperationMode& m) const;
    double z_numerator_of(const OperationMode& m) const;

    double traffic(double mu) const;                 // T as a function of mu
    double z_factor(double z_num, double mu) const;  // Z; throws DegenerateLoad on mu == 0
    double f_of_load(double x) const;                // f(x); throws DegenerateLoad on x == 0
    double f_limit0() const;                         // lim_{x -> 0} f(x)
};

// Transmit power needed to hold one user's outage at epsilon, given k_users
// sharing the band and distance r_k_m from the MBS. The flat-loss branch
// applies below the reference distance. Throws std::overflow_error when
// 2^{K b / W} exceeds the double range.
double per_user_tx_power(const Scenario& s, double r_k_m, std::uint64_t k_users);

// Expected aggregate load term T of the MBS transmit power.
double traffic_factor(const Scenario& s, const OperationMode& m);

// Mean per-user geometric term Z. Throws DegenerateLoad when mu == 0.
double efficiency_factor(const Scenario& s, const OperationMode& m);

// Full evaluation of a mode. p_t_w is traffic * efficiency (0 when mu == 0);
// p_het_w is composed as ((p_base + u * p_t) + M * p0) + H * delta_p.
Evaluation evaluate(const Scenario& s, const OperationMode& m);

// MBS consumption increase from sleeping the m-th closest cell when all
// closer cells already sleep and all farther ones are active. m is 1-based
// in the distance-sorted order (ties broken by input index).
double delta_p_macro(const Scenario& s, std::size_t ordered_prefix_m);

}  // namespace hetsleep
