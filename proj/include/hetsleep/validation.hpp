#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "hetsleep/power_model.hpp"
#include "hetsleep/scenario.hpp"

namespace hetsleep {

// Outcome of a Monte-Carlo check of one (scenario, mode) pair.
struct McReport {
    double p_t_analytic_w = 0.0;
    double p_t_empirical_mean_w = 0.0;
    double std_error_w = 0.0;
    std::uint64_t n_draws = 0;
    double outage_rate = 0.0;    // share of sampled users below the rate target
    double approx_error_z = 0.0; // closed-form Z vs exact-integral Z, relative

    std::string to_json_text() const;
};

// Ground-truth minimizer by enumerating all 2^M modes (Gray-code scan,
// parallel over index ranges). Infeasible modes are discarded; ties are
// broken by the lexicographically smallest mode vector. Throws TooLarge
// for M > 24 and InfeasibleScenario when no mode meets the transmit cap.
std::pair<OperationMode, Evaluation> exhaustive_search(const Scenario& s);

// Draws n_draws network realizations: a Poisson user count over the
// macro-served regions, uniform positions per region (rejection sampling
// outside the small cells), the per-user transmit powers summed and
// compared with the analytic traffic * efficiency product. Each user also
// gets one unit-mean exponential fading draw to measure the empirical
// outage. Deterministic in (seed, n_draws); draws are split into 64 fixed
// substream chunks so the result does not depend on thread count.
McReport monte_carlo_validate(const Scenario& s, const OperationMode& m,
                              std::uint64_t n_draws, std::uint64_t seed);

// Fraction of fading draws in which a user at distance r_m among k_users
// falls short of the rate target when served at the model's per-user power.
double outage_for_user(const Scenario& s, double r_m, std::uint64_t k_users,
                       std::uint64_t n_draws, std::uint64_t seed);

// Exact path-gain integral over small cell m by adaptive 2-D quadrature in
// polar coordinates around the cell center (relative tolerance ~1e-10).
double exact_disc_integral(const Scenario& s, std::size_t m);

// Efficiency factor with every cell integral evaluated exactly instead of
// the flat pi Rs^2 d^alpha shortcut the closed form uses.
double efficiency_factor_exact(const Scenario& s, const OperationMode& m);

}  // namespace hetsleep
