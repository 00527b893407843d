#pragma once

#include <cstddef>
#include <vector>

#include "hetsleep/power_model.hpp"
#include "hetsleep/scenario.hpp"

namespace hetsleep {

// Result of the distance-ordered deactivation scheme for uniform densities.
// The first m_th cells of `order` sleep, the rest stay active.
struct UniformSolution {
    OperationMode mode;
    std::size_t m_th = 0;   // min(m_th1, m_th2)
    std::size_t m_th1 = 0;  // last prefix where sleeping still saves power
    std::size_t m_th2 = 0;  // last prefix within the MBS transmit power cap
    std::vector<std::size_t> order;  // original cell indices, distance ascending
    Evaluation eval;
};

// Exact minimizer of the total network power for uniform user density.
// Cells are sorted by distance to the MBS (ties by input index) and slept
// nearest-first while each step saves power and respects the transmit cap.
// Throws InfeasibleScenario if even the all-on mode exceeds the cap, and
// std::invalid_argument if the scenario is not uniform.
UniformSolution solve_uniform(const Scenario& s);

// Density below which sleeping every cell is optimal, ignoring the transmit
// power cap. Unique root found by bisection with a doubling upper bracket.
double threshold_lambda_off(const Scenario& s);

// Density above which keeping every cell active is optimal, ignoring the
// transmit power cap.
double threshold_lambda_on(const Scenario& s);

// Marginal macro consumption per expected user at load x:
// f(x) = u Gamma N0 W / (-D ln(1-eps) r0^alpha) * (e^{(2^{b/W}-1) x} - 1) / x.
// Throws DegenerateLoad at x == 0; the limit is exposed separately.
double f_helper(const Scenario& s, double expected_users);
double f_helper_limit0(const Scenario& s);

// Traffic and efficiency factors in the form they reduce to when every
// density equals lambda0. The general-form implementations must agree with
// these on uniform scenarios; both are kept so tests can cross-check them.
double uniform_traffic_factor(const Scenario& s, const OperationMode& m);
double uniform_efficiency_factor(const Scenario& s, const OperationMode& m);

}  // namespace hetsleep
