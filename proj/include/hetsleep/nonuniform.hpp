#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hetsleep/power_model.hpp"
#include "hetsleep/scenario.hpp"

namespace hetsleep {

// Cells whose density alone decides their state, regardless of the others.
// forced_on, forced_off and free partition {0, ..., M-1}; the per-cell
// density thresholds that produced the split are kept for reporting.
struct RegimeClassification {
    std::vector<std::size_t> forced_on;
    std::vector<std::size_t> forced_off;
    std::vector<std::size_t> free;
    std::vector<double> lambda_th_off;  // per cell, input order
    std::vector<double> lambda_th_on;
};

// Handover load at which two cells swap their power-saving-efficiency
// order. load_l counts expected users handed to the MBS, including any
// fixed base contribution of cells that are already sleeping.
struct SwitchingPoint {
    std::size_t m = 0;
    std::size_t n = 0;
    double load_l = 0.0;
};

struct Candidate {
    OperationMode mode;
    Evaluation eval;
    // -1: the all-on fallback; -2: forced sets only; >= 0: ordinal of the
    // power-saving list (switching interval) that generated the mode.
    long long list_id = -1;
};

// Total network power if every cell were active but the macro tier carried
// an extra handover load L on top of its own region's users.
double phat(const Scenario& s, double handover_load);

// Net power saved by sleeping cell m when the sleeping set already hands
// load L to the MBS: the sleep saving minus the marginal macro cost.
double delta_m(const Scenario& s, std::size_t m, double handover_load);

// Saved power per unit of handed-over load, delta_m / (lambda_m pi Rs^2).
double power_saving_efficiency(const Scenario& s, std::size_t m, double handover_load);

// Solves the per-cell density thresholds by bisection and partitions the
// cells. A cell is forced off when sleeping it pays off even at the highest
// possible handover load, and forced on when it does not pay off even at
// the lowest.
RegimeClassification classify_regimes(const Scenario& s);

// Switching points over all cells on the full load range [0, sum lambda_m
// pi Rs^2], sorted by load. Pairs whose efficiency order never changes are
// omitted. A grid pre-scan guards the at-most-one-crossing assumption; if
// it ever sees more it emits a diagnostic on stderr and returns every root.
std::vector<SwitchingPoint> switching_points(const Scenario& s);

// Same, restricted to `cells` with the load confined to [l_lo, l_hi].
std::vector<SwitchingPoint> switching_points(const Scenario& s,
                                             const std::vector<std::size_t>& cells,
                                             double l_lo, double l_hi);

// Near-optimal minimizer for non-uniform densities: fixes the forced
// regimes, walks every power-saving list induced by consecutive switching
// intervals, evaluates the load-admissible prefixes of each list plus the
// trivial modes, and returns the best feasible candidate. O(M^3).
Candidate solve_nonuniform(const Scenario& s);

}  // namespace hetsleep
