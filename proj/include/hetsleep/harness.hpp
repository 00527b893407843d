#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hetsleep/power_model.hpp"
#include "hetsleep/scenario.hpp"

namespace hetsleep {

// One sweep experiment: for each (lambda0, seed) cell the small-cell
// densities are drawn uniformly from [50 lambda0 - sqrt(3 sigma2),
// 50 lambda0 + sqrt(3 sigma2)] and every requested scheme is evaluated.
struct SweepSpec {
    Scenario base;                     // geometry and parameters; densities overwritten
    std::vector<double> lambda0_grid;  // strictly increasing
    std::vector<std::uint64_t> seeds;
    double sigma2 = 1e-5;              // density variation of the cell draws
    std::vector<std::string> schemes;  // subset of {"alg", "always_on", "prob_on"}
    double p_active = 0.7;             // activation probability for prob_on

    void validate() const;
};

struct SweepRow {
    double lambda0 = 0.0;
    std::uint64_t seed = 0;
    std::string scheme;
    std::string estimator;  // "sampled" or "expectation"
    double p_het_w = 0.0;
    double p_mbs_w = 0.0;   // p_base + u * p_t
    double u_pt_w = 0.0;    // u * p_t alone
    double p_sbs_w = 0.0;   // M p0 + H delta_p
    bool feasible_before_admission = true;
    double admitted_fraction = 1.0;  // -1 when not applicable (expectation rows)
    long long n_active = 0;          // -1 for expectation rows
};

// Draws the per-cell densities for one sweep cell. Deterministic in seed
// (density draws use substream 0 of the seed). Throws ValidationError when
// the lower end of the density range is not positive.
Scenario generate_scenario(const Scenario& base, double lambda0, double sigma2,
                           std::uint64_t seed);

// Runs every (lambda0, seed, scheme) cell. Infeasible cells go through
// admission control first; prob_on additionally emits one exact
// expectation row per lambda0 whose all-on mode is infeasible (seed 0).
// Rows come back sorted by (lambda0, scheme, estimator, seed).
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::string sweep_csv_header();
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Uniformly thins the macro-served densities (the outer region and every
// sleeping cell) until the transmit power meets the cap within 1e-6 W from
// below. Returns the thinned scenario and the admitted fraction. The mode
// must be infeasible on entry; anything else is a caller bug.
std::pair<Scenario, double> admission_control(const Scenario& s, const OperationMode& m);

struct Table2Row {
    double lambda0 = 0.0;
    std::size_t n_seeds = 0;
    double mean_ratio = 0.0;  // exhaustive optimum power over heuristic power
    double min_ratio = 0.0;
    double max_ratio = 0.0;
};

// Optimality-ratio benchmark of the non-uniform heuristic against the
// exhaustive oracle on the spec's grid and seeds. Requires M <= 24.
std::vector<Table2Row> table2_benchmark(const SweepSpec& spec);

std::string table2_csv(const std::vector<Table2Row>& rows);

// Documented default layout: a 12 x 12 grid of small cells, 60 m pitch,
// centered on the MBS, with the reference radio and power parameters.
Scenario default_grid_scenario();

// Random disjoint layout with m_cells cells, deterministic in layout_seed.
Scenario random_layout_scenario(std::size_t m_cells, std::uint64_t layout_seed,
                                double r_macro_m = 500.0, double r_small_m = 20.0);

// Sweep spec JSON: lambda0_grid, seeds, sigma2, schemes, p_active, and the
// base scenario (inline object, file path, random layout, or the default
// grid when omitted).
SweepSpec load_sweep_spec(const std::string& path);
SweepSpec sweep_spec_from_json_text(const std::string& text);

}  // namespace hetsleep
