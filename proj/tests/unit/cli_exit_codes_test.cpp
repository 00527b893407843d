#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "hetsleep/harness.hpp"
#include "test_util.hpp"

using namespace hetsleep;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(HETSLEEP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("cli_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("cli exit codes follow the documented mapping") {
    TempFile ok("ok.json", scenario_to_json_text(testutil::quad_scenario()));
    CHECK(run_cli("solve " + ok.path) == 0);

    TempFile broken("broken.json", "{ not json");
    CHECK(run_cli("solve " + broken.path) == 2);

    Scenario overlap = testutil::quad_scenario();
    overlap.sbs_positions_m[1] = {110.0, 0.0};
    TempFile invalid("invalid.json", scenario_to_json_text(overlap));
    CHECK(run_cli("solve " + invalid.path) == 2);

    Scenario heavy = testutil::quad_scenario();
    heavy.lambda0_per_m2 = 1e-2;
    TempFile infeasible("infeasible.json", scenario_to_json_text(heavy));
    CHECK(run_cli("solve " + infeasible.path) == 3);

    Rng rng(12);
    Scenario wide;
    wide.r_macro_m = 400.0;
    wide.r_small_m = 5.0;
    wide.sbs_positions_m = testutil::random_layout(rng, 25, 400.0, 5.0);
    wide.lambda0_per_m2 = 1e-4;
    wide.lambdas_per_m2.assign(25, 1e-3);
    wide = testutil::with_reference_params(std::move(wide));
    TempFile large("large.json", scenario_to_json_text(wide));
    CHECK(run_cli("oracle " + large.path) == 4);
}
