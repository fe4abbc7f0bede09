#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nonlocal/config.hpp"
#include "nonlocal/reports_io.hpp"

using namespace nonlocal;

namespace {

nlohmann::ordered_json base_config() {
    return nlohmann::ordered_json::parse(R"({
      "dim": 1,
      "params": {"sigma": 1.5, "lambda": 0.17, "Lambda": 1.0, "mu": 1.0, "C0": 0.0},
      "domain": {"type": "interval", "a": -1.0, "b": 1.0, "r_omega": 0.5},
      "kernels": [{"name": "frac", "type": "fractional", "amplitude": 1.0}],
      "problem": {
        "n_a": 1, "n_b": 1,
        "pairs": [{"a": 0, "b": 0, "kernel": "frac", "c": 0.0, "f": -1.0}],
        "g": 0.0
      },
      "grid": {"box_lo": [-2.0], "box_hi": [2.0], "h": 0.11764705882352941, "R": 16.0},
      "solver": {"tol": 1e-9, "max_sweeps": 20000, "mode": "gauss-seidel"},
      "diagnostics": {"centers": [[0.0]], "base": 2.0, "levels": 3, "delta_tilde": 0.2,
                      "harnack_center": [0.0], "harnack_r": 0.5, "C1": 1.0},
      "output": "out"
    })");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string nlbi_bin() {
    const char* p = std::getenv("NLBI_BIN");
    return p ? p : "";
}

int run_cli(const std::string& args) {
    const std::string cmd = nlbi_bin() + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("config parsing and validation") {
    SUBCASE("round trip of the base configuration") {
        RunConfig cfg = parse_config(base_config());
        CHECK(cfg.dim == 1);
        CHECK(cfg.params.sigma == 1.5);
        CHECK(cfg.h == doctest::Approx(2.0 / 17.0));
        BellmanProblem P = make_problem(cfg);
        CHECK(P.pairs.size() == 1);
        CHECK(P.f_sup == doctest::Approx(1.0));
        CHECK(P.g_bound == 0.0);
        Domain d = make_domain(cfg);
        CHECK(d.boundary_samples.size() == 2);
    }
    SUBCASE("drift is rejected below order one") {
        auto j = base_config();
        j["params"]["sigma"] = 0.5;
        j["problem"]["pairs"][0]["drift"] = {1.0};
        CHECK_THROWS_AS(parse_config(j), std::invalid_argument);
    }
    SUBCASE("gradient constant is rejected below order one") {
        auto j = base_config();
        j["params"]["sigma"] = 0.5;
        j["params"]["C0"] = 1.0;
        CHECK_THROWS_AS(parse_config(j), std::invalid_argument);
    }
    SUBCASE("degenerate barriers require coercivity") {
        auto j = base_config();
        j["barriers"] = {{"kind", "degenerate"}};
        CHECK_THROWS_AS(parse_config(j), std::invalid_argument);
        j["problem"]["gamma"] = 0.5;
        j["problem"]["pairs"][0]["c"] = 0.5;
        CHECK_NOTHROW(parse_config(j));
    }
    SUBCASE("negative zeroth-order coefficients are rejected") {
        auto j = base_config();
        j["problem"]["pairs"][0]["c"] = -0.25;
        CHECK_THROWS_AS(parse_config(j), std::invalid_argument);
    }
    SUBCASE("affine coefficients evaluate as declared") {
        auto j = base_config();
        j["problem"]["pairs"][0]["f"] = {{"type", "affine"}, {"value", 1.0}, {"slope", {2.0}}};
        RunConfig cfg = parse_config(j);
        BellmanProblem P = make_problem(cfg);
        CHECK(P.pairs[0].f(Vec{0.5}) == doctest::Approx(2.0));
        CHECK(P.f_sup == doctest::Approx(1.0 + 2.0 * 2.0));  // sup over the box corners
    }
}

TEST_CASE("cli pipeline" * doctest::skip(false)) {
    REQUIRE(!nlbi_bin().empty());
    const std::string dir = "/tmp/nlbi_test_cli";
    std::filesystem::create_directories(dir);

    SUBCASE("byte-identical outputs across reruns") {
        auto j = base_config();
        j["output"] = dir + "/run1";
        write_text(dir + "/cfg1.json", j.dump(1));
        REQUIRE(run_cli("--config " + dir + "/cfg1.json all") == 0);
        const std::string sol1 = slurp(dir + "/run1/solution.csv");
        const std::string cert1 = slurp(dir + "/run1/reports/certify.json");
        const std::string harn1 = slurp(dir + "/run1/reports/harnack.json");
        j["output"] = dir + "/run2";
        write_text(dir + "/cfg2.json", j.dump(1));
        REQUIRE(run_cli("--config " + dir + "/cfg2.json all") == 0);
        CHECK(slurp(dir + "/run2/solution.csv") == sol1);
        CHECK(slurp(dir + "/run2/reports/certify.json") == cert1);
        CHECK(slurp(dir + "/run2/reports/harnack.json") == harn1);
    }
    SUBCASE("zero data solve exits cleanly with a zero solution") {
        auto j = base_config();
        j["problem"]["pairs"][0]["f"] = 0.0;
        j["output"] = dir + "/zero";
        write_text(dir + "/cfg_zero.json", j.dump(1));
        CHECK(run_cli("--config " + dir + "/cfg_zero.json solve") == 0);
        SolutionTable tab = read_solution_csv(dir + "/zero/solution.csv", 1);
        for (double v : tab.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
        nlohmann::json solved =
            nlohmann::json::parse(slurp(dir + "/zero/reports/solve.json"));
        CHECK(solved["iterations"].get<int>() <= 2);
    }
    SUBCASE("one-sided kernel fails certification with the failing delta listed") {
        auto j = base_config();
        j["kernels"] = {{{"name", "oneside"}, {"type", "halfspace"}, {"amplitude", 1.0},
                         {"axis", {1.0}}}};
        j["problem"]["pairs"][0]["kernel"] = "oneside";
        j["output"] = dir + "/oneside";
        write_text(dir + "/cfg_oneside.json", j.dump(1));
        CHECK(run_cli("--config " + dir + "/cfg_oneside.json certify") != 0);
        auto rep = nlohmann::json::parse(slurp(dir + "/oneside/reports/certify.json"));
        CHECK(rep["kernels"][0]["pass_H3"] == false);
        CHECK(rep["kernels"][0].contains("first_failing_delta"));
    }
    SUBCASE("diagnose requires a solution file") {
        auto j = base_config();
        j["output"] = dir + "/nosol";
        write_text(dir + "/cfg_nosol.json", j.dump(1));
        CHECK(run_cli("--config " + dir + "/cfg_nosol.json diagnose") != 0);
    }
    SUBCASE("config errors surface as exit code 2") {
        auto j = base_config();
        j["params"]["sigma"] = 0.5;
        j["params"]["C0"] = 1.0;
        write_text(dir + "/cfg_bad.json", j.dump(1));
        CHECK(run_cli("--config " + dir + "/cfg_bad.json certify") == 2);
    }
}
