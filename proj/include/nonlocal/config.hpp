#ifndef NONLOCAL_CONFIG_HPP
#define NONLOCAL_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nonlocal/barriers.hpp"
#include "nonlocal/operators.hpp"
#include "nonlocal/perron.hpp"

namespace nonlocal {

// One run's configuration: problem, grid, solver and diagnostics blocks.
// Field names mirror the ellipticity symbols (sigma, lambda, Lambda, mu, C0,
// gamma) for traceability.
struct RunConfig {
    int dim = 1;
    EllipticityParams params;

    // domain
    std::string domain_type = "interval";  // interval | ball
    double interval_a = -1.0, interval_b = 1.0;
    Vec ball_center;
    double ball_radius = 1.0;
    double r_omega = 0.5;
    int boundary_sample_count = 16;
    std::string boundary_samples_csv;  // optional replacement cloud

    // kernels by name
    struct KernelSpec {
        std::string name;
        std::string type;  // fractional | anisotropic | halfspace | scaled_fractional | table
        double amplitude = 1.0;
        Vec axis;
        double ratio = 1.0;
        Vec slope;      // scaled_fractional
        std::string csv;  // table
    };
    std::vector<KernelSpec> kernels;

    // coefficient field: constant or affine c0 + slope.x
    struct FieldSpec {
        std::string type = "constant";  // constant | affine
        double value = 0.0;
        Vec slope;
    };
    struct PairSpec {
        int a = 0, b = 0;
        std::string kernel;
        bool has_drift = false;
        Vec drift;
        FieldSpec c, f;
    };
    int n_a = 1, n_b = 1;
    std::vector<PairSpec> pairs;
    double gamma = 0.0;
    FieldSpec g;
    double g_lipschitz = 0.0;
    double f_sup = -1.0;  // < 0: estimate from the pair table over the grid

    // grid + quadrature
    Vec box_lo, box_hi;
    double h = 0.03125;
    double R = 32.0;
    double rho = 0.0;  // 0 -> 2h
    double annuli_per_decade = 5.0;
    int radial_nodes = 6;
    int angular_nodes = 16;

    // solver
    double tol = 1e-9;
    std::size_t max_sweeps = 20000;
    std::string mode = "gauss-seidel";  // gauss-seidel | jacobi
    int threads = 1;

    // barriers
    std::string barrier_kind = "uniform";  // uniform | degenerate
    std::vector<double> alpha_grid;        // empty -> default geometric grid
    std::vector<double> r_grid;            // probe radii for decay certificates
    std::vector<double> boundary_radii;    // r-grid of the envelope sampling
    double C3 = 0.0;                       // 0 -> 4 / r0^alpha
    double C4 = 0.0;                       // 0 -> sufficient value for the dimension
    double C5 = 0.0;                       // 0 -> 2 (sup||f||+1) / (s0^alpha gamma)
    double s_min = 1e-3;

    // diagnostics
    std::vector<Vec> centers;
    double base = 8.0;
    int levels = 3;
    std::vector<double> thresholds;
    double delta_tilde = 0.1;
    Vec harnack_center;
    double harnack_r = 0.5;
    double C1 = 0.0;

    std::string output_dir = "out";
    nlohmann::ordered_json raw;  // config echo

    void validate() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::ordered_json& j);

Domain make_domain(const RunConfig& cfg);
std::vector<Kernel> make_kernels(const RunConfig& cfg);        // declared order
Kernel make_kernel(const RunConfig& cfg, const std::string& name);
BellmanProblem make_problem(const RunConfig& cfg);
QuadratureParams make_quadrature(const RunConfig& cfg);
SolverOptions make_solver_options(const RunConfig& cfg);
Box make_box(const RunConfig& cfg);
std::vector<double> default_alpha_grid(double sigma);
std::vector<double> default_r_grid();

}  // namespace nonlocal

#endif  // NONLOCAL_CONFIG_HPP
