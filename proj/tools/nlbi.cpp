// nlbi: batch front-end for nonlocal Bellman-Isaacs Dirichlet problems.
// Stages: certify (kernel class + barriers), solve (monotone Perron
// iteration between the built sub/supersolution), diagnose (Holder and
// weak-Harnack measurements on the computed solution).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nonlocal/config.hpp"
#include "nonlocal/reports_io.hpp"

namespace fs = std::filesystem;
using namespace nonlocal;

namespace {

struct OutPaths {
    std::string root, reports, tables;
};

OutPaths prepare_output(const std::string& dir) {
    OutPaths p{dir, dir + "/reports", dir + "/tables"};
    fs::create_directories(p.reports);
    fs::create_directories(p.tables);
    return p;
}

std::vector<Vec> interior_probes(const GridFunction& proto, std::size_t max_count) {
    const auto nodes = proto.interior_nodes();
    std::vector<Vec> out;
    if (nodes.empty()) return out;
    const std::size_t stride = std::max<std::size_t>(1, nodes.size() / max_count);
    for (std::size_t i = 0; i < nodes.size(); i += stride) out.push_back(proto.node(nodes[i]));
    return out;
}

GridFunction make_proto(const RunConfig& cfg, const BellmanProblem& P) {
    return GridFunction(make_box(cfg), cfg.h, P.domain.inside, P.g, P.g_bound);
}

struct CertBundle {
    bool kernels_ok = true;
    bool barriers_ok = true;
    UniformCertificates uniform;
    DegenerateCertificates degenerate;
    json report = json::object();
};

CertBundle run_certify(const RunConfig& cfg, const BellmanProblem& P, const OutPaths& out) {
    CertBundle bundle;
    const QuadratureParams q = make_quadrature(cfg);
    const std::vector<Kernel> kernels = make_kernels(cfg);
    const bool degenerate = cfg.barrier_kind == "degenerate";

    // class certification per kernel, at a representative interior point
    const GridFunction proto = make_proto(cfg, P);
    const auto probes = interior_probes(proto, 3);
    const Vec x0 = probes.empty() ? Vec(cfg.dim) : probes[probes.size() / 2];
    const auto deltas = dyadic_deltas(cfg.h, cfg.R, 16);
    json kernel_reports = json::array();
    for (const auto& k : kernels) {
        const auto reps = check_annulus_bounds(k, x0, deltas, q);
        write_annulus_csv(out.tables + "/annulus_" + k.label + ".csv", reps);
        json jk;
        jk["kernel"] = k.label;
        json arr = json::array();
        bool h12 = true, h3 = true;
        std::string failing;
        for (const auto& r : reps) {
            arr.push_back(to_json(r));
            if (!r.pass_H1 || !r.pass_H2) h12 = false;
            if (!r.pass_H3) {
                h3 = false;
                if (failing.empty()) failing = std::to_string(r.delta);
            }
        }
        jk["annuli"] = arr;
        jk["pass_H1_H2"] = h12;
        jk["pass_H3"] = h3;
        if (!h3) jk["first_failing_delta"] = failing;
        if (!h12) bundle.kernels_ok = false;
        if (!degenerate && !h3) bundle.kernels_ok = false;  // uniform class needs (H3)
        kernel_reports.push_back(jk);
    }
    bundle.report["kernels"] = kernel_reports;

    // boundary cone checks for the degenerate class
    if (degenerate) {
        const double C4 = cfg.C4 > 0.0 ? cfg.C4 : sufficient_C4(cfg.dim, cfg.params.mu);
        json cones = json::array();
        const double r = 0.5 * P.domain.r_Omega;
        for (const auto& k : kernels) {
            for (const auto& smp : P.domain.boundary_samples) {
                for (double s : {0.25, 0.5}) {
                    const Vec y = smp.exterior_center(r) + (1.0 + s) * r * smp.inward_normal;
                    if (!P.domain.inside(y)) continue;
                    const ConeReport cr =
                        check_boundary_cone(k, P.domain, smp.x, r, y, C4, q, cfg.s_min);
                    json jc = to_json(cr);
                    jc["kernel"] = k.label;
                    cones.push_back(jc);
                    if (!cr.pass && !cr.skipped) bundle.kernels_ok = false;
                }
            }
        }
        bundle.report["cones"] = cones;
        bundle.report["C4"] = C4;
    }

    // barrier certification
    const auto alpha_grid =
        cfg.alpha_grid.empty() ? default_alpha_grid(cfg.params.sigma) : cfg.alpha_grid;
    const auto r_grid = cfg.r_grid.empty() ? default_r_grid() : cfg.r_grid;
    QuadratureParams qb = q;
    qb.tail_Lambda = 0.0;
    for (const auto& k : kernels)
        qb.tail_Lambda = std::max(
            qb.tail_Lambda, effective_H1_Lambda(k, x0, dyadic_deltas(1e-3, 1e3, 25), q));

    if (!degenerate) {
        const BarrierReport hs = certify_halfspace_decay(kernels, alpha_grid, r_grid, qb);
        bundle.report["halfspace_decay"] = to_json(hs);
        BarrierReport rad;
        BarrierReport bump;
        if (hs.pass) {
            rad = certify_radial_barrier(kernels, hs.alpha, cfg.params.C0, r_grid, qb);
            bundle.report["radial_barrier"] = to_json(rad);
            if (rad.pass) {
                const double C3 =
                    cfg.C3 > 0.0 ? cfg.C3 : 4.0 / std::pow(rad.r0, hs.alpha);
                const double rb = cfg.boundary_radii.empty() ? 0.5 * P.domain.r_Omega
                                                             : cfg.boundary_radii.front();
                bump = certify_boundary_bump(kernels, P.domain, P.domain.boundary_samples.front(),
                                             rb, C3, hs.alpha, rad.r0, interior_probes(proto, 9),
                                             qb);
                bundle.report["boundary_bump"] = to_json(bump);
                bundle.uniform.pass = bump.pass;
                bundle.uniform.alpha = hs.alpha;
                bundle.uniform.r0 = rad.r0;
                bundle.uniform.C3 = C3;
                bundle.uniform.eps7 = std::min(bump.epsilon, bump.expected_epsilon);
            }
        }
        bundle.barriers_ok = bundle.uniform.pass;
    } else {
        // search (alpha, s0) for the coercive barrier
        bool found = false;
        for (double alpha : alpha_grid) {
            for (double s0 : {0.5, 0.25, 0.1}) {
                const double C5 =
                    cfg.C5 > 0.0 ? cfg.C5
                                 : 2.0 * (P.f_sup + 1.0) / (std::pow(s0, alpha) * P.gamma);
                const auto& smp = P.domain.boundary_samples.front();
                const double rb = cfg.boundary_radii.empty() ? 0.25 * P.domain.r_Omega
                                                             : cfg.boundary_radii.front();
                std::vector<Vec> probes_ring;
                for (double s : {0.25 * s0, 0.5 * s0, 0.9 * s0, 2.0 * s0, 4.0 * s0}) {
                    const Vec y = smp.exterior_center(rb) + (1.0 + s) * rb * smp.inward_normal;
                    if (P.domain.inside(y)) probes_ring.push_back(y);
                }
                BarrierReport dr;
                try {
                    dr = certify_degenerate_barrier(P, smp, rb, C5, alpha, s0, probes_ring, qb);
                } catch (const std::exception& e) {
                    continue;
                }
                if (dr.pass) {
                    bundle.report["degenerate_barrier"] = to_json(dr);
                    bundle.degenerate.pass = true;
                    bundle.degenerate.alpha = alpha;
                    bundle.degenerate.s0 = s0;
                    bundle.degenerate.C5 = C5;
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        bundle.barriers_ok = found;
        if (!found) bundle.report["degenerate_barrier"] = json{{"pass", false}};
    }
    return bundle;
}

int cmd_certify(const RunConfig& cfg, const OutPaths& out) {
    const BellmanProblem P = make_problem(cfg);
    CertBundle b = run_certify(cfg, P, out);
    b.report["pass"] = b.kernels_ok && b.barriers_ok;
    write_json(out.reports + "/certify.json", b.report);
    std::printf("certify: kernels %s, barriers %s\n", b.kernels_ok ? "pass" : "FAIL",
                b.barriers_ok ? "pass" : "FAIL");
    return (b.kernels_ok && b.barriers_ok) ? 0 : 1;
}

int cmd_solve(const RunConfig& cfg, const OutPaths& out, bool force) {
    const BellmanProblem P = make_problem(cfg);
    const QuadratureParams q = make_quadrature(cfg);
    CertBundle certs = run_certify(cfg, P, out);
    write_json(out.reports + "/certify.json", certs.report);
    if (!(certs.kernels_ok && certs.barriers_ok) && !force) {
        std::printf("solve: certification failed; rerun with --force to proceed anyway\n");
        return 1;
    }

    const Box box = make_box(cfg);
    BoundarySampling sampling;
    sampling.radii = cfg.boundary_radii;
    if (sampling.radii.empty())
        for (double r = 0.5 * P.domain.r_Omega; r > 0.02 * P.domain.r_Omega; r *= 0.5)
            sampling.radii.push_back(r);

    const GridFunction proto = make_proto(cfg, P);
    const auto norm_probes = interior_probes(proto, 16);
    GridFunction sub, super;
    if (cfg.barrier_kind == "degenerate") {
        sub = build_subsolution_degenerate(P, certs.degenerate, sampling, box, cfg.h);
        super = build_supersolution_degenerate(P, certs.degenerate, sampling, box, cfg.h);
    } else {
        UniformCertificates uc = certs.uniform;
        if (force && !uc.pass) {
            uc.pass = true;  // explicit override
            if (uc.alpha <= 0.0) uc.alpha = 0.1;
            if (uc.r0 <= 0.0) uc.r0 = 0.1;
            if (uc.C3 <= 0.0) uc.C3 = 4.0 / std::pow(uc.r0, uc.alpha);
            if (uc.eps7 <= 0.0) uc.eps7 = 1e-3;
        }
        sub = build_subsolution(P, uc, sampling, box, cfg.h, q, norm_probes);
        super = build_supersolution(P, uc, sampling, box, cfg.h, q, norm_probes);
    }
    write_field_csv(out.tables + "/subsolution.csv", sub);
    write_field_csv(out.tables + "/supersolution.csv", super);

    auto [w, rep] = discrete_perron_solve(P, sub, super, make_solver_options(cfg), q);

    // per-node residuals of the final iterate
    std::vector<double> residuals;
    const GridField wf(w);
    for (std::size_t k : w.interior_nodes())
        residuals.push_back(bellman_isaacs(P, wf, w.node(k), std::nullopt, q).value);
    write_solution_csv(out.root + "/solution.csv", w, residuals, rep.active_indices);
    write_json(out.reports + "/solve.json", to_json(rep));
    std::printf("solve: %s in %zu sweeps (max delta %.3e, %.2fs)\n",
                rep.converged ? "converged" : "NOT CONVERGED", rep.iterations,
                rep.final_max_delta, rep.runtime_seconds);
    return (rep.converged && rep.monotone && rep.sandwich_ok) ? 0 : 1;
}

int cmd_diagnose(const RunConfig& cfg, const OutPaths& out, const std::string& solution_path) {
    const BellmanProblem P = make_problem(cfg);
    const QuadratureParams q = make_quadrature(cfg);
    const std::string path = solution_path.empty() ? out.root + "/solution.csv" : solution_path;
    if (!fs::exists(path)) {
        std::printf("diagnose: missing solution file %s\n", path.c_str());
        return 1;
    }
    GridFunction w = make_proto(cfg, P);
    const SolutionTable tab = read_solution_csv(path, cfg.dim);
    if (tab.values.size() != w.size()) {
        std::printf("diagnose: solution file does not match the configured lattice\n");
        return 1;
    }
    double bound = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w.set_value(k, tab.values[k]);
        bound = std::max(bound, std::fabs(tab.values[k]));
    }
    w.set_bound(bound);

    int status = 0;
    json holder_all = json::array();
    std::vector<Vec> centers = cfg.centers;
    if (centers.empty()) centers.push_back(Vec(cfg.dim));
    int idx = 0;
    for (const Vec& c : centers) {
        if (!P.domain.inside(c) || P.domain.boundary_dist(c) < cfg.delta_tilde) {
            std::printf("diagnose: center %d skipped (within delta_tilde of the boundary)\n", idx);
            holder_all.push_back(json{{"center", to_json(c)}, {"skipped", true}});
            ++idx;
            continue;
        }
        try {
            HolderReport hr = fit_holder_exponent(
                oscillation_profile(w, c, cfg.base, cfg.levels));
            holder_all.push_back(to_json(hr));
            write_holder_csv(out.tables + "/holder_" + std::to_string(idx) + ".csv", hr);
            if (hr.perfect_regularity)
                std::printf("diagnose: center %d perfectly regular (zero oscillation)\n", idx);
            else
                std::printf("diagnose: center %d alpha_hat = %.4f\n", idx, hr.alpha_hat);
        } catch (const std::exception& e) {
            std::printf("diagnose: center %d failed: %s\n", idx, e.what());
            status = 1;
        }
        ++idx;
    }
    write_json(out.reports + "/holder.json", holder_all);

    // weak Harnack on nonnegative solutions
    json harnack = json::object();
    double min_val = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) min_val = std::min(min_val, w.value(k));
    if (min_val < 0.0) {
        harnack["skipped"] = true;
        harnack["note"] = "solution has negative nodes; distribution bound not applicable";
        std::printf("diagnose: harnack skipped (negative values)\n");
    } else {
        const ResidualReport sup_chk = check_discrete_supersolution(P, w, q, 1e-5);
        std::vector<double> thresholds = cfg.thresholds;
        if (thresholds.empty()) {
            // ladder spanning the solution range, denser near the top
            for (int i = 5; i >= 1; --i) thresholds.push_back(bound * std::pow(0.5, i));
            for (int i = 1; i <= 8; ++i) thresholds.push_back(bound * (0.5 + 0.0625 * i));
            if (bound == 0.0) thresholds = {0.5};
        }
        HarnackReport hr = weak_harnack_check(w, cfg.harnack_center, cfg.harnack_r,
                                              cfg.C1 > 0.0 ? cfg.C1 : P.f_sup, cfg.params.sigma,
                                              thresholds);
        harnack = to_json(hr);
        harnack["supersolution_check"] = to_json(sup_chk);
        write_harnack_csv(out.tables + "/harnack.csv", hr);
        std::printf("diagnose: harnack eps3 = %.4f (majorizes: %s)\n", hr.epsilon3,
                    hr.majorizes ? "yes" : "no");
    }
    write_json(out.reports + "/harnack.json", harnack);
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal Bellman-Isaacs Dirichlet solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir, mode_override, solution_path;
    int threads_override = 0;
    bool force = false;

    app.add_option("--config", config_path, "configuration file (JSON)")->required();
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--mode", mode_override, "solver mode: jacobi|gauss-seidel");
    app.add_option("--threads", threads_override, "worker threads for jacobi sweeps");
    app.add_flag("--force", force, "proceed past failed certifications");

    auto* c_cert = app.add_subcommand("certify", "kernel class + barrier certification");
    auto* c_solve = app.add_subcommand("solve", "build sub/supersolutions and solve");
    auto* c_diag = app.add_subcommand("diagnose", "Holder / weak-Harnack diagnostics");
    auto* c_all = app.add_subcommand("all", "certify, solve, diagnose");
    c_diag->add_option("--solution", solution_path, "solution csv (default <out>/solution.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!mode_override.empty()) cfg.mode = mode_override;
        if (threads_override > 0) cfg.threads = threads_override;
        cfg.validate();
        const OutPaths paths = prepare_output(cfg.output_dir);
        write_json(paths.root + "/config_echo.json", cfg.raw);

        if (c_cert->parsed()) return cmd_certify(cfg, paths);
        if (c_solve->parsed()) return cmd_solve(cfg, paths, force);
        if (c_diag->parsed()) return cmd_diagnose(cfg, paths, solution_path);
        if (c_all->parsed()) {
            int rc = cmd_certify(cfg, paths);
            if (rc != 0 && !force) return rc;
            rc = cmd_solve(cfg, paths, force);
            if (rc != 0) return rc;
            return cmd_diagnose(cfg, paths, "");
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
