#include "nonlocal/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "nonlocal/reports_io.hpp"

namespace nonlocal {

namespace {

Vec vec_from(const nlohmann::ordered_json& a, int dim_hint = 0) {
    if (!a.is_array() || a.empty() || a.size() > static_cast<std::size_t>(kMaxDim))
        throw std::invalid_argument("config: expected coordinate array of size 1..3");
    Vec v(static_cast<int>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
    if (dim_hint && v.dim() != dim_hint)
        throw std::invalid_argument("config: coordinate array has wrong dimension");
    return v;
}

RunConfig::FieldSpec field_from(const nlohmann::ordered_json& j, int dim) {
    RunConfig::FieldSpec f;
    if (j.is_number()) {
        f.value = j.get<double>();
        return f;
    }
    f.type = j.value("type", "constant");
    f.value = j.value("value", 0.0);
    if (f.type == "affine") {
        f.slope = j.contains("slope") ? vec_from(j["slope"], dim) : Vec(dim);
    } else if (f.type != "constant") {
        throw std::invalid_argument("config: field type must be constant or affine");
    }
    return f;
}

std::function<double(const Vec&)> field_fn(const RunConfig::FieldSpec& f) {
    if (f.type == "affine") {
        const double c0 = f.value;
        const Vec s = f.slope;
        return [c0, s](const Vec& x) { return c0 + dot(s, x); };
    }
    const double c = f.value;
    return [c](const Vec&) { return c; };
}

double field_sup_on_box(const RunConfig::FieldSpec& f, const Box& box) {
    if (f.type != "affine") return std::fabs(f.value);
    double worst = 0.0;
    const int corners = 1 << box.dim();
    for (int c = 0; c < corners; ++c) {
        Vec x = box.lo;
        for (int i = 0; i < box.dim(); ++i)
            if (c & (1 << i)) x[i] = box.hi[i];
        worst = std::max(worst, std::fabs(f.value + dot(f.slope, x)));
    }
    return worst;
}

}  // namespace

std::vector<double> default_alpha_grid(double sigma) {
    const double cap = 0.95 * std::min(1.0, sigma);
    std::vector<double> out;
    for (double f : {1.0, 0.6, 0.4, 0.25, 0.15, 0.1, 0.06, 0.03, 0.015})
        out.push_back(cap * f);
    return out;
}

std::vector<double> default_r_grid() { return {0.01, 0.03, 0.1, 0.3, 1.0, 3.0}; }

RunConfig parse_config(const nlohmann::ordered_json& j) {
    RunConfig cfg;
    cfg.raw = j;
    cfg.dim = j.value("dim", 1);
    if (cfg.dim < 1 || cfg.dim > kMaxDim)
        throw std::invalid_argument("config: dim must be 1..3");

    const auto& p = j.at("params");
    cfg.params.sigma = p.at("sigma").get<double>();
    cfg.params.lambda = p.value("lambda", 1.0);
    cfg.params.Lambda = p.value("Lambda", cfg.params.lambda);
    cfg.params.mu = p.value("mu", 1.0);
    cfg.params.C0 = p.value("C0", 0.0);

    const auto& d = j.at("domain");
    cfg.domain_type = d.value("type", "interval");
    cfg.r_omega = d.value("r_omega", 0.5);
    if (cfg.domain_type == "interval") {
        cfg.interval_a = d.value("a", -1.0);
        cfg.interval_b = d.value("b", 1.0);
    } else if (cfg.domain_type == "ball") {
        cfg.ball_center = d.contains("center") ? vec_from(d["center"], cfg.dim) : Vec(cfg.dim);
        cfg.ball_radius = d.value("radius", 1.0);
        cfg.boundary_sample_count = d.value("boundary_samples", 16);
    } else {
        throw std::invalid_argument("config: domain type must be interval or ball");
    }
    cfg.boundary_samples_csv = d.value("samples_csv", std::string{});

    for (const auto& kj : j.at("kernels")) {
        RunConfig::KernelSpec ks;
        ks.name = kj.at("name").get<std::string>();
        ks.type = kj.at("type").get<std::string>();
        ks.amplitude = kj.value("amplitude", 1.0);
        if (kj.contains("axis")) ks.axis = vec_from(kj["axis"], cfg.dim);
        ks.ratio = kj.value("ratio", 1.0);
        if (kj.contains("slope")) ks.slope = vec_from(kj["slope"], cfg.dim);
        ks.csv = kj.value("csv", std::string{});
        cfg.kernels.push_back(ks);
    }

    const auto& pr = j.at("problem");
    cfg.n_a = pr.value("n_a", 1);
    cfg.n_b = pr.value("n_b", 1);
    cfg.gamma = pr.value("gamma", 0.0);
    cfg.g = pr.contains("g") ? field_from(pr["g"], cfg.dim) : RunConfig::FieldSpec{};
    cfg.g_lipschitz = pr.value("g_lipschitz", 0.0);
    cfg.f_sup = pr.value("f_sup", -1.0);
    for (const auto& pj : pr.at("pairs")) {
        RunConfig::PairSpec ps;
        ps.a = pj.value("a", 0);
        ps.b = pj.value("b", 0);
        ps.kernel = pj.at("kernel").get<std::string>();
        if (pj.contains("drift")) {
            ps.drift = vec_from(pj["drift"], cfg.dim);
            ps.has_drift = norm(ps.drift) > 0.0;
        }
        ps.c = pj.contains("c") ? field_from(pj["c"], cfg.dim) : RunConfig::FieldSpec{};
        ps.f = pj.contains("f") ? field_from(pj["f"], cfg.dim) : RunConfig::FieldSpec{};
        cfg.pairs.push_back(ps);
    }

    const auto& gr = j.at("grid");
    cfg.box_lo = vec_from(gr.at("box_lo"), cfg.dim);
    cfg.box_hi = vec_from(gr.at("box_hi"), cfg.dim);
    cfg.h = gr.at("h").get<double>();
    cfg.R = gr.value("R", 32.0);
    cfg.rho = gr.value("rho", 0.0);
    cfg.annuli_per_decade = gr.value("annuli_per_decade", 5.0);
    cfg.radial_nodes = gr.value("radial_nodes", 6);
    cfg.angular_nodes = gr.value("angular_nodes", 16);

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        cfg.tol = s.value("tol", 1e-9);
        cfg.max_sweeps = s.value("max_sweeps", static_cast<std::size_t>(20000));
        cfg.mode = s.value("mode", "gauss-seidel");
        cfg.threads = s.value("threads", 1);
    }

    if (j.contains("barriers")) {
        const auto& b = j["barriers"];
        cfg.barrier_kind = b.value("kind", "uniform");
        if (b.contains("alpha_grid"))
            for (const auto& a : b["alpha_grid"]) cfg.alpha_grid.push_back(a.get<double>());
        if (b.contains("r_grid"))
            for (const auto& r : b["r_grid"]) cfg.r_grid.push_back(r.get<double>());
        if (b.contains("boundary_radii"))
            for (const auto& r : b["boundary_radii"]) cfg.boundary_radii.push_back(r.get<double>());
        cfg.C3 = b.value("C3", 0.0);
        cfg.C4 = b.value("C4", 0.0);
        cfg.C5 = b.value("C5", 0.0);
        cfg.s_min = b.value("s_min", 1e-3);
    }

    if (j.contains("diagnostics")) {
        const auto& dg = j["diagnostics"];
        if (dg.contains("centers"))
            for (const auto& c : dg["centers"]) cfg.centers.push_back(vec_from(c, cfg.dim));
        cfg.base = dg.value("base", 8.0);
        cfg.levels = dg.value("levels", 3);
        if (dg.contains("thresholds"))
            for (const auto& t : dg["thresholds"]) cfg.thresholds.push_back(t.get<double>());
        cfg.delta_tilde = dg.value("delta_tilde", 0.1);
        cfg.harnack_center =
            dg.contains("harnack_center") ? vec_from(dg["harnack_center"], cfg.dim) : Vec(cfg.dim);
        cfg.harnack_r = dg.value("harnack_r", 0.5);
        cfg.C1 = dg.value("C1", 0.0);
    }

    cfg.output_dir = j.value("output", "out");
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    nlohmann::ordered_json j;
    in >> j;
    return parse_config(j);
}

void RunConfig::validate() const {
    params.validate();
    if (params.sigma < 1.0) {
        for (const auto& ps : pairs)
            if (ps.has_drift)
                throw std::invalid_argument(
                    "config: drift must be absent when sigma < 1 (pair " + std::to_string(ps.a) +
                    "," + std::to_string(ps.b) + ")");
    }
    if (barrier_kind == "degenerate" && !(gamma > 0.0))
        throw std::invalid_argument("config: degenerate barriers require gamma > 0");
    if (barrier_kind != "uniform" && barrier_kind != "degenerate")
        throw std::invalid_argument("config: barrier kind must be uniform or degenerate");
    if (!(h > 0.0) || !(R > 0.0)) throw std::invalid_argument("config: h and R must be positive");
    if (rho != 0.0 && !(rho > 0.0 && rho < R))
        throw std::invalid_argument("config: rho must satisfy 0 < rho < R");
    if (pairs.size() != static_cast<std::size_t>(n_a) * static_cast<std::size_t>(n_b))
        throw std::invalid_argument("config: pair table must cover n_a x n_b");
    if (mode != "gauss-seidel" && mode != "jacobi")
        throw std::invalid_argument("config: solver mode must be gauss-seidel or jacobi");
    if (!(r_omega > 0.0 && r_omega < 1.0))
        throw std::invalid_argument("config: r_omega must lie in (0,1)");
    for (const auto& ps : pairs) {
        if (ps.c.type == "constant" && ps.c.value < 0.0)
            throw std::invalid_argument("config: zeroth-order coefficient must be nonnegative");
        if (gamma > 0.0 && ps.c.type == "constant" && ps.c.value < gamma)
            throw std::invalid_argument("config: c must dominate gamma");
    }
}

Domain make_domain(const RunConfig& cfg) {
    Domain d = cfg.domain_type == "interval"
                   ? make_interval_domain(cfg.interval_a, cfg.interval_b, cfg.r_omega)
                   : make_ball_domain(cfg.ball_center, cfg.ball_radius, cfg.r_omega,
                                      cfg.boundary_sample_count);
    if (!cfg.boundary_samples_csv.empty())
        d.boundary_samples = read_boundary_samples_csv(cfg.boundary_samples_csv, cfg.dim);
    return d;
}

Kernel make_kernel(const RunConfig& cfg, const std::string& name) {
    for (const auto& ks : cfg.kernels) {
        if (ks.name != name) continue;
        if (ks.type == "fractional")
            return make_fractional_kernel(cfg.params, ks.amplitude, cfg.dim, ks.name);
        if (ks.type == "anisotropic")
            return make_anisotropic_kernel(cfg.params, ks.amplitude,
                                           ks.axis.dim() == cfg.dim ? ks.axis : unit(cfg.dim, 0),
                                           ks.ratio, ks.name);
        if (ks.type == "halfspace")
            return make_halfspace_kernel(cfg.params, ks.amplitude,
                                         ks.axis.dim() == cfg.dim ? ks.axis : unit(cfg.dim, 0),
                                         ks.name);
        if (ks.type == "scaled_fractional")
            return make_scaled_fractional_kernel(cfg.params, ks.amplitude,
                                                 ks.slope.dim() == cfg.dim ? ks.slope
                                                                           : Vec(cfg.dim),
                                                 1e-8, ks.name);
        if (ks.type == "table")
            return make_table_kernel(cfg.params, read_kernel_table_csv(ks.csv, cfg.dim), cfg.dim,
                                     ks.name);
        throw std::invalid_argument("config: unknown kernel type " + ks.type);
    }
    throw std::invalid_argument("config: unknown kernel name " + name);
}

std::vector<Kernel> make_kernels(const RunConfig& cfg) {
    std::vector<Kernel> out;
    for (const auto& ks : cfg.kernels) out.push_back(make_kernel(cfg, ks.name));
    return out;
}

Box make_box(const RunConfig& cfg) { return Box{cfg.box_lo, cfg.box_hi}; }

BellmanProblem make_problem(const RunConfig& cfg) {
    BellmanProblem P;
    P.n_a = cfg.n_a;
    P.n_b = cfg.n_b;
    P.gamma = cfg.gamma;
    P.params = cfg.params;
    P.domain = make_domain(cfg);
    const auto gfn = field_fn(cfg.g);
    P.g = gfn;
    const double lip = cfg.g_lipschitz + (cfg.g.type == "affine" ? norm(cfg.g.slope) : 0.0);
    P.modulus_g = [lip](double t) { return lip * t; };
    const Box box = make_box(cfg);
    P.g_bound = field_sup_on_box(cfg.g, box);

    double f_sup = 0.0, c_sup = 0.0;
    for (const auto& ps : cfg.pairs) {
        BellmanPair pair;
        pair.a = ps.a;
        pair.b = ps.b;
        pair.kernel = make_kernel(cfg, ps.kernel);
        if (ps.has_drift) {
            const Vec b = ps.drift;
            pair.drift = [b](const Vec&) { return b; };
            P.has_drift = true;
        }
        pair.c = field_fn(ps.c);
        pair.f = field_fn(ps.f);
        f_sup = std::max(f_sup, field_sup_on_box(ps.f, box));
        c_sup = std::max(c_sup, field_sup_on_box(ps.c, box));
        P.pairs.push_back(std::move(pair));
    }
    P.f_sup = cfg.f_sup >= 0.0 ? cfg.f_sup : f_sup;
    P.c_sup = c_sup;
    P.validate();
    return P;
}

QuadratureParams make_quadrature(const RunConfig& cfg) {
    QuadratureParams q;
    q.inner_radius = cfg.rho;
    q.truncation = cfg.R;
    q.annuli_per_decade = cfg.annuli_per_decade;
    q.radial_nodes = cfg.radial_nodes;
    q.angular_nodes = cfg.angular_nodes;
    return q;
}

SolverOptions make_solver_options(const RunConfig& cfg) {
    SolverOptions opt;
    opt.tol = cfg.tol;
    opt.max_sweeps = cfg.max_sweeps;
    opt.mode = cfg.mode == "jacobi" ? SweepMode::kJacobi : SweepMode::kGaussSeidel;
    opt.threads = cfg.threads;
    return opt;
}

}  // namespace nonlocal
