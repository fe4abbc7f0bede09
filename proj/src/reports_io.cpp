#include "nonlocal/reports_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nonlocal {

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

json to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
    return a;
}

json to_json(const AnnulusReport& r) {
    return json{{"delta", r.delta},
                {"mass", r.mass},
                {"mass_bound", r.mass_bound},
                {"first_moment", r.first_moment},
                {"moment_bound", r.moment_bound},
                {"lower_set_fraction", r.lower_set_fraction},
                {"fraction_stderr", r.fraction_stderr},
                {"quad_tol", r.quad_tol},
                {"integrable", r.integrable},
                {"pass_H1", r.pass_H1},
                {"pass_H2", r.pass_H2},
                {"pass_H3", r.pass_H3}};
}

json to_json(const ConeReport& r) {
    return json{{"x", to_json(r.x)},       {"r", r.r},
                {"y", to_json(r.y)},       {"s", r.s},
                {"cone_mass", r.cone_mass}, {"required_mass", r.required_mass},
                {"pass", r.pass},          {"skipped", r.skipped},
                {"note", r.note}};
}

json to_json(const BarrierReport& r) {
    return json{{"kind", r.kind},
                {"pass", r.pass},
                {"alpha", r.alpha},
                {"r0", r.r0},
                {"s0", r.s0},
                {"epsilon", r.epsilon},
                {"expected_epsilon", r.expected_epsilon},
                {"worst_slack", r.worst_slack},
                {"probes", r.probes},
                {"note", r.note}};
}

json to_json(const SolveReport& r) {
    json active = json::array();
    for (const auto& [a, b] : r.active_indices) active.push_back(json::array({a, b}));
    return json{{"iterations", r.iterations},
                {"converged", r.converged},
                {"monotone", r.monotone},
                {"sandwich_ok", r.sandwich_ok},
                {"final_max_delta", r.final_max_delta},
                {"runtime_seconds", r.runtime_seconds},
                {"residual_history", r.residual_history},
                {"active_indices", active},
                {"note", r.note}};
}

json to_json(const ResidualReport& r) {
    return json{{"pass", r.pass}, {"worst", r.worst}, {"worst_node", r.worst_node},
                {"nodes", r.nodes}};
}

json to_json(const HolderReport& r) {
    return json{{"center", to_json(r.center)},
                {"base", r.base},
                {"levels", r.levels},
                {"m_k", r.m_k},
                {"M_k", r.M_k},
                {"nodes_k", r.nodes_k},
                {"fitted", r.fitted},
                {"perfect_regularity", r.perfect_regularity},
                {"alpha_hat", r.alpha_hat},
                {"fit_residual", r.fit_residual},
                {"epsilon4_implied", r.epsilon4_implied},
                {"note", r.note}};
}

json to_json(const HarnackReport& r) {
    return json{{"center", to_json(r.center)},
                {"r", r.r},
                {"C1", r.C1},
                {"sigma", r.sigma},
                {"u_center", r.u_center},
                {"thresholds", r.thresholds},
                {"measures", r.measures},
                {"fitted", r.fitted},
                {"epsilon3", r.epsilon3},
                {"C", r.C},
                {"majorizes", r.majorizes},
                {"note", r.note}};
}

json to_json(const AxiomReport& r) {
    return json{{"pass_A2", r.pass_A2}, {"pass_A3", r.pass_A3}, {"pass_A4", r.pass_A4},
                {"worst_A2", r.worst_A2}, {"worst_A3", r.worst_A3}, {"worst_A4", r.worst_A4},
                {"samples", r.samples}};
}

json to_json(const EllipticityReport& r) {
    return json{{"pass", r.pass}, {"worst_slack", r.worst_slack}, {"samples", r.samples}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_annulus_csv(const std::string& path, const std::vector<AnnulusReport>& reports) {
    std::ostringstream os;
    os << "delta,mass,mass_bound,first_moment,moment_bound,lower_set_fraction,"
          "pass_H1,pass_H2,pass_H3\n";
    for (const auto& r : reports) {
        os << fmt(r.delta) << ',' << fmt(r.mass) << ',' << fmt(r.mass_bound) << ','
           << fmt(r.first_moment) << ',' << fmt(r.moment_bound) << ','
           << fmt(r.lower_set_fraction) << ',' << (r.pass_H1 ? 1 : 0) << ','
           << (r.pass_H2 ? 1 : 0) << ',' << (r.pass_H3 ? 1 : 0) << '\n';
    }
    write_text(path, os.str());
}

void write_solution_csv(const std::string& path, const GridFunction& w,
                        const std::vector<double>& residuals,
                        const std::vector<std::pair<int, int>>& active) {
    std::ostringstream os;
    for (int i = 0; i < w.dim(); ++i) os << 'x' << i << ',';
    os << "value,residual,active_a,active_b,interior\n";
    std::size_t slot = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const Vec x = w.node(k);
        for (int i = 0; i < w.dim(); ++i) os << fmt(x[i]) << ',';
        const bool inter = w.node_interior(k);
        double res = 0.0;
        int a = -1, b = -1;
        if (inter && slot < residuals.size()) {
            res = residuals[slot];
            if (slot < active.size()) {
                a = active[slot].first;
                b = active[slot].second;
            }
            ++slot;
        }
        os << fmt(w.value(k)) << ',' << fmt(res) << ',' << a << ',' << b << ','
           << (inter ? 1 : 0) << '\n';
    }
    write_text(path, os.str());
}

void write_holder_csv(const std::string& path, const HolderReport& rep) {
    std::ostringstream os;
    os << "k,radius,m_k,M_k,oscillation,nodes\n";
    for (int k = 0; k < rep.levels; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        os << k << ',' << fmt(std::pow(rep.base, -k)) << ',' << fmt(rep.m_k[kk]) << ','
           << fmt(rep.M_k[kk]) << ',' << fmt(rep.M_k[kk] - rep.m_k[kk]) << ',' << rep.nodes_k[kk]
           << '\n';
    }
    write_text(path, os.str());
}

void write_harnack_csv(const std::string& path, const HarnackReport& rep) {
    std::ostringstream os;
    os << "t,measure,bound\n";
    const double scale =
        std::pow(rep.r, rep.dim) *
        std::pow(rep.u_center + rep.C1 * std::pow(rep.r, rep.sigma), rep.epsilon3);
    for (std::size_t i = 0; i < rep.thresholds.size(); ++i) {
        const double t = rep.thresholds[i];
        const double bound =
            (rep.fitted && t > 0.0) ? rep.C * scale * std::pow(t, -rep.epsilon3) : 0.0;
        os << fmt(t) << ',' << fmt(rep.measures[i]) << ',' << fmt(bound) << '\n';
    }
    write_text(path, os.str());
}

void write_field_csv(const std::string& path, const GridFunction& w) {
    std::ostringstream os;
    for (int i = 0; i < w.dim(); ++i) os << 'x' << i << ',';
    os << "value,interior\n";
    for (std::size_t k = 0; k < w.size(); ++k) {
        const Vec x = w.node(k);
        for (int i = 0; i < w.dim(); ++i) os << fmt(x[i]) << ',';
        os << fmt(w.value(k)) << ',' << (w.node_interior(k) ? 1 : 0) << '\n';
    }
    write_text(path, os.str());
}

namespace {
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}
}  // namespace

SolutionTable read_solution_csv(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty solution file " + path);
    const auto header = split_csv_line(line);
    const std::size_t want = static_cast<std::size_t>(dim) + 5;
    if (header.size() != want)
        throw std::runtime_error("solution file has unexpected column count");
    SolutionTable tab;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != want) throw std::runtime_error("ragged solution row");
        tab.values.push_back(std::stod(cells[static_cast<std::size_t>(dim)]));
        tab.interior.push_back(std::stoi(cells.back()));
    }
    return tab;
}

std::vector<BoundarySample> read_boundary_samples_csv(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<BoundarySample> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < 2 * static_cast<std::size_t>(dim))
            throw std::runtime_error("boundary sample row too short");
        BoundarySample s;
        s.x = Vec(dim);
        s.inward_normal = Vec(dim);
        for (int i = 0; i < dim; ++i) {
            s.x[i] = std::stod(cells[static_cast<std::size_t>(i)]);
            s.inward_normal[i] = std::stod(cells[static_cast<std::size_t>(dim + i)]);
        }
        const double nn = norm(s.inward_normal);
        if (nn > 0.0) s.inward_normal *= 1.0 / nn;
        out.push_back(s);
    }
    return out;
}

TableKernelData read_kernel_table_csv(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line);  // header
    TableKernelData data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < 2) throw std::runtime_error("kernel table row too short");
        const double z = std::stod(cells[0]);
        const double k = std::stod(cells[1]);
        if (dim == 1 && z < 0.0)
            data.negative.emplace_back(-z, k);
        else
            data.positive.emplace_back(std::fabs(z), k);
    }
    return data;
}

}  // namespace nonlocal
