#ifndef NONLOCAL_REPORTS_IO_HPP
#define NONLOCAL_REPORTS_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "nonlocal/barriers.hpp"
#include "nonlocal/grid.hpp"
#include "nonlocal/kernel_checks.hpp"
#include "nonlocal/perron.hpp"
#include "nonlocal/regularity.hpp"

namespace nonlocal {

using json = nlohmann::ordered_json;

json to_json(const Vec& v);
json to_json(const AnnulusReport& r);
json to_json(const ConeReport& r);
json to_json(const BarrierReport& r);
json to_json(const SolveReport& r);
json to_json(const ResidualReport& r);
json to_json(const HolderReport& r);
json to_json(const HarnackReport& r);
json to_json(const AxiomReport& r);
json to_json(const EllipticityReport& r);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);

// tables/*.csv writers (deterministic %.17g formatting)
void write_annulus_csv(const std::string& path, const std::vector<AnnulusReport>& reports);
void write_solution_csv(const std::string& path, const GridFunction& w,
                        const std::vector<double>& residuals,
                        const std::vector<std::pair<int, int>>& active);
void write_holder_csv(const std::string& path, const HolderReport& rep);
void write_harnack_csv(const std::string& path, const HarnackReport& rep);
void write_field_csv(const std::string& path, const GridFunction& w);

// solution.csv reader; lattice geometry comes from the grid spec
struct SolutionTable {
    std::vector<double> values;
    std::vector<int> interior;
};
SolutionTable read_solution_csv(const std::string& path, int dim);

// boundary sample cloud: columns x0..x{d-1}, n0..n{d-1}
std::vector<BoundarySample> read_boundary_samples_csv(const std::string& path, int dim);

// tabulated kernel: columns z, density (1d) or |z|, density
TableKernelData read_kernel_table_csv(const std::string& path, int dim);

}  // namespace nonlocal

#endif  // NONLOCAL_REPORTS_IO_HPP
