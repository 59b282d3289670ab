#include "nhdeg/report.hpp"

#include <charconv>
#include <cmath>

namespace nhdeg {

namespace {

nlohmann::json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

nlohmann::json vec3(const Momentum& k) { return {num(k[0]), num(k[1]), num(k[2])}; }

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

nlohmann::json to_json(const DegeneracyRecord& rec) {
  nlohmann::json spheres = nlohmann::json::array();
  for (const SphereProbe& p : rec.diagnostics.spheres) {
    spheres.push_back({{"radius", num(p.radius)},
                       {"max_cond", num(p.max_cond)},
                       {"min_score", num(p.min_score)},
                       {"best_k", vec3(p.best_k)},
                       {"cond_S", num(p.cond_S)},
                       {"min_abs_eta", num(p.min_abs_eta)},
                       {"defective_direction", p.defective_direction}});
  }
  return {{"k_star", vec3(rec.k_star)},
          {"eigenvalue", {num(rec.eigenvalue.real()), num(rec.eigenvalue.imag())}},
          {"order", rec.order},
          {"kind", kind_name(rec.kind)},
          {"jordan_structure", rec.jordan_structure},
          {"diagnostics",
           {{"objective", num(rec.diagnostics.objective)},
            {"defect", rec.diagnostics.defect},
            {"ambiguous", rec.diagnostics.ambiguous},
            {"spheres", spheres}}}};
}

nlohmann::json to_json(const ScanDiagnostics& d) {
  return {{"grid_points", d.grid_points}, {"seeds", d.seeds},   {"accepted", d.accepted},
          {"defective_landings", d.defective_landings}, {"dropped", d.dropped}, {"merged", d.merged}};
}

nlohmann::json to_json(const ScanConfig& c) {
  return {{"grid", c.grid},
          {"refine_tol", c.refine_tol},
          {"cluster_radius", c.cluster_radius},
          {"sphere_radii", c.sphere_radii},
          {"directions_per_sphere", c.directions_per_sphere},
          {"defect_cond_threshold", c.defect_cond_threshold},
          {"max_evals", c.max_evals},
          {"rank_tol", c.rank_tol},
          {"include_defective", c.include_defective}};
}

nlohmann::json to_json(const SymmetryCheck& s) {
  return {{"pass", s.pass}, {"max_residual", num(s.max_residual)}, {"samples", s.samples}};
}

}  // namespace nhdeg
