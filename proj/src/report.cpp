#include "neumann/report.hpp"

#include "neumann/field_io.hpp"

namespace neumann {

nlohmann::json partition_report(const Analysis& a) {
  const Partition& p = a.partition;
  nlohmann::json degrees = nlohmann::json::object();
  for (const auto& [id, deg] : p.degrees) degrees[std::to_string(id)] = deg;
  nlohmann::json domains = nlohmann::json::array();
  for (const auto& d : p.domains) {
    nlohmann::json j = {{"id", d.id},
                        {"kind", to_string(d.kind)},
                        {"cells", d.cells.size()},
                        {"saddles", d.saddles}};
    j["p"] = d.p >= 0 ? nlohmann::json(d.p) : nlohmann::json(nullptr);
    j["q"] = d.q >= 0 ? nlohmann::json(d.q) : nlohmann::json(nullptr);
    j.update(to_json(a.geometry[d.id]));
    domains.push_back(std::move(j));
  }
  return {{"domain", domain_to_json(a.field->domain())},
          {"lambda", a.field->lambda()},
          {"resolution", {p.grid.nx, p.grid.ny}},
          {"critical_points", to_json(*a.cs)},
          {"counts",
           {{"minima", a.cs->minima.size()}, {"maxima", a.cs->maxima.size()}, {"saddles", a.cs->saddles.size()}}},
          {"morse_smale", a.nls->morse_smale},
          {"separatrices", a.nls->paths.size()},
          {"mu", p.mu},
          {"nu", p.nu()},
          {"degrees", degrees},
          {"band_cells", p.band_cells},
          {"unresolved_cells", {{"initial", p.unresolved_initial}, {"after_fill", p.unresolved_final}}},
          {"outer_radius_census", to_json(a.census)},
          {"domains", domains}};
}

StructureSummary structure_summary(const Analysis& a) {
  StructureSummary s;
  const FlowTracer tracer(a.field, *a.cs, a.options.flow);
  for (int id : a.cs->saddles) {
    const CriticalPoint& cp = (*a.cs)[id];
    if (!cp.on_boundary) s.max_right_angle_defect = std::max(s.max_right_angle_defect, right_angle_defect(tracer, *a.nls, id));
    const InterlacingResult r = interlacing(tracer, *a.nls, id);
    if (r.applicable) {
      ++s.interlacing_applicable;
      if (r.interlaced) ++s.interlacing_passed;
    }
  }
  for (const auto& path : a.nls->paths) {
    ++s.paths;
    s.max_monotonicity_violation = std::max(s.max_monotonicity_violation, monotonicity_violation(path, a.field->scale()));
  }
  return s;
}

nlohmann::json to_json(const StructureSummary& s) {
  return {{"max_right_angle_defect", s.max_right_angle_defect},
          {"interlacing", {{"applicable", s.interlacing_applicable}, {"passed", s.interlacing_passed}}},
          {"max_monotonicity_violation", s.max_monotonicity_violation},
          {"paths", s.paths}};
}

nlohmann::json spectrum_report(const Analysis& a, const std::vector<DomainSpectrum>& spectra) {
  nlohmann::json arr = nlohmann::json::array();
  int p_of_f = -1;
  for (const auto& s : spectra) {
    arr.push_back(to_json(s));
    if (s.failure.empty()) p_of_f = std::max(p_of_f, s.position.pos);
  }
  nlohmann::json j = {{"lambda", a.field->lambda()},
                      {"resolution", a.partition.grid.nx},
                      {"fine_resolution", 2 * a.partition.grid.nx},
                      {"domains", arr}};
  j["p"] = p_of_f >= 0 ? nlohmann::json(p_of_f) : nlohmann::json(nullptr);
  return j;
}

}  // namespace neumann
