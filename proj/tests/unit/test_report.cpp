#include "support.hpp"

#include "neumann/report.hpp"
#include "neumann/svg.hpp"

using namespace neumann;

namespace {

int count_of(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + needle.size())) ++n;
  return n;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("svg rendering is deterministic") {
    AnalysisOptions o;
    o.resolution = 64;
    const Analysis a = analyze(torus_cos_cos(1, 2), o);
    const Analysis b = analyze(torus_cos_cos(1, 2), o);
    const std::string sa = render_svg(a);
    CHECK(sa == render_svg(b));
    CHECK(sa.rfind("<svg", 0) == 0);
    CHECK(count_of(sa, "class=\"neumann-domain\"") == a.partition.mu);
    RenderOptions plain;
    plain.show_nodal_domains = false;
    CHECK(count_of(render_svg(a, plain), "class=\"neumann-domain\"") == a.partition.mu);
  }

  TEST_CASE("partition report") {
    AnalysisOptions o;
    o.resolution = 64;
    const Analysis a = analyze(rectangle_sin_sin(2, 1), o);
    const auto j = partition_report(a);
    for (const char* key : {"domain", "lambda", "resolution", "critical_points", "counts", "mu", "nu", "degrees",
                            "band_cells", "unresolved_cells", "outer_radius_census", "domains"})
      CHECK(j.contains(key));
    CHECK(j["mu"] == a.partition.mu);
    CHECK(j["nu"] == 2);
    CHECK(j["domains"].size() == static_cast<std::size_t>(a.partition.mu));
    CHECK(j["lambda"].get<double>() == doctest::Approx(5 * kPi * kPi));
  }

  TEST_CASE("structure summary") {
    AnalysisOptions o;
    o.resolution = 64;
    const Analysis a = analyze(torus_cos_cos(1, 1), o);
    const StructureSummary s = structure_summary(a);
    CHECK(s.paths == 16);
    CHECK(s.max_right_angle_defect < 1e-6);
    CHECK(s.interlacing_applicable == 4);
    CHECK(s.interlacing_passed == 4);
    CHECK(s.max_monotonicity_violation <= 1e-9);
    CHECK(to_json(s)["interlacing"]["passed"] == 4);
  }
}
