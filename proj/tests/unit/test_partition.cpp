#include "support.hpp"

#include <set>

using namespace neumann;

namespace {

Analysis run(FieldPtr f, int resolution) {
  AnalysisOptions o;
  o.resolution = resolution;
  return analyze(std::move(f), o);
}

}  // namespace

TEST_SUITE("partition") {
  TEST_CASE("torus (1,1) partition") {
    const Analysis a = run(torus_cos_cos(1, 1), 128);
    const Partition& p = a.partition;
    CHECK(p.mu == 8);
    CHECK(p.nu() == 4);
    CHECK(p.unresolved_final == 0);
    for (const auto& [id, deg] : p.degrees) CHECK(deg == 4);
    CHECK(p.degrees.size() == a.cs->minima.size() + a.cs->maxima.size());

    std::vector<int> owner(p.grid.size(), -1);
    long mask = 0;
    for (const auto& d : p.domains) {
      CHECK(d.kind == NeumannDomainKind::Inner);
      CHECK((*a.cs)[d.p].kind == CriticalKind::Minimum);
      CHECK((*a.cs)[d.q].kind == CriticalKind::Maximum);
      CHECK(std::includes(d.footprint.begin(), d.footprint.end(), d.cells.begin(), d.cells.end()));
      for (int c : d.footprint) {
        CHECK(owner[c] == -1);  // footprints are disjoint
        owner[c] = d.id;
      }
      mask += static_cast<long>(d.cells.size());
      CHECK(d.arc.components == 1);
      CHECK(d.arc.endpoints == 2);
    }
    long band = 0;
    for (char b : p.band) band += b ? 1 : 0;
    CHECK(mask + band == p.grid.size());
    CHECK(band == p.band_cells);
  }

  TEST_CASE("nodal domains of separable fields") {
    for (auto [n, m] : {std::pair{1, 1}, {2, 3}, {1, 6}}) {
      const auto f = torus_cos_cos(n, m);
      const CellGrid g = CellGrid::for_resolution(f->domain(), 128);
      const NodalSet ns = extract_nodal(*f, g);
      CHECK(ns.nu == 4 * n * m);
      const double h = g.hx();
      for (const auto& s : ns.segments) {
        // Linear interpolation along a cell edge misses the zero by at most lambda h^2 / 8.
        CHECK(std::abs(f->eval(s.a)) <= f->lambda() * h * h / 8);
        CHECK(std::abs(f->eval(s.b)) <= f->lambda() * h * h / 8);
      }
    }
    const auto r = rectangle_sin_sin(2, 2);
    CHECK(extract_nodal(*r, CellGrid::for_resolution(r->domain(), 64)).nu == 4);
    const auto s = stern_field(3, 0.98);
    CHECK(extract_nodal(*s, CellGrid::for_resolution(s->domain(), 256)).nu == 2);
  }

  TEST_CASE("rectangle partition has boundary domains") {
    const Analysis a = run(rectangle_sin_sin(2, 1), 128);
    int boundary = 0, inner = 0;
    for (const auto& d : a.partition.domains) (d.kind == NeumannDomainKind::Inner ? inner : boundary)++;
    CHECK(inner >= 1);
    CHECK(boundary >= 2);
    CHECK(a.partition.nu() == 2);
    CHECK(a.partition.mu == inner + boundary);
  }

  TEST_CASE("coarse rasters are refused") {
    const auto f = torus_cos_cos(1, 1);
    auto cs = std::make_shared<const CriticalSet>(find_critical_points(*f));
    const FlowTracer tr(f, *cs);
    auto nls = std::make_shared<const NeumannLineSet>(build_neumann_line_set(tr));
    LabelOptions o;
    o.resolution = 32;
    try {
      label_by_flow(f, cs, nls, o);
      FAIL("expected ResolutionTooCoarse");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ResolutionTooCoarse);
    }
  }

  TEST_CASE("labeling is deterministic and independent of the worker count") {
    const auto f = torus_cos_cos(1, 2);
    set_jobs(1);
    const Analysis a = run(f, 64);
    set_jobs(3);
    const Analysis b = run(f, 64);
    set_jobs(0);
    CHECK(a.partition.domain_of == b.partition.domain_of);
    CHECK(a.partition.label_min == b.partition.label_min);
    CHECK(a.partition.label_max == b.partition.label_max);
  }

  TEST_CASE("relabel keeps the critical set") {
    const Analysis a = run(torus_cos_cos(1, 1), 64);
    const Analysis b = relabel(a, 128);
    CHECK(b.cs == a.cs);
    CHECK(b.partition.grid.nx == 128);
    CHECK(b.partition.mu == 8);
  }
}
