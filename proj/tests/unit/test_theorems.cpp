#include "support.hpp"

using namespace neumann;

namespace {

Analysis run(FieldPtr f, int resolution) {
  AnalysisOptions o;
  o.resolution = resolution;
  return analyze(std::move(f), o);
}

const CheckResult* find(const std::vector<CheckResult>& rs, const std::string& claim, int domain) {
  for (const auto& r : rs)
    if (r.claim == claim && r.domain == domain) return &r;
  return nullptr;
}

}  // namespace

TEST_SUITE("theorems") {
  TEST_CASE("ledger of a separable torus field") {
    const Analysis a = run(torus_cos_cos(1, 2), 128);
    const auto checks = verify_all(a.partition);
    CHECK(all_applicable_passed(checks));
    // Catalogue order, then scope.
    const auto& cat = claim_catalogue();
    for (std::size_t i = 1; i < checks.size(); ++i) {
      const auto ra = std::find(cat.begin(), cat.end(), checks[i - 1].claim) - cat.begin();
      const auto rb = std::find(cat.begin(), cat.end(), checks[i].claim) - cat.begin();
      CHECK((ra < rb || (ra == rb && checks[i - 1].domain <= checks[i].domain)));
    }
    for (const auto& claim : cat) {
      bool present = false;
      for (const auto& r : checks) present = present || r.claim == claim;
      CHECK(present);
    }
    for (const char* c : {"thm2.ii'", "thm2.iii'", "thm2.iv'"}) {
      const CheckResult* r = find(checks, c, -1);
      REQUIRE(r != nullptr);
      CHECK(!r->applicable);
    }
    const CheckResult* two = find(checks, "count.twosaddle", -1);
    REQUIRE(two != nullptr);
    CHECK(two->applicable);
    CHECK(two->passed);
    const auto j = ledger_json(checks);
    CHECK(j["summary"]["failed"] == 0);
    CHECK(ledger_table(checks).find("FAIL") == std::string::npos);
  }

  TEST_CASE("rectangle boundary claims") {
    const Analysis a = run(rectangle_sin_sin(2, 2), 128);
    const auto checks = verify_all(a.partition);
    CHECK(all_applicable_passed(checks));
    int boundary_checks = 0;
    for (const auto& r : checks)
      if (r.claim == "thm2.iv'" && r.applicable) ++boundary_checks;
    CHECK(boundary_checks > 0);
    const CheckResult* two = find(checks, "count.twosaddle", -1);
    REQUIRE(two != nullptr);
    CHECK(!two->applicable);
  }

  TEST_CASE("negative control: a second nodal component fails claim vii") {
    Analysis a = run(torus_cos_cos(1, 1), 128);
    Partition& p = a.partition;
    const NeumannDomain& d0 = p.domains[0];
    // A closed square of nodal segments around the centre of one mask cell, with fresh edge ids.
    const Point c = p.grid.center(d0.cells[d0.cells.size() / 2]);
    const double r = 0.25 * p.grid.hx();
    const Point v[4] = {c + Point(-r, -r), c + Point(r, -r), c + Point(r, r), c + Point(-r, r)};
    const long base = 4L * p.grid.size() + 100;
    for (int k = 0; k < 4; ++k) p.nodal.segments.push_back({v[k], v[(k + 1) % 4], base + k, base + (k + 1) % 4});
    attach_nodal_arcs(p);
    const auto checks = verify_theorem1(p);
    const CheckResult* r0 = find(checks, "thm1.vii", 0);
    REQUIRE(r0 != nullptr);
    CHECK(!r0->passed);
    CHECK(r0->details["components"] == 2);
    const CheckResult* r1 = find(checks, "thm1.vii", 1);
    REQUIRE(r1 != nullptr);
    CHECK(r1->passed);
  }

  TEST_CASE("negative control: a wrong maximum fails claim ii") {
    Analysis a = run(torus_cos_cos(1, 1), 128);
    Partition& p = a.partition;
    NeumannDomain& d0 = p.domains[0];
    for (int m : a.cs->maxima)
      if (m != d0.q) {
        d0.q = m;
        break;
      }
    const auto checks = verify_theorem1(p);
    const CheckResult* r = find(checks, "thm1.ii", 0);
    REQUIRE(r != nullptr);
    CHECK(!r->passed);
    CHECK(r->details["flows_confirmed"] == 0);
  }

  TEST_CASE("negative control: flipped signs fail claim iv'") {
    Analysis a = run(rectangle_sin_sin(2, 1), 128);
    Partition& p = a.partition;
    int target = -1;
    for (const auto& d : p.domains)
      if (d.kind != NeumannDomainKind::Inner) {
        target = d.id;
        break;
      }
    REQUIRE(target >= 0);
    for (int c : p.domains[target].cells) p.nodal.sign[c] = -p.nodal.sign[c];
    const auto checks = verify_theorem2(p);
    const CheckResult* r = find(checks, "thm2.iv'", target);
    REQUIRE(r != nullptr);
    CHECK(!r->passed);
  }

  TEST_CASE("negative control: too many nodal domains fail the count") {
    Analysis a = run(torus_cos_cos(1, 1), 128);
    a.partition.nodal.nu = a.partition.mu;
    const auto checks = verify_counting(a.partition);
    const CheckResult* r = find(checks, "count.munu", -1);
    REQUIRE(r != nullptr);
    CHECK(!r->passed);
    CHECK(!all_applicable_passed(checks));
  }
}
