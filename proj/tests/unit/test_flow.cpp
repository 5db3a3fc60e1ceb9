#include "support.hpp"

using namespace neumann;

namespace {

// For f = cos(ax) cos(by) the quantity ln|sin(by)|/b^2 - ln|sin(ax)|/a^2 is constant along gradient
// lines.
double flow_invariant(const Point& p, double a, double b) {
  return std::log(std::abs(std::sin(b * p.y()))) / (b * b) - std::log(std::abs(std::sin(a * p.x()))) / (a * a);
}

}  // namespace

TEST_SUITE("flow") {
  TEST_CASE("free flow follows the analytic flow line") {
    const int n = 1, m = 2;
    const auto f = torus_cos_cos(n, m);
    const auto cs = find_critical_points(*f);
    const FlowTracer tr(f, cs);
    const double a = 2 * kPi * n, b = 2 * kPi * m;
    for (const Point& start : {Point(0.1, 0.07), Point(0.3, 0.2), Point(0.61, 0.13)}) {
      for (Direction dir : {Direction::Descending, Direction::Ascending}) {
        const FlowPath path = tr.integrate(start, dir);
        REQUIRE(path.terminus.kind == TerminusKind::Extremum);
        const auto& end = cs[path.terminus.critical_id];
        CHECK(end.kind == (dir == Direction::Descending ? CriticalKind::Minimum : CriticalKind::Maximum));
        const double i0 = flow_invariant(start, a, b);
        double drift = 0.0;
        for (const auto& p : path.points) {
          // Stay away from the coordinate lines where the invariant is singular.
          if (std::abs(std::sin(a * p.x())) < 0.05 || std::abs(std::sin(b * p.y())) < 0.05) continue;
          drift = std::max(drift, std::abs(flow_invariant(p, a, b) - i0));
        }
        CHECK(drift < 1e-6);
        CHECK(monotonicity_violation(path, f->scale()) <= 1e-9);
      }
    }
  }

  TEST_CASE("separatrices of a cos cos saddle") {
    const auto f = torus_cos_cos(1, 1);
    const auto cs = find_critical_points(*f);
    const FlowTracer tr(f, cs);
    const NeumannLineSet nls = build_neumann_line_set(tr);
    CHECK(nls.paths.size() == 4 * cs.saddles.size());
    CHECK(nls.morse_smale);
    for (int s : cs.saddles) {
      const auto& idx = nls.by_saddle.at(s);
      REQUIRE(idx.size() == 4);
      int down = 0;
      for (int k : idx) {
        const FlowPath& p = nls.paths[k];
        CHECK(p.origin_id == s);
        CHECK(p.terminus.kind == TerminusKind::Extremum);
        CHECK(!p.saddle_connection);
        const auto kind = cs[p.terminus.critical_id].kind;
        if (p.direction == Direction::Descending) {
          ++down;
          CHECK(kind == CriticalKind::Minimum);
        } else {
          CHECK(kind == CriticalKind::Maximum);
        }
        // For cos(2 pi x) cos(2 pi y) the separatrices are straight diagonals of length sqrt(2)/4.
        CHECK(p.arclength == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-2));
      }
      CHECK(down == 2);
      CHECK(right_angle_defect(tr, nls, s) < 1e-6);
      const InterlacingResult il = interlacing(tr, nls, s);
      CHECK(il.applicable);
      CHECK(il.interlaced);
      CHECK(il.zero_rays == 4);
      CHECK(il.separatrix_rays == 4);
    }
  }

  TEST_CASE("rectangle separatrices stay inside") {
    // The walls are a level set of sin sin, so no flow line can cross them.
    const auto f = rectangle_sin_sin(2, 1);
    const auto cs = find_critical_points(*f);
    const FlowTracer tr(f, cs);
    const NeumannLineSet nls = build_neumann_line_set(tr);
    REQUIRE(!nls.paths.empty());
    int from_wall = 0;
    for (const auto& p : nls.paths) {
      for (const auto& pt : p.points) CHECK(f->domain().contains(pt, 1e-9));
      CHECK(p.terminus.kind == TerminusKind::Extremum);
      const auto& origin = cs[p.origin_id];
      if (origin.on_boundary) {
        ++from_wall;
        const Point e = origin.location;
        CHECK(std::min({e.x(), 1 - e.x(), e.y(), 1 - e.y()}) < 1e-9);
      }
    }
    // sin(2 pi x) sin(pi y) has no interior saddle; its saddles sit on the wall.
    CHECK(from_wall == static_cast<int>(nls.paths.size()));
  }

  TEST_CASE("step budget") {
    const auto f = torus_cos_cos(1, 1);
    const auto cs = find_critical_points(*f);
    FlowOptions o;
    o.max_steps = 3;
    const FlowTracer tr(f, cs, o);
    try {
      tr.integrate(Point(0.1, 0.3), Direction::Descending);
      FAIL("expected StepBudgetExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StepBudgetExceeded);
    }
  }

  TEST_CASE("a start inside a capture ball terminates at once") {
    const auto f = torus_cos_cos(1, 1);
    const auto cs = find_critical_points(*f);
    const FlowTracer tr(f, cs);
    const FlowPath p = tr.integrate(Point(0.5 + 1e-5, 0.0), Direction::Descending);
    CHECK(p.terminus.kind == TerminusKind::Extremum);
    CHECK(cs[p.terminus.critical_id].kind == CriticalKind::Minimum);
    CHECK(p.arclength < 2 * tr.capture_radius());
  }
}
