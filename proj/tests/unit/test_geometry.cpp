#include "support.hpp"

#include <random>

using namespace neumann;

namespace {

bool encloses(const Point& c, double r, const std::vector<Point>& pts) {
  for (const auto& p : pts)
    if ((p - c).norm() > r * (1 + 1e-12) + 1e-12) return false;
  return true;
}

// Exhaustive search over circles through two or three of the points.
double brute_force_radius(const std::vector<Point>& pts) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = pts.size();
  if (n == 1) return 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = 0.5 * (pts[i] + pts[j]);
      const double r = 0.5 * (pts[i] - pts[j]).norm();
      if (r < best && encloses(c, r, pts)) best = r;
      for (std::size_t k = j + 1; k < n; ++k) {
        const Point a = pts[i], b = pts[j], e = pts[k];
        const double d = 2 * (a.x() * (b.y() - e.y()) + b.x() * (e.y() - a.y()) + e.x() * (a.y() - b.y()));
        if (std::abs(d) < 1e-14) continue;
        const double ux = (a.squaredNorm() * (b.y() - e.y()) + b.squaredNorm() * (e.y() - a.y()) +
                           e.squaredNorm() * (a.y() - b.y())) / d;
        const double uy = (a.squaredNorm() * (e.x() - b.x()) + b.squaredNorm() * (a.x() - e.x()) +
                           e.squaredNorm() * (b.x() - a.x())) / d;
        const Point cc(ux, uy);
        const double rr = (a - cc).norm();
        if (rr < best && encloses(cc, rr, pts)) best = rr;
      }
    }
  return best;
}

double brute_force_diameter(const std::vector<Point>& pts) {
  double d = 0.0;
  for (const auto& a : pts)
    for (const auto& b : pts) d = std::max(d, (a - b).norm());
  return d;
}

Analysis run(FieldPtr f, int resolution) {
  AnalysisOptions o;
  o.resolution = resolution;
  return analyze(std::move(f), o);
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("minimal enclosing circle matches exhaustive search") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> count(1, 14);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<Point> pts(count(rng));
      for (auto& p : pts) p = Point(u(rng), u(rng));
      const Circle c = minimal_enclosing_circle(pts);
      CHECK(std::abs(c.radius - brute_force_radius(pts)) <= 1e-12);
      CHECK(encloses(c.center, c.radius, pts));
    }
  }

  TEST_CASE("hull and diameter") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Point> pts(30);
      for (auto& p : pts) p = Point(u(rng), u(rng));
      const auto hull = convex_hull(pts);
      REQUIRE(hull.size() >= 3);
      CHECK(polygon_area(hull) > 0);
      // Every point is on the left of (or on) every hull edge.
      for (std::size_t k = 0; k < hull.size(); ++k) {
        const Point a = hull[k], b = hull[(k + 1) % hull.size()];
        for (const auto& p : pts) {
          const double cross = (b - a).x() * (p - a).y() - (b - a).y() * (p - a).x();
          CHECK(cross >= -1e-12);
        }
      }
      CHECK(point_set_diameter(pts) == doctest::Approx(brute_force_diameter(pts)).epsilon(1e-14));
    }
    const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0}, {0.5, 0.5}};
    CHECK(convex_hull(square).size() == 4);
    CHECK(point_set_diameter(square) == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("polygon measures") {
    const std::vector<Point> tri{{0, 0}, {2, 0}, {0, 1}};
    CHECK(polygon_area(tri) == doctest::Approx(1.0));
    std::vector<Point> cw(tri.rbegin(), tri.rend());
    CHECK(polygon_area(cw) == doctest::Approx(-1.0));
    CHECK(polygon_perimeter(tri) == doctest::Approx(3 + std::sqrt(5.0)));
    CHECK(point_in_polygon(tri, Point(0.5, 0.25)));
    CHECK(!point_in_polygon(tri, Point(1.5, 0.5)));
    const std::vector<Point> notch{{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}};
    CHECK(polygon_area(notch) == doctest::Approx(7.0));
    CHECK(!point_in_polygon(notch, Point(1.5, 2)));
    CHECK(point_in_polygon(notch, Point(2.5, 2)));
  }

  TEST_CASE("torus lifts") {
    const CellGrid t(DomainSpec::torus(1, 1), 8, 8);
    std::vector<int> seam{t.index(7, 3), t.index(0, 3), t.index(1, 3), t.index(0, 4)};
    const auto lifted = lift_cells(t, seam);
    // The lift is contiguous across the seam.
    CHECK(lifted[1][0] - lifted[0][0] == 1);
    CHECK(lifted[2][0] - lifted[1][0] == 1);
    CHECK(lifted[3][0] == lifted[1][0]);
    CHECK(lifted[3][1] - lifted[1][1] == 1);
    std::vector<int> stripe;
    for (int i = 0; i < 8; ++i) stripe.push_back(t.index(i, 2));
    try {
      lift_cells(t, stripe);
      FAIL("expected LiftFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LiftFailure);
    }
  }

  TEST_CASE("separatrix polygons of a cos cos field") {
    const Analysis a = run(torus_cos_cos(1, 1), 128);
    for (const auto& d : a.partition.domains) {
      const auto poly = domain_polygon(a.partition, d, a.geometry[d.id].centroid);
      REQUIRE(!poly.empty());
      // Each domain is a square of side sqrt(2)/4 with p and q at opposite corners.
      CHECK(polygon_area(poly) == doctest::Approx(0.125).epsilon(1e-3));
      CHECK(polygon_perimeter(poly) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
      CHECK(a.geometry[d.id].dpq == doctest::Approx(0.5).epsilon(1e-9));
    }
    CHECK(lens_domains(a.partition, a.geometry).empty());
  }

  TEST_CASE("separatrix polygons tile the torus") {
    const Analysis a = run(torus_cos_cos(1, 2), 128);
    double total = 0.0;
    for (const auto& d : a.partition.domains) {
      const auto poly = domain_polygon(a.partition, d, a.geometry[d.id].centroid);
      REQUIRE(!poly.empty());
      CHECK(polygon_area(poly) > 0);
      total += polygon_area(poly);
      // The labeled mask sits inside the polygon.
      CHECK(a.geometry[d.id].area <= polygon_area(poly) * (1 + 1e-9));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("lens domains and the outer radius census") {
    const int n = 3;
    const Analysis a = run(torus_cos_cos(1, n), 128);
    const auto lens = lens_domains(a.partition, a.geometry);
    REQUIRE(!lens.empty());
    for (int id : lens) {
      const auto& d = a.partition.domains[id];
      CHECK(a.geometry[id].dpq == doctest::Approx(1.0 / (2 * n)).epsilon(1e-9));
      REQUIRE(d.saddles.size() == 2);
      const double span = a.cs->domain.distance((*a.cs)[d.saddles[0]].location, (*a.cs)[d.saddles[1]].location);
      CHECK(span == doctest::Approx(0.5).epsilon(1e-9));
    }
    CHECK(a.census.witness_violations == 0);
    CHECK(a.census.min_ratio_to_half_dpq >= 1.0);
    for (const auto& g : a.geometry) {
      CHECK(g.lift_ok);
      CHECK(g.outer_radius >= g.diameter / 2 - 1e-12);
      CHECK(g.outer_radius <= g.diameter / std::sqrt(3.0) + 1e-12);
    }
  }
}
