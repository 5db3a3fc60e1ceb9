#include "neumann/field_io.hpp"
#include "support.hpp"

#include <random>

using namespace neumann;
using testing_support::fd_gradient;
using testing_support::fd_hessian;

TEST_SUITE("field") {
  TEST_CASE("eigenvalue of separable modes") {
    CHECK(torus_cos_cos(1, 3)->lambda() == doctest::Approx(4 * kPi * kPi * 10).epsilon(1e-14));
    CHECK(rectangle_sin_sin(2, 1)->lambda() == doctest::Approx(kPi * kPi * 5).epsilon(1e-14));
    CHECK(stern_field(3, 0.98)->lambda() == doctest::Approx(37.0).epsilon(1e-14));
    const auto t = torus_cos_cos(2, 1, 2.0, 0.5);
    CHECK(t->lambda() == doctest::Approx(4 * kPi * kPi * (1.0 + 4.0)).epsilon(1e-14));
  }

  TEST_CASE("analytic derivatives agree with finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const std::vector<FieldPtr> fields = {torus_cos_cos(2, 3), rectangle_sin_sin(2, 1), stern_field(2, 0.98),
                                          std::make_shared<AnalyticEigenfunction>(
                                              DomainSpec::torus(1, 1),
                                              std::vector<SeparableMode>{{0.7, 3, 4, Parity::Sin, Parity::Cos},
                                                                         {-0.4, 5, 0, Parity::Cos, Parity::Cos}})};
    for (const auto& f : fields) {
      const auto& d = f->domain();
      for (int k = 0; k < 50; ++k) {
        const Point p(u(rng) * d.lx, u(rng) * d.ly);
        const Jet j = f->jet_unchecked(p);
        const double h = 1e-6 * d.min_extent();
        CHECK((j.gradient - fd_gradient(*f, p, h)).norm() <= 1e-6 * f->scale() * f->lambda());
        CHECK((j.hessian - fd_hessian(*f, p, h)).norm() <= 1e-6 * f->scale() * f->lambda());
        CHECK(j.value == doctest::Approx(f->eval(p)));
        // An eigenfunction satisfies -Laplace f = lambda f.
        CHECK(-j.hessian.trace() == doctest::Approx(f->lambda() * j.value).epsilon(1e-9).scale(f->lambda()));
      }
    }
  }

  TEST_CASE("mixed eigenvalues and bad rectangle modes are rejected") {
    auto mixed = [] {
      return AnalyticEigenfunction(DomainSpec::torus(1, 1), {{1.0, 1, 2, Parity::Cos, Parity::Cos},
                                                             {1.0, 1, 3, Parity::Cos, Parity::Cos}});
    };
    CHECK_THROWS_AS(mixed(), Error);
    auto cos_on_rect = [] {
      return AnalyticEigenfunction(DomainSpec::rectangle(1, 1), {{1.0, 1, 1, Parity::Cos, Parity::Sin}});
    };
    CHECK_THROWS_AS(cos_on_rect(), Error);
    CHECK_THROWS_AS(AnalyticEigenfunction(DomainSpec::torus(1, 1), {}), Error);
  }

  TEST_CASE("checked evaluation outside a rectangle") {
    const auto f = rectangle_sin_sin(1, 1);
    try {
      f->eval(Point(1.5, 0.5));
      FAIL("expected PointOutsideDomain");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PointOutsideDomain);
    }
    // The torus wraps instead.
    const auto t = torus_cos_cos(1, 1);
    CHECK(t->eval(Point(1.25, -0.5)) == doctest::Approx(t->eval(Point(0.25, 0.5))));
  }

  TEST_CASE("periodic extension is the odd reflection") {
    const auto f = rectangle_sin_sin(2, 1);
    const auto e = f->periodic_extension();
    CHECK(e->domain().periodic());
    CHECK(e->domain().lx == doctest::Approx(2.0));
    for (double x : {0.1, 0.37, 0.8})
      for (double y : {0.2, 0.55, 0.9}) {
        CHECK(e->value_unchecked(Point(x, y)) == doctest::Approx(f->eval(Point(x, y))));
        CHECK(e->value_unchecked(Point(-x, y)) == doctest::Approx(-f->eval(Point(x, y))));
        CHECK(e->value_unchecked(Point(x, -y)) == doctest::Approx(-f->eval(Point(x, y))));
      }
  }

  TEST_CASE("grid field interpolates smooth samples") {
    const auto f = torus_cos_cos(1, 2);
    const auto g = sample(*f, 128, 128);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double err = 0.0, gerr = 0.0;
    for (int k = 0; k < 200; ++k) {
      const Point p(u(rng), u(rng));
      err = std::max(err, std::abs(g->eval(p) - f->eval(p)));
      gerr = std::max(gerr, (g->grad(p) - f->grad(p)).norm());
    }
    // Cubic splines: O(h^4) values, O(h^3) gradients.
    CHECK(err < 1e-5);
    CHECK(gerr < 1e-2);
    const auto r = sample(*rectangle_sin_sin(1, 1), 129, 129);
    CHECK(r->eval(Point(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(r->eval(Point(0.0, 0.3))) < 1e-12);
  }

  TEST_CASE("json round trip") {
    const auto f = stern_field(2, 0.98);
    const auto doc = field_to_json(*f);
    const auto g = field_from_json(doc);
    CHECK(g->lambda() == doctest::Approx(f->lambda()));
    for (double x : {0.3, 1.1, 2.9})
      for (double y : {0.4, 1.7}) CHECK(g->eval(Point(x, y)) == doctest::Approx(f->eval(Point(x, y))));

    const auto grid = sample(*torus_cos_cos(1, 1), 32, 32);
    const auto back = field_from_json(field_to_json(*grid));
    CHECK(back->eval(Point(0.21, 0.77)) == doctest::Approx(grid->eval(Point(0.21, 0.77))));
  }

  TEST_CASE("malformed documents") {
    auto code_of = [](const nlohmann::json& doc) {
      try {
        field_from_json(doc);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::ConvergenceFailure;  // not thrown
    };
    CHECK(code_of(nlohmann::json::object()) == ErrorCode::MalformedInput);
    CHECK(code_of({{"domain", {{"kind", "sphere"}, {"Lx", 1}, {"Ly", 1}}}, {"modes", nlohmann::json::array()}}) ==
          ErrorCode::MalformedInput);
    CHECK(code_of({{"domain", {{"kind", "torus"}, {"Lx", -1}, {"Ly", 1}}},
                   {"modes", {{{"amp", 1}, {"nx", 1}, {"ny", 1}}}}}) != ErrorCode::ConvergenceFailure);
    try {
      load_field(testing_support::data_path("malformed.json"));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::Input);
    }
  }
}
