#include "support.hpp"

#include <random>

using namespace neumann;

namespace {

std::vector<int> cells_of(const CellGrid& g, const std::vector<std::pair<int, int>>& ij) {
  std::vector<int> out;
  for (auto [i, j] : ij) out.push_back(g.index(i, j));
  std::sort(out.begin(), out.end());
  return out;
}

bool four_adjacent(const CellGrid& g, int a, int b) {
  for (int n : g.neighbors4(a))
    if (n == b) return true;
  return false;
}

}  // namespace

TEST_SUITE("raster") {
  TEST_CASE("indexing, wrapping and neighbours") {
    const CellGrid t(DomainSpec::torus(1, 1), 8, 4);
    CHECK(t.index(3, 2) == 14);
    CHECK(t.ix(14) == 3);
    CHECK(t.iy(14) == 2);
    CHECK(t.wrap(-1, 4) == t.index(7, 0));
    CHECK(t.locate(Point(1.01, -0.01)) == t.index(0, 3));
    const auto nb = t.neighbors4(t.index(0, 0));
    CHECK(nb[0] == t.index(7, 0));
    CHECK(nb[2] == t.index(0, 3));

    const CellGrid r(DomainSpec::rectangle(2, 1), 8, 4);
    const auto rb = r.neighbors4(r.index(0, 0));
    CHECK(rb[0] == -1);
    CHECK(rb[2] == -1);
    CHECK(r.locate(Point(2.0, 1.0)) == r.index(7, 3));
    const CellGrid fr = CellGrid::for_resolution(DomainSpec::rectangle(2, 1), 256);
    CHECK(fr.nx == 256);
    CHECK(fr.ny == 128);
  }

  TEST_CASE("euler characteristic") {
    const CellGrid g(DomainSpec::rectangle(1, 1), 16, 16);
    CHECK(euler_characteristic(g, cells_of(g, {{5, 5}})) == 1);
    CHECK(euler_characteristic(g, cells_of(g, {{5, 5}, {5, 6}, {6, 5}, {6, 6}})) == 1);
    CHECK(euler_characteristic(g, cells_of(g, {{1, 1}, {8, 8}})) == 2);
    // Diagonal contact does not connect.
    CHECK(euler_characteristic(g, cells_of(g, {{1, 1}, {2, 2}})) == 2);
    std::vector<std::pair<int, int>> ring;
    for (int i = 2; i <= 6; ++i)
      for (int j = 2; j <= 6; ++j)
        if (i == 2 || i == 6 || j == 2 || j == 6) ring.emplace_back(i, j);
    CHECK(euler_characteristic(g, cells_of(g, ring)) == 0);
  }

  TEST_CASE("boundary loops") {
    const CellGrid g(DomainSpec::rectangle(1, 1), 16, 16);
    const auto one = boundary_loops(g, cells_of(g, {{3, 3}}));
    REQUIRE(one.size() == 1);
    CHECK(one[0].size() == 4);
    std::vector<std::pair<int, int>> ring;
    for (int i = 2; i <= 6; ++i)
      for (int j = 2; j <= 6; ++j)
        if (i == 2 || i == 6 || j == 2 || j == 6) ring.emplace_back(i, j);
    const auto loops = boundary_loops(g, cells_of(g, ring));
    REQUIRE(loops.size() == 2);
    std::vector<std::size_t> len = {loops[0].size(), loops[1].size()};
    std::sort(len.begin(), len.end());
    CHECK(len[0] == 12);  // inner 3x3 hole
    CHECK(len[1] == 20);  // outer 5x5 square
    // Two cells meeting at a corner stay separate loops.
    CHECK(boundary_loops(g, cells_of(g, {{1, 1}, {2, 2}})).size() == 2);
    // A stripe around the torus has two boundary loops and no corners.
    const CellGrid t(DomainSpec::torus(1, 1), 8, 8);
    std::vector<std::pair<int, int>> stripe;
    for (int i = 0; i < 8; ++i) stripe.emplace_back(i, 3);
    CHECK(boundary_loops(t, cells_of(t, stripe)).size() == 2);
    CHECK(boundary_cells(t, cells_of(t, stripe)).size() == 8);
  }

  TEST_CASE("supercover is a 4-connected chain") {
    const CellGrid g(DomainSpec::torus(1, 1), 64, 64);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int k = 0; k < 500; ++k) {
      const Point a(u(rng), u(rng));
      const Point b = a + 0.2 * Point(u(rng) - 0.5, u(rng) - 0.5);
      std::vector<int> chain;
      supercover(g, a, b, [&](int c) { chain.push_back(c); });
      REQUIRE(!chain.empty());
      CHECK(chain.front() == g.locate(g.domain.canonical(a)));
      CHECK(chain.back() == g.locate(g.domain.canonical(b)));
      for (std::size_t i = 1; i < chain.size(); ++i) CHECK(four_adjacent(g, chain[i - 1], chain[i]));
    }
    // Exact diagonal through lattice corners.
    std::vector<int> diag;
    supercover(g, Point(0.5 / 64, 0.5 / 64), Point(4.5 / 64, 4.5 / 64), [&](int c) { diag.push_back(c); });
    CHECK(diag.size() == 9);
  }

  TEST_CASE("component labeling") {
    const CellGrid t(DomainSpec::torus(1, 1), 6, 6);
    std::vector<int> key(t.size()), comp;
    for (int c = 0; c < t.size(); ++c) key[c] = (t.ix(c) + t.iy(c)) % 2;
    CHECK(label_components(t, key, comp) == 36);
    for (int c = 0; c < t.size(); ++c) key[c] = t.iy(c) == 2 ? 1 : 0;
    // The stripe is one component; the rest wraps around into one as well.
    CHECK(label_components(t, key, comp) == 2);
    for (int c = 0; c < t.size(); ++c) key[c] = t.ix(c) == 0 ? -1 : 0;
    CHECK(label_components(t, key, comp) == 1);
    CHECK(comp[t.index(0, 0)] == -1);
  }
}
