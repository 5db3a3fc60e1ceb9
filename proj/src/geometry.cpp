#include "neumann/geometry.hpp"

#include <cmath>
#include <random>
#include <unordered_map>

namespace neumann {

namespace {

bool inside(const Circle& c, const Point& p) {
  return (p - c.center).norm() <= c.radius * (1 + 1e-12) + 1e-300;
}

Circle from2(const Point& a, const Point& b) { return {0.5 * (a + b), 0.5 * (a - b).norm()}; }

Circle from3(const Point& a, const Point& b, const Point& c) {
  const Vec2 ab = b - a, ac = c - a;
  const double den = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
  if (std::abs(den) < 1e-300) {
    // Collinear: the widest pair.
    Circle best = from2(a, b);
    for (const Circle& k : {from2(a, c), from2(b, c)})
      if (k.radius > best.radius) best = k;
    return best;
  }
  const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
  const Vec2 off((ac.y() * ab2 - ab.y() * ac2) / den, (ab.x() * ac2 - ac.x() * ab2) / den);
  return {a + off, off.norm()};
}

}  // namespace

Circle minimal_enclosing_circle(std::vector<Point> pts, std::uint64_t seed) {
  if (pts.empty()) return {};
  std::mt19937_64 rng(seed);
  std::shuffle(pts.begin(), pts.end(), rng);
  Circle c{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (inside(c, pts[i])) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(c, pts[j])) continue;
      c = from2(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (!inside(c, pts[k])) c = from3(pts[i], pts[j], pts[k]);
    }
  }
  return c;
}

std::vector<Point> convex_hull(std::vector<Point> p) {
  std::sort(p.begin(), p.end(), [](const Point& a, const Point& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Point> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

double point_set_diameter(const std::vector<Point>& points) {
  const auto h = convex_hull(points);
  double best = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j) best = std::max(best, (h[i] - h[j]).norm());
  return best;
}

double polygon_area(const std::vector<Point>& poly) {
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point& u = poly[i];
    const Point& v = poly[(i + 1) % n];
    a += u.x() * v.y() - v.x() * u.y();
  }
  return 0.5 * a;
}

double polygon_perimeter(const std::vector<Point>& poly) {
  double l = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) l += (poly[(i + 1) % n] - poly[i]).norm();
  return l;
}

bool point_in_polygon(const std::vector<Point>& poly, const Point& p) {
  bool in = false;
  for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

std::vector<std::array<long, 2>> lift_cells(const CellGrid& g, const std::vector<int>& cells) {
  std::vector<std::array<long, 2>> lifted(cells.size());
  if (!g.domain.periodic()) {
    for (std::size_t k = 0; k < cells.size(); ++k) lifted[k] = {g.ix(cells[k]), g.iy(cells[k])};
    return lifted;
  }
  std::unordered_map<int, std::size_t> slot;
  for (std::size_t k = 0; k < cells.size(); ++k) slot[cells[k]] = k;
  std::vector<char> done(cells.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t root = 0; root < cells.size(); ++root) {
    if (done[root]) continue;
    lifted[root] = {g.ix(cells[root]), g.iy(cells[root])};
    done[root] = 1;
    stack.push_back(root);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      const auto [li, lj] = lifted[u];
      static constexpr int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
      for (int s = 0; s < 4; ++s) {
        const int nb = g.wrap(static_cast<int>(li + di[s]), static_cast<int>(lj + dj[s]));
        auto it = slot.find(nb);
        if (it == slot.end()) continue;
        const std::array<long, 2> want{li + di[s], lj + dj[s]};
        if (!done[it->second]) {
          done[it->second] = 1;
          lifted[it->second] = want;
          stack.push_back(it->second);
        } else if (lifted[it->second] != want) {
          throw Error(ErrorCode::LiftFailure, "domain mask wraps around the torus");
        }
      }
    }
  }
  return lifted;
}

DomainGeometry measure(const Partition& part, const NeumannDomain& dom) {
  const CellGrid& g = part.grid;
  const DomainSpec& d = g.domain;
  const CriticalSet& cs = *part.cs;
  DomainGeometry geo;
  geo.domain = dom.id;
  if (dom.cells.empty()) throw Error(ErrorCode::EmptyMask, "domain " + std::to_string(dom.id) + " has no cells");
  geo.area = static_cast<double>(dom.cells.size()) * g.cell_area();
  geo.footprint_area = static_cast<double>(dom.footprint.size()) * g.cell_area();
  if (dom.kind == NeumannDomainKind::Inner) geo.dpq = d.distance(cs[dom.p].location, cs[dom.q].location);

  const std::vector<int>& cells = dom.footprint.empty() ? dom.cells : dom.footprint;
  std::vector<std::array<long, 2>> lifted;
  try {
    lifted = lift_cells(g, cells);
  } catch (const Error&) {
    geo.lift_ok = false;
    geo.outer_radius = std::numeric_limits<double>::infinity();
    geo.diameter = std::numeric_limits<double>::infinity();
    return geo;
  }
  const double hx = g.hx(), hy = g.hy();
  Point centroid = Point::Zero();
  std::unordered_map<int, std::size_t> slot;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    slot[cells[k]] = k;
    centroid += Point((lifted[k][0] + 0.5) * hx, (lifted[k][1] + 0.5) * hy);
  }
  centroid /= static_cast<double>(cells.size());
  geo.centroid = d.canonical(centroid);

  std::vector<Point> pts;
  for (int c : boundary_cells(g, cells)) {
    const auto [li, lj] = lifted[slot[c]];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) pts.emplace_back((li + a) * hx, (lj + b) * hy);
  }
  std::vector<int> marks = dom.saddles;
  if (dom.p >= 0) marks.push_back(dom.p);
  if (dom.q >= 0) marks.push_back(dom.q);
  for (int id : marks) pts.push_back(d.nearest_image(cs[id].location, centroid));

  const Circle c = minimal_enclosing_circle(pts);
  geo.outer_radius = c.radius;
  geo.outer_center = d.canonical(c.center);
  geo.diameter = point_set_diameter(pts);
  double x0 = pts[0].x(), x1 = x0, y0 = pts[0].y(), y1 = y0;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  geo.extent_x = x1 - x0;
  geo.extent_y = y1 - y0;
  return geo;
}

std::vector<DomainGeometry> measure_all(const Partition& part) {
  std::vector<DomainGeometry> out(part.domains.size());
  parallel_for(out.size(), [&](std::size_t k) { out[k] = measure(part, part.domains[k]); });
  return out;
}

RadiusCensus outer_radius_census(const Partition& part, const std::vector<DomainGeometry>& geo) {
  RadiusCensus c;
  for (const auto& g : geo) c.sorted_radii.push_back(g.outer_radius);
  std::sort(c.sorted_radii.begin(), c.sorted_radii.end(), std::greater<>());
  c.rank = part.nu() / 2;
  if (!c.sorted_radii.empty()) {
    const int idx = std::clamp(c.rank - 1, 0, static_cast<int>(c.sorted_radii.size()) - 1);
    c.radius = c.sorted_radii[idx];
    c.constant = c.radius * std::sqrt(part.field->lambda());
  }
  for (const auto& g : geo) {
    if (!std::isfinite(g.dpq) || g.dpq <= 0) continue;
    const double ratio = g.outer_radius / (0.5 * g.dpq);
    c.min_ratio_to_half_dpq = std::min(c.min_ratio_to_half_dpq, ratio);
    if (ratio < 1.0) ++c.witness_violations;
  }
  return c;
}

std::vector<Point> domain_polygon(const Partition& part, const NeumannDomain& dom, const Point& anchor) {
  if (dom.kind != NeumannDomainKind::Inner || !part.nls) return {};
  const DomainSpec& d = part.grid.domain;
  const CellGrid& g = part.grid;
  // Curves from p to q through one saddle: a descending arm reversed, then an ascending arm.
  std::vector<std::vector<Point>> curves;
  for (const auto& [sid, idx] : part.nls->by_saddle) {
    for (int a : idx) {
      const FlowPath& down = part.nls->paths[a];
      if (down.direction != Direction::Descending || down.terminus.kind != TerminusKind::Extremum ||
          down.terminus.critical_id != dom.p)
        continue;
      for (int b : idx) {
        const FlowPath& up = part.nls->paths[b];
        if (up.direction != Direction::Ascending || up.terminus.kind != TerminusKind::Extremum ||
            up.terminus.critical_id != dom.q)
          continue;
        std::vector<Point> c(down.points.rbegin(), down.points.rend());
        c.insert(c.end(), up.points.begin() + 1, up.points.end());
        curves.push_back(std::move(c));
      }
    }
  }
  // Cells near the anchor, for scoring candidate polygons.
  std::vector<Point> own, other;
  std::vector<char> mine(static_cast<std::size_t>(g.size()), 0);
  for (int c : dom.cells) mine[c] = 1;
  for (int c = 0; c < g.size(); ++c) {
    if (part.domain_of[c] < 0) continue;
    const Point at = d.nearest_image(g.center(c), anchor);
    (mine[c] ? own : other).push_back(at);
  }
  std::vector<Point> best;
  long best_score = std::numeric_limits<long>::min();
  double best_area = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      std::vector<Point> poly;
      poly.reserve(curves[i].size() + curves[j].size());
      poly.push_back(d.nearest_image(curves[i].front(), anchor));
      auto extend = [&](const Point& p) { poly.push_back(d.nearest_image(p, poly.back())); };
      for (std::size_t k = 1; k < curves[i].size(); ++k) extend(curves[i][k]);
      for (std::size_t k = curves[j].size() - 1; k-- > 0;) extend(curves[j][k]);
      if ((poly.back() - poly.front()).norm() > 1e-9 * d.min_extent()) continue;  // wraps the torus
      poly.pop_back();
      const double area = std::abs(polygon_area(poly));
      if (area <= 0.0) continue;
      double x0 = poly[0].x(), x1 = x0, y0 = poly[0].y(), y1 = y0;
      for (const auto& p : poly) {
        x0 = std::min(x0, p.x()), x1 = std::max(x1, p.x());
        y0 = std::min(y0, p.y()), y1 = std::max(y1, p.y());
      }
      auto count = [&](const std::vector<Point>& pts) {
        long n = 0;
        for (const auto& p : pts)
          if (p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1 && point_in_polygon(poly, p)) ++n;
        return n;
      };
      const long score = count(own) - count(other);
      if (score > best_score || (score == best_score && area < best_area)) {
        best_score = score;
        best_area = area;
        best = std::move(poly);
      }
    }
  }
  // The chosen polygon must hold nearly all of the labeled cells.
  if (best.empty() || best_score < static_cast<long>(0.9 * static_cast<double>(dom.cells.size()))) return {};
  if (polygon_area(best) < 0) std::reverse(best.begin(), best.end());
  return best;
}

std::vector<int> lens_domains(const Partition& part, const std::vector<DomainGeometry>& geo, double ratio) {
  const DomainSpec& d = part.grid.domain;
  const CriticalSet& cs = *part.cs;
  std::vector<int> out;
  for (const auto& g : geo) {
    const NeumannDomain& dom = part.domains[g.domain];
    if (dom.kind != NeumannDomainKind::Inner) continue;
    double span = 0.0;
    for (std::size_t i = 0; i < dom.saddles.size(); ++i)
      for (std::size_t j = i + 1; j < dom.saddles.size(); ++j)
        span = std::max(span, d.distance(cs[dom.saddles[i]].location, cs[dom.saddles[j]].location));
    if (span >= ratio * g.diameter && span > (1 + 1e-3) * g.dpq) out.push_back(g.domain);
  }
  return out;
}

nlohmann::json to_json(const DomainGeometry& g) {
  nlohmann::json j = {{"area", g.area},
                      {"footprint_area", g.footprint_area},
                      {"outer_radius", g.outer_radius},
                      {"diameter", g.diameter},
                      {"centroid", {g.centroid.x(), g.centroid.y()}},
                      {"extent", {g.extent_x, g.extent_y}},
                      {"lift_ok", g.lift_ok}};
  j["dpq"] = std::isfinite(g.dpq) ? nlohmann::json(g.dpq) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const RadiusCensus& c) {
  nlohmann::json j = {{"rank", c.rank},
                      {"radius", c.radius},
                      {"constant", c.constant},
                      {"witness_violations", c.witness_violations}};
  j["min_ratio_to_half_dpq"] =
      std::isfinite(c.min_ratio_to_half_dpq) ? nlohmann::json(c.min_ratio_to_half_dpq) : nlohmann::json(nullptr);
  return j;
}

}  // namespace neumann
