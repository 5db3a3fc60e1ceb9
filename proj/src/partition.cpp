#include "neumann/partition.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

namespace neumann {

const char* to_string(NeumannDomainKind k) {
  switch (k) {
    case NeumannDomainKind::Inner: return "inner";
    case NeumannDomainKind::BoundaryMin: return "boundary_min";
    case NeumannDomainKind::BoundaryMax: return "boundary_max";
  }
  return "?";
}

namespace {

int flow_label(const FlowPath& p) {
  switch (p.terminus.kind) {
    case TerminusKind::Extremum: return p.terminus.critical_id;
    case TerminusKind::Boundary: return kBoundaryLabel;
    case TerminusKind::Saddle: return kLineLabel;
  }
  return kUnresolved;
}

// Cells whose centre lies within radius of p.
template <typename Fn>
void cells_near(const CellGrid& g, const Point& p, double radius, Fn&& fn) {
  const int i0 = static_cast<int>(std::floor((p.x() - radius) / g.hx()));
  const int i1 = static_cast<int>(std::floor((p.x() + radius) / g.hx()));
  const int j0 = static_cast<int>(std::floor((p.y() - radius) / g.hy()));
  const int j1 = static_cast<int>(std::floor((p.y() + radius) / g.hy()));
  std::set<int> seen;
  for (int i = i0; i <= i1; ++i)
    for (int j = j0; j <= j1; ++j) {
      const int c = g.wrap(i, j);
      if (c < 0 || !seen.insert(c).second) continue;
      if (g.domain.distance(g.center(c), p) <= radius) fn(c);
    }
}

}  // namespace

std::vector<Point> loop_points(const CellGrid& g, const std::vector<std::array<int, 2>>& loop) {
  std::vector<Point> out;
  out.reserve(loop.size());
  for (const auto& v : loop) out.emplace_back(v[0] * g.hx(), v[1] * g.hy());
  return out;
}

Partition label_by_flow(FieldPtr f, std::shared_ptr<const CriticalSet> cs, std::shared_ptr<const NeumannLineSet> nls,
                        const LabelOptions& opts) {
  if (!cs->is_morse) throw Error(ErrorCode::DegenerateCriticalPoint, "labeling needs a Morse critical set");
  if (opts.resolution < 64)
    throw Error(ErrorCode::ResolutionTooCoarse, "resolution " + std::to_string(opts.resolution) + " is below 64");
  Partition part;
  part.field = f;
  part.cs = cs;
  part.nls = nls;
  part.options = opts;
  part.grid = CellGrid::for_resolution(f->domain(), opts.resolution);
  const CellGrid& g = part.grid;
  const int n = g.size();

  FlowOptions lopts = opts.flow;
  lopts.max_step = std::max(lopts.max_step, 1.0 / (32.0 * std::max(1, f->max_frequency())));
  lopts.use_basin_balls = true;
  lopts.max_steps = std::min(lopts.max_steps, 20000);
  const FlowTracer tracer(f, *cs, lopts);

  part.label_min.assign(n, kUnresolved);
  part.label_max.assign(n, kUnresolved);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    const Point c = g.center(static_cast<int>(k));
    try {
      const FlowPath down = tracer.integrate(c, Direction::Descending, -1, false);
      const FlowPath up = tracer.integrate(c, Direction::Ascending, -1, false);
      part.label_min[k] = flow_label(down);
      part.label_max[k] = flow_label(up);
    } catch (const Error& e) {
      log_debug("cell ", k, " unresolved: ", e.what());
      part.label_min[k] = part.label_max[k] = kUnresolved;
    }
  });

  // Majority fill of unresolved cells from resolved 8-neighbours.
  std::vector<int> unresolved;
  for (int c = 0; c < n; ++c)
    if (part.label_min[c] == kUnresolved) unresolved.push_back(c);
  part.unresolved_initial = static_cast<int>(unresolved.size());
  if (unresolved.size() > opts.unresolved_limit * n) {
    throw Error(ErrorCode::ResolutionTooCoarse,
                std::to_string(unresolved.size()) + " of " + std::to_string(n) +
                    " cells could not be labeled by flow; increase the resolution or capture radius");
  }
  {
    std::vector<std::pair<int, int>> fill(unresolved.size(), {kUnresolved, kUnresolved});
    for (std::size_t k = 0; k < unresolved.size(); ++k) {
      std::map<std::pair<int, int>, int> votes;
      for (int nb : g.neighbors8(unresolved[k])) {
        if (nb < 0) continue;
        const int a = part.label_min[nb], b = part.label_max[nb];
        if (a == kUnresolved || a == kLineLabel || b == kLineLabel) continue;
        ++votes[{a, b}];
      }
      int best = 0;
      for (const auto& [lab, cnt] : votes)
        if (cnt > best) best = cnt, fill[k] = lab;
    }
    for (std::size_t k = 0; k < unresolved.size(); ++k) {
      part.label_min[unresolved[k]] = fill[k].first;
      part.label_max[unresolved[k]] = fill[k].second;
      if (fill[k].first == kUnresolved) ++part.unresolved_final;
    }
  }

  // Neumann-line band.
  part.band.assign(n, 0);
  for (int c = 0; c < n; ++c) {
    const int a = part.label_min[c], b = part.label_max[c];
    if (a == kLineLabel || b == kLineLabel || a == kUnresolved || (a == kBoundaryLabel && b == kBoundaryLabel))
      part.band[c] = 1;
  }
  for (const auto& cp : cs->points) part.band[g.locate(cp.location)] = 1;
  for (const auto& path : nls->paths)
    for (std::size_t k = 1; k < path.points.size(); ++k)
      supercover(g, path.points[k - 1], path.points[k], [&](int c) { part.band[c] = 1; });

  // Domains: 4-connected components of equal (min, max) labels off the band.
  const int stride = static_cast<int>(cs->size()) + 1;
  std::vector<int> key(n, -1);
  for (int c = 0; c < n; ++c)
    if (!part.band[c]) key[c] = (part.label_min[c] + 1) * stride + (part.label_max[c] + 1);
  const int count = label_components(g, key, part.domain_of);
  part.domains.resize(count);
  for (int c = 0; c < n; ++c) {
    if (part.domain_of[c] >= 0) part.domains[part.domain_of[c]].cells.push_back(c);
    else ++part.band_cells;
  }
  for (int id = 0; id < count; ++id) {
    NeumannDomain& dom = part.domains[id];
    dom.id = id;
    const int c0 = dom.cells.front();
    dom.p = part.label_min[c0] >= 0 ? part.label_min[c0] : -1;
    dom.q = part.label_max[c0] >= 0 ? part.label_max[c0] : -1;
    dom.kind = dom.p >= 0 && dom.q >= 0 ? NeumannDomainKind::Inner
               : dom.p >= 0            ? NeumannDomainKind::BoundaryMin
                                       : NeumannDomainKind::BoundaryMax;
  }

  // Footprints: band cells next to exactly one domain with the same flow label.
  part.footprint_of = part.domain_of;
  for (int c = 0; c < n; ++c) {
    if (!part.band[c]) continue;
    const int a = part.label_min[c], b = part.label_max[c];
    if (a == kLineLabel || b == kLineLabel || a == kUnresolved) continue;
    int owner = -1;
    bool unique = true;
    for (int nb : g.neighbors4(c)) {
      if (nb < 0 || part.domain_of[nb] < 0) continue;
      if (owner >= 0 && part.domain_of[nb] != owner) unique = false;
      owner = part.domain_of[nb];
    }
    if (owner < 0 || !unique) continue;
    const NeumannDomain& dom = part.domains[owner];
    if ((dom.p >= 0 ? dom.p : kBoundaryLabel) == a && (dom.q >= 0 ? dom.q : kBoundaryLabel) == b)
      part.footprint_of[c] = owner;
  }
  for (int c = 0; c < n; ++c)
    if (part.footprint_of[c] >= 0) part.domains[part.footprint_of[c]].footprint.push_back(c);

  parallel_for(part.domains.size(), [&](std::size_t k) {
    NeumannDomain& dom = part.domains[k];
    auto loops = boundary_loops(g, dom.cells);
    dom.boundary_loop_count = static_cast<int>(loops.size());
    std::size_t best = 0;
    for (std::size_t l = 1; l < loops.size(); ++l)
      if (loops[l].size() > loops[best].size()) best = l;
    if (!loops.empty()) dom.boundary_loop = std::move(loops[best]);
  });

  // Critical points near each footprint.
  const double radius = opts.adjacency_cells * std::max(g.hx(), g.hy());
  for (const auto& cp : cs->points) {
    std::set<int> near;
    cells_near(g, cp.location, radius, [&](int c) {
      if (part.footprint_of[c] >= 0) near.insert(part.footprint_of[c]);
    });
    for (int d : near) {
      if (cp.kind == CriticalKind::Saddle) part.domains[d].saddles.push_back(cp.id);
      else part.domains[d].nearby_extrema.push_back(cp.id);
    }
  }

  for (int e : cs->extrema()) part.degrees[e] = 0;
  for (const auto& path : nls->paths)
    if (path.terminus.kind == TerminusKind::Extremum) ++part.degrees[path.terminus.critical_id];

  part.mu = count;
  part.nodal = extract_nodal(*f, g);
  attach_nodal_arcs(part);
  log_info("partition at ", g.nx, "x", g.ny, ": mu = ", part.mu, ", nu = ", part.nodal.nu, ", band cells = ",
           part.band_cells, ", unresolved = ", part.unresolved_initial, " -> ", part.unresolved_final);
  return part;
}

NodalSet extract_nodal(const ScalarField& f, const CellGrid& g) {
  NodalSet ns;
  const int n = g.size();
  std::vector<double> v(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) { v[k] = f.value_unchecked(g.center(static_cast<int>(k))); });
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  const double tol = 1e-9 * vmax;
  ns.sign.assign(n, 0);
  std::vector<int> key(n, -1);
  for (int c = 0; c < n; ++c) {
    ns.sign[c] = v[c] > tol ? 1 : (v[c] < -tol ? -1 : 0);
    if (ns.sign[c] != 0) key[c] = ns.sign[c] > 0 ? 1 : 0;
  }
  ns.nu = label_components(g, key, ns.domain_of);
  ns.domains.resize(ns.nu);
  for (int c = 0; c < n; ++c) {
    const int d = ns.domain_of[c];
    if (d < 0) continue;
    ns.domains[d].id = d;
    ns.domains[d].sign = ns.sign[c];
    ns.domains[d].cells.push_back(c);
  }

  // Marching squares on the dual grid whose vertices are the cell centres.
  const bool per = g.domain.periodic();
  const int si = per ? g.nx : g.nx - 1, sj = per ? g.ny : g.ny - 1;
  const auto hf = f.periodic_extension();
  auto hedge = [&](int i, int j) -> long { return 2L * g.wrap(i, j); };
  auto vedge = [&](int i, int j) -> long { return 2L * g.wrap(i, j) + 1; };
  for (int i = 0; i < si; ++i) {
    for (int j = 0; j < sj; ++j) {
      const int c00 = g.wrap(i, j), c10 = g.wrap(i + 1, j), c11 = g.wrap(i + 1, j + 1), c01 = g.wrap(i, j + 1);
      const double v00 = v[c00], v10 = v[c10], v11 = v[c11], v01 = v[c01];
      const int mask = (v00 > 0) | (v10 > 0) << 1 | (v11 > 0) << 2 | (v01 > 0) << 3;
      if (mask == 0 || mask == 15) continue;
      const Point o((i + 0.5) * g.hx(), (j + 0.5) * g.hy());
      const Vec2 ex(g.hx(), 0.0), ey(0.0, g.hy());
      auto cross = [](const Point& a, const Point& b, double va, double vb) {
        return Point(a + (va / (va - vb)) * (b - a));
      };
      // Edge 0 bottom, 1 right, 2 top, 3 left.
      const std::array<long, 4> eid{hedge(i, j), vedge(i + 1, j), hedge(i, j + 1), vedge(i, j)};
      const std::array<Point, 4> ep{cross(o, o + ex, v00, v10), cross(o + ex, o + ex + ey, v10, v11),
                                    cross(o + ey, o + ex + ey, v01, v11), cross(o, o + ey, v00, v01)};
      auto seg = [&](int a, int b) { ns.segments.push_back({ep[a], ep[b], eid[a], eid[b]}); };
      std::vector<int> cut;
      if ((v00 > 0) != (v10 > 0)) cut.push_back(0);
      if ((v10 > 0) != (v11 > 0)) cut.push_back(1);
      if ((v01 > 0) != (v11 > 0)) cut.push_back(2);
      if ((v00 > 0) != (v01 > 0)) cut.push_back(3);
      if (cut.size() == 2) {
        seg(cut[0], cut[1]);
      } else {
        const bool centre_pos = hf->value_unchecked(o + 0.5 * (ex + ey)) > 0;
        // Diagonal 00-11 positive with a positive centre joins those corners.
        if ((mask == 5) == centre_pos) {
          seg(0, 1);
          seg(2, 3);
        } else {
          seg(0, 3);
          seg(1, 2);
        }
      }
    }
  }

  // Chain segments into polylines through shared edge ids.
  std::unordered_map<long, std::vector<int>> at;
  for (std::size_t k = 0; k < ns.segments.size(); ++k) {
    at[ns.segments[k].ea].push_back(static_cast<int>(k));
    at[ns.segments[k].eb].push_back(static_cast<int>(k));
  }
  std::vector<char> used(ns.segments.size(), 0);
  auto walk = [&](int s0, long from_edge) {
    NodalLine line;
    int s = s0;
    long e = from_edge;
    const NodalSegment& first = ns.segments[s];
    line.points.push_back(first.ea == e ? first.a : first.b);
    while (s >= 0 && !used[s]) {
      used[s] = 1;
      const NodalSegment& sg = ns.segments[s];
      const bool fwd = sg.ea == e;
      const Point next = fwd ? sg.b : sg.a;
      const long ne = fwd ? sg.eb : sg.ea;
      line.points.push_back(g.domain.nearest_image(next, line.points.back()));
      e = ne;
      int nxt = -1;
      for (int t : at[e])
        if (!used[t]) nxt = t;
      s = nxt;
    }
    line.closed = at[e].size() == 2 && e == from_edge;
    ns.lines.push_back(std::move(line));
  };
  for (std::size_t k = 0; k < ns.segments.size(); ++k) {
    if (used[k]) continue;
    const auto& sg = ns.segments[k];
    if (at[sg.ea].size() == 1) walk(static_cast<int>(k), sg.ea);
    else if (at[sg.eb].size() == 1) walk(static_cast<int>(k), sg.eb);
  }
  for (std::size_t k = 0; k < ns.segments.size(); ++k)
    if (!used[k]) walk(static_cast<int>(k), ns.segments[k].ea);
  return ns;
}

void attach_nodal_arcs(Partition& part) {
  const CellGrid& g = part.grid;
  const DomainSpec& d = g.domain;
  std::vector<std::vector<int>> per(part.domains.size());
  for (std::size_t k = 0; k < part.nodal.segments.size(); ++k) {
    const auto& s = part.nodal.segments[k];
    const int c = g.locate(d.canonical(0.5 * (s.a + s.b)));
    const int owner = part.footprint_of[c];
    if (owner >= 0) per[owner].push_back(static_cast<int>(k));
  }
  parallel_for(part.domains.size(), [&](std::size_t di) {
    NeumannDomain& dom = part.domains[di];
    NodalArc arc;
    arc.segments = static_cast<int>(per[di].size());
    std::map<long, int> vid;
    std::vector<Point> vpos;
    auto vertex = [&](long e, const Point& p) {
      auto [it, fresh] = vid.emplace(e, static_cast<int>(vpos.size()));
      if (fresh) vpos.push_back(d.canonical(p));
      return it->second;
    };
    std::vector<std::pair<int, int>> edges;
    for (int k : per[di]) {
      const auto& s = part.nodal.segments[k];
      edges.emplace_back(vertex(s.ea, s.a), vertex(s.eb, s.b));
    }
    const int nv = static_cast<int>(vpos.size());
    std::vector<int> parent(nv), degree(nv, 0);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto [a, b] : edges) parent[find(a)] = find(b);
    // Where nodal lines cross at a corner saddle, a crossing line can leave a stub of a cell or two
    // inside the footprint. Components lying entirely next to one of the domain's saddles are dropped.
    const double stub = 2.0 * std::max(g.hx(), g.hy());
    std::map<int, bool> near_saddle;
    for (int v = 0; v < nv; ++v) {
      bool close = false;
      for (int sid : dom.saddles) close = close || d.distance(vpos[v], (*part.cs)[sid].location) <= stub;
      auto [it, fresh] = near_saddle.emplace(find(v), close);
      if (!fresh) it->second = it->second && close;
    }
    for (auto [a, b] : edges) {
      if (near_saddle[find(a)]) continue;
      ++degree[a];
      ++degree[b];
    }
    std::set<int> roots;
    bool max2 = true;
    for (int v = 0; v < nv; ++v) {
      if (near_saddle[find(v)]) {
        if (degree[v] == 0 && v == find(v)) ++arc.stubs;
        continue;
      }
      roots.insert(find(v));
      if (degree[v] == 1) {
        ++arc.endpoints;
        arc.endpoint_locations.push_back(vpos[v]);
      }
      if (degree[v] > 2) max2 = false;
    }
    arc.components = static_cast<int>(roots.size());
    // A connected graph with max degree 2 and two leaves is a path.
    arc.simple = max2 && arc.components == 1 && arc.endpoints == 2;

    if (dom.kind == NeumannDomainKind::Inner && arc.endpoints == 2) {
      auto loops = boundary_loops(g, dom.footprint);
      std::size_t best = 0;
      for (std::size_t l = 1; l < loops.size(); ++l)
        if (loops[l].size() > loops[best].size()) best = l;
      if (!loops.empty() && loops[best].size() >= 4) {
        const auto pts = loop_points(g, loops[best]);
        const long m = static_cast<long>(pts.size());
        auto nearest = [&](const Point& t) {
          long bi = 0;
          double bd = std::numeric_limits<double>::infinity();
          for (long k = 0; k < m; ++k) {
            const double dd = d.distance(d.canonical(pts[k]), t);
            if (dd < bd) bd = dd, bi = k;
          }
          return bi;
        };
        const long ip = nearest((*part.cs)[dom.p].location), iq = nearest((*part.cs)[dom.q].location);
        const long i1 = nearest(arc.endpoint_locations[0]), i2 = nearest(arc.endpoint_locations[1]);
        auto fwd = [&](long from, long to) { return ((to - from) % m + m) % m; };
        auto between = [&](long i) { return fwd(ip, i) < fwd(ip, iq); };
        arc.distinct_subarcs = ip != iq && between(i1) != between(i2);
      }
    }
    dom.arc = std::move(arc);
  });
}

}  // namespace neumann
