#include "neumann/raster.hpp"

#include <cmath>
#include <queue>
#include <unordered_map>

namespace neumann {

CellGrid CellGrid::for_resolution(const DomainSpec& d, int resolution) {
  if (d.lx >= d.ly) {
    const int ny = std::max(1, static_cast<int>(std::lround(resolution * d.ly / d.lx)));
    return CellGrid(d, resolution, ny);
  }
  const int nx = std::max(1, static_cast<int>(std::lround(resolution * d.lx / d.ly)));
  return CellGrid(d, nx, resolution);
}

int CellGrid::wrap(int i, int j) const {
  if (domain.periodic()) {
    i %= nx;
    if (i < 0) i += nx;
    j %= ny;
    if (j < 0) j += ny;
    return index(i, j);
  }
  if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
  return index(i, j);
}

int CellGrid::locate(const Point& p) const {
  int i = static_cast<int>(std::floor(p.x() / hx()));
  int j = static_cast<int>(std::floor(p.y() / hy()));
  if (!domain.periodic()) {
    i = std::clamp(i, 0, nx - 1);
    j = std::clamp(j, 0, ny - 1);
  }
  return wrap(i, j);
}

std::array<int, 4> CellGrid::neighbors4(int c) const {
  const int i = ix(c), j = iy(c);
  return {wrap(i - 1, j), wrap(i + 1, j), wrap(i, j - 1), wrap(i, j + 1)};
}

std::array<int, 8> CellGrid::neighbors8(int c) const {
  const int i = ix(c), j = iy(c);
  return {wrap(i - 1, j - 1), wrap(i - 1, j), wrap(i - 1, j + 1), wrap(i, j - 1),
          wrap(i, j + 1),     wrap(i + 1, j - 1), wrap(i + 1, j), wrap(i + 1, j + 1)};
}

int label_components(const CellGrid& g, const std::vector<int>& key, std::vector<int>& comp) {
  comp.assign(static_cast<std::size_t>(g.size()), -1);
  int count = 0;
  std::vector<int> stack;
  for (int c = 0; c < g.size(); ++c) {
    if (key[c] < 0 || comp[c] >= 0) continue;
    comp[c] = count;
    stack.push_back(c);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : g.neighbors4(u)) {
        if (v >= 0 && comp[v] < 0 && key[v] == key[c]) {
          comp[v] = count;
          stack.push_back(v);
        }
      }
    }
    ++count;
  }
  return count;
}

void supercover(const CellGrid& g, const Point& a, const Point& b, const std::function<void(int)>& visit) {
  const double hx = g.hx(), hy = g.hy();
  Point pa = a, pb = b;
  if (!g.domain.periodic()) {
    const double ex = 1e-12 * g.domain.lx, ey = 1e-12 * g.domain.ly;
    for (Point* p : {&pa, &pb}) {
      p->x() = std::clamp(p->x(), 0.0, g.domain.lx - ex);
      p->y() = std::clamp(p->y(), 0.0, g.domain.ly - ey);
    }
  }
  long i = static_cast<long>(std::floor(pa.x() / hx));
  long j = static_cast<long>(std::floor(pa.y() / hy));
  const long ie = static_cast<long>(std::floor(pb.x() / hx));
  const long je = static_cast<long>(std::floor(pb.y() / hy));
  auto emit = [&](long u, long v) {
    const int c = g.wrap(static_cast<int>(u), static_cast<int>(v));
    if (c >= 0) visit(c);
  };
  emit(i, j);
  const Vec2 d = pb - pa;
  const int sx = d.x() > 0 ? 1 : (d.x() < 0 ? -1 : 0);
  const int sy = d.y() > 0 ? 1 : (d.y() < 0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  double tx = sx == 0 ? inf : (((sx > 0 ? i + 1 : i) * hx) - pa.x()) / d.x();
  double ty = sy == 0 ? inf : (((sy > 0 ? j + 1 : j) * hy) - pa.y()) / d.y();
  const double dtx = sx == 0 ? inf : hx / std::abs(d.x());
  const double dty = sy == 0 ? inf : hy / std::abs(d.y());
  long remaining = std::abs(ie - i) + std::abs(je - j);
  const double tie = 1e-12;
  while (remaining > 0) {
    if (tx < ty - tie) {
      i += sx;
      tx += dtx;
      --remaining;
    } else if (ty < tx - tie) {
      j += sy;
      ty += dty;
      --remaining;
    } else {
      // Exact corner passage: include the x-side cell, then move diagonally.
      i += sx;
      tx += dtx;
      --remaining;
      emit(i, j);
      if (remaining == 0) break;
      j += sy;
      ty += dty;
      --remaining;
    }
    emit(i, j);
  }
}

namespace {

struct MaskLookup {
  std::vector<int> sorted;
  explicit MaskLookup(const std::vector<int>& cells) : sorted(cells) {
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  }
  bool operator()(int c) const { return c >= 0 && std::binary_search(sorted.begin(), sorted.end(), c); }
};

}  // namespace

long euler_characteristic(const CellGrid& g, const std::vector<int>& cells) {
  MaskLookup in(cells);
  long v = static_cast<long>(in.sorted.size()), e = 0, f = 0;
  for (int c : in.sorted) {
    const int i = g.ix(c), j = g.iy(c);
    const int right = g.wrap(i + 1, j), up = g.wrap(i, j + 1), diag = g.wrap(i + 1, j + 1);
    const bool r = in(right), u = in(up);
    e += r + u;
    if (r && u && in(diag)) ++f;
  }
  return v - e + f;
}

std::vector<int> boundary_cells(const CellGrid& g, const std::vector<int>& cells) {
  MaskLookup in(cells);
  std::vector<int> out;
  for (int c : in.sorted) {
    for (int n : g.neighbors4(c)) {
      if (!in(n)) {
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

std::vector<std::vector<std::array<int, 2>>> boundary_loops(const CellGrid& g, const std::vector<int>& cells) {
  MaskLookup in(cells);
  // Directed boundary edges with the mask on the left; side 0..3 = bottom, right, top, left.
  struct Edge {
    int x0, y0;  // start corner (canonical lattice coords)
    int dx, dy;
  };
  std::vector<Edge> edges;
  for (int c : in.sorted) {
    const int i = g.ix(c), j = g.iy(c);
    if (!in(g.wrap(i, j - 1))) edges.push_back({i, j, 1, 0});
    if (!in(g.wrap(i + 1, j))) edges.push_back({i + 1, j, 0, 1});
    if (!in(g.wrap(i, j + 1))) edges.push_back({i + 1, j + 1, -1, 0});
    if (!in(g.wrap(i - 1, j))) edges.push_back({i, j + 1, 0, -1});
  }
  const bool per = g.domain.periodic();
  auto vkey = [&](int x, int y) -> long {
    if (per) {
      x = ((x % g.nx) + g.nx) % g.nx;
      y = ((y % g.ny) + g.ny) % g.ny;
    }
    return static_cast<long>(x) * (g.ny + 1) + y;
  };
  std::unordered_map<long, std::vector<int>> outgoing;
  for (std::size_t k = 0; k < edges.size(); ++k)
    outgoing[vkey(edges[k].x0, edges[k].y0)].push_back(static_cast<int>(k));

  std::vector<char> used(edges.size(), 0);
  std::vector<std::vector<std::array<int, 2>>> loops;
  for (std::size_t s = 0; s < edges.size(); ++s) {
    if (used[s]) continue;
    std::vector<std::array<int, 2>> loop;
    int x = edges[s].x0, y = edges[s].y0;
    int cur = static_cast<int>(s);
    while (true) {
      used[cur] = 1;
      loop.push_back({x, y});
      x += edges[cur].dx;
      y += edges[cur].dy;
      const auto& cand = outgoing[vkey(x, y)];
      int next = -1, best_rank = 4;
      for (int k : cand) {
        if (used[k] && k != static_cast<int>(s)) continue;
        // Rank turns: left 0, straight 1, right 2.
        const int cross = edges[cur].dx * edges[k].dy - edges[cur].dy * edges[k].dx;
        const int rank = cross > 0 ? 0 : (cross == 0 ? 1 : 2);
        if (rank < best_rank) {
          best_rank = rank;
          next = k;
        }
      }
      if (next < 0 || next == static_cast<int>(s)) break;
      cur = next;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace neumann
