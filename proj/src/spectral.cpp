#include "neumann/spectral.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace neumann {

SparseMatrix build_operator(const CellGrid& g, const std::vector<int>& cells, BoundaryCondition bc) {
  if (cells.empty()) throw Error(ErrorCode::EmptyMask, "operator requested on an empty mask");
  std::unordered_map<int, int> row;
  row.reserve(cells.size() * 2);
  for (std::size_t k = 0; k < cells.size(); ++k) row[cells[k]] = static_cast<int>(k);
  const double wx = 1.0 / (g.hx() * g.hx()), wy = 1.0 / (g.hy() * g.hy());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(cells.size() * 5);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto nb = g.neighbors4(cells[k]);
    int present_x = 0, present_y = 0;
    for (int s = 0; s < 4; ++s) {
      auto it = nb[s] >= 0 ? row.find(nb[s]) : row.end();
      if (it == row.end()) continue;
      if (it->second == static_cast<int>(k)) continue;  // one-cell-wide torus wrap
      const double w = s < 2 ? wx : wy;
      (s < 2 ? present_x : present_y) += 1;
      trip.emplace_back(static_cast<int>(k), it->second, -w);
    }
    double diag = present_x * wx + present_y * wy;
    if (bc == BoundaryCondition::Dirichlet) diag += 2.0 * ((2 - present_x) * wx + (2 - present_y) * wy);
    trip.emplace_back(static_cast<int>(k), static_cast<int>(k), diag);
  }
  SparseMatrix a(static_cast<int>(cells.size()), static_cast<int>(cells.size()));
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

namespace {

// Polygon clipped to an axis-aligned box (Sutherland-Hodgman; exact for area and centroid even when
// the polygon is not convex).
std::vector<Point> clip_to_box(const std::vector<Point>& poly, double x0, double x1, double y0, double y1) {
  std::vector<Point> cur = poly, next;
  auto pass = [&](auto inside, auto cross) {
    next.clear();
    for (std::size_t i = 0, n = cur.size(); i < n; ++i) {
      const Point& a = cur[i];
      const Point& b = cur[(i + 1) % n];
      const bool ia = inside(a), ib = inside(b);
      if (ia) next.push_back(a);
      if (ia != ib) next.push_back(cross(a, b));
    }
    cur.swap(next);
  };
  auto at_x = [](double x) {
    return [x](const Point& a, const Point& b) { return Point(x, a.y() + (b.y() - a.y()) * (x - a.x()) / (b.x() - a.x())); };
  };
  auto at_y = [](double y) {
    return [y](const Point& a, const Point& b) { return Point(a.x() + (b.x() - a.x()) * (y - a.y()) / (b.y() - a.y()), y); };
  };
  pass([&](const Point& p) { return p.x() >= x0; }, at_x(x0));
  if (!cur.empty()) pass([&](const Point& p) { return p.x() <= x1; }, at_x(x1));
  if (!cur.empty()) pass([&](const Point& p) { return p.y() >= y0; }, at_y(y0));
  if (!cur.empty()) pass([&](const Point& p) { return p.y() <= y1; }, at_y(y1));
  return cur;
}

// Sorted crossings of the polygon boundary with the line {coord = c}; axis 0 is x = c.
std::vector<double> crossings(const std::vector<Point>& poly, int axis, double c) {
  std::vector<double> out;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    if ((a[axis] > c) == (b[axis] > c)) continue;
    const double t = (c - a[axis]) / (b[axis] - a[axis]);
    out.push_back(a[1 - axis] + t * (b[1 - axis] - a[1 - axis]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Length of [lo, hi] inside the even-odd intervals given by sorted crossings.
double covered(const std::vector<double>& xs, double lo, double hi) {
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); k += 2) len += std::max(0.0, std::min(hi, xs[k + 1]) - std::max(lo, xs[k]));
  return len;
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

double residual_floor(const SparseMatrix& a) {
  double inf = 0.0;
  for (int c = 0; c < a.outerSize(); ++c) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) s += std::abs(it.value());
    inf = std::max(inf, s);
  }
  return 64.0 * std::numeric_limits<double>::epsilon() * inf;
}

}  // namespace

Spectrum lowest_eigenvalues(const SparseMatrix& a, int k, const EigenOptions& opts) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) throw Error(ErrorCode::EmptyMask, "operator is empty");
  k = std::clamp(k, 1, n);
  Spectrum sp;
  // Rounding in A v bounds the attainable residual for fine grids.
  const double tol = std::max(opts.tolerance, residual_floor(a));

  if (n <= opts.dense_limit) {
    const Eigen::MatrixXd dense(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "dense eigensolver failed");
    sp.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    const Eigen::MatrixXd v = es.eigenvectors().leftCols(k);
    const Eigen::MatrixXd r = a * v - v * es.eigenvalues().head(k).asDiagonal();
    sp.max_residual = r.colwise().norm().maxCoeff();
    if (opts.vectors) sp.vectors = v;
    return sp;
  }

  const int m = std::min(n, 2 * k + 10);
  double dmax = 0.0;
  for (int i = 0; i < n; ++i) dmax = std::max(dmax, a.coeff(i, i));
  const double sigma = 1e-4 * dmax;
  SparseMatrix b = a;
  for (int i = 0; i < n; ++i) b.coeffRef(i, i) += sigma;
  Eigen::SimplicialLDLT<SparseMatrix> solver(b);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "factorisation of A + sigma I failed");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd x(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = gauss(rng);
  x = orthonormal_columns(x);

  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Eigen::MatrixXd q = orthonormal_columns(solver.solve(x));
    const Eigen::MatrixXd aq = a * q;
    Eigen::MatrixXd h = q.transpose() * aq;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    x = q * es.eigenvectors();
    const Eigen::MatrixXd ax = aq * es.eigenvectors();
    double worst = 0.0;
    for (int j = 0; j < k; ++j)
      worst = std::max(worst, (ax.col(j) - es.eigenvalues()(j) * x.col(j)).norm() / x.col(j).norm());
    sp.iterations = it;
    if (worst <= tol) {
      sp.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
      sp.max_residual = worst;
      if (opts.vectors) sp.vectors = x.leftCols(k);
      return sp;
    }
  }
  std::ostringstream os;
  os << "subspace iteration did not reach residual " << tol << " in " << opts.max_iterations << " iterations";
  throw Error(ErrorCode::ConvergenceFailure, os.str());
}

CutCellOperator build_cut_cell_operator(const std::vector<Point>& poly, double hx, double hy, double min_fraction) {
  if (poly.size() < 3) throw Error(ErrorCode::EmptyMask, "polygon has fewer than three vertices");
  CutCellOperator op;
  op.area = std::abs(polygon_area(poly));
  op.perimeter = polygon_perimeter(poly);
  double x0 = poly[0].x(), x1 = x0, y0 = poly[0].y(), y1 = y0;
  for (const auto& p : poly) {
    x0 = std::min(x0, p.x()), x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y()), y1 = std::max(y1, p.y());
  }
  const long i0 = static_cast<long>(std::floor(x0 / hx)), j0 = static_cast<long>(std::floor(y0 / hy));
  const int ni = static_cast<int>(std::floor(x1 / hx) - i0) + 1, nj = static_cast<int>(std::floor(y1 / hy) - j0) + 1;
  auto at = [&](int i, int j) { return static_cast<std::size_t>(i) * nj + j; };

  // Cells touched by a boundary edge get clipped; the rest are classified by a row scan.
  std::vector<char> cut(static_cast<std::size_t>(ni) * nj, 0);
  for (std::size_t e = 0, n = poly.size(); e < n; ++e) {
    const Point& a = poly[e];
    const Point& b = poly[(e + 1) % n];
    const int ia = static_cast<int>(std::floor(std::min(a.x(), b.x()) / hx) - i0);
    const int ib = static_cast<int>(std::floor(std::max(a.x(), b.x()) / hx) - i0);
    const int ja = static_cast<int>(std::floor(std::min(a.y(), b.y()) / hy) - j0);
    const int jb = static_cast<int>(std::floor(std::max(a.y(), b.y()) / hy) - j0);
    for (int i = std::max(ia, 0); i <= std::min(ib, ni - 1); ++i)
      for (int j = std::max(ja, 0); j <= std::min(jb, nj - 1); ++j) cut[at(i, j)] = 1;
  }
  std::vector<double> area(cut.size(), 0.0);
  std::vector<Point> centroid(cut.size(), Point::Zero());
  for (int j = 0; j < nj; ++j) {
    const double yc = (j0 + j + 0.5) * hy;
    const auto xs = crossings(poly, 1, yc);
    for (int i = 0; i < ni; ++i) {
      const double cx0 = (i0 + i) * hx, cy0 = (j0 + j) * hy;
      const std::size_t k = at(i, j);
      if (cut[k]) {
        const auto piece = clip_to_box(poly, cx0, cx0 + hx, cy0, cy0 + hy);
        if (piece.size() < 3) continue;
        double a = 0.0;
        Point m = Point::Zero();
        for (std::size_t v = 0, n = piece.size(); v < n; ++v) {
          const Point& p = piece[v];
          const Point& q = piece[(v + 1) % n];
          const double w = p.x() * q.y() - q.x() * p.y();
          a += w;
          m += w * (p + q);
        }
        a *= 0.5;
        if (std::abs(a) <= 0.0) continue;
        area[k] = std::abs(a);
        centroid[k] = m / (6.0 * a);
      } else {
        const double xc = cx0 + 0.5 * hx;
        const auto n_left = std::lower_bound(xs.begin(), xs.end(), xc) - xs.begin();
        if (n_left % 2 == 1) {
          area[k] = hx * hy;
          centroid[k] = Point(xc, yc);
        }
      }
    }
  }

  std::vector<int> unknown(cut.size(), -1);
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < cut.size(); ++k)
    if (area[k] >= min_fraction * hx * hy) {
      unknown[k] = static_cast<int>(cells.size());
      cells.push_back(k);
    }
  // Faces: covered length of each interior grid line segment.
  struct Face {
    int a, b;
    double g;
  };
  std::vector<Face> faces;
  for (int i = 1; i < ni; ++i) {
    const auto ys = crossings(poly, 0, (i0 + i) * hx);
    if (ys.empty()) continue;
    for (int j = 0; j < nj; ++j) {
      const int a = unknown[at(i - 1, j)], b = unknown[at(i, j)];
      if (a < 0 || b < 0) continue;
      const double len = covered(ys, (j0 + j) * hy, (j0 + j + 1) * hy);
      if (len > 0) faces.push_back({a, b, len / hx});
    }
  }
  for (int j = 1; j < nj; ++j) {
    const auto xs = crossings(poly, 1, (j0 + j) * hy);
    if (xs.empty()) continue;
    for (int i = 0; i < ni; ++i) {
      const int a = unknown[at(i, j - 1)], b = unknown[at(i, j)];
      if (a < 0 || b < 0) continue;
      const double len = covered(xs, (i0 + i) * hx, (i0 + i + 1) * hx);
      if (len > 0) faces.push_back({a, b, len / hy});
    }
  }
  // Keep the face-connected piece with the largest area.
  const int n = static_cast<int>(cells.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const Face& f : faces) parent[find(f.a)] = find(f.b);
  std::vector<double> piece_area(n, 0.0);
  for (int u = 0; u < n; ++u) piece_area[find(u)] += area[cells[u]];
  if (n == 0) throw Error(ErrorCode::EmptyMask, "polygon covers no grid cell");
  const int keep = static_cast<int>(std::max_element(piece_area.begin(), piece_area.end()) - piece_area.begin());
  std::vector<int> row(n, -1);
  int m = 0;
  for (int u = 0; u < n; ++u)
    if (find(u) == keep) row[u] = m++;
  op.mass.resize(m);
  op.centroids.resize(m);
  for (int u = 0; u < n; ++u)
    if (row[u] >= 0) {
      op.mass(row[u]) = area[cells[u]];
      op.centroids[row[u]] = centroid[cells[u]];
    }
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> diag(m, 0.0);
  for (const Face& f : faces) {
    const int a = row[f.a], b = row[f.b];
    if (a < 0 || b < 0) continue;
    trip.emplace_back(a, b, -f.g);
    trip.emplace_back(b, a, -f.g);
    diag[a] += f.g;
    diag[b] += f.g;
  }
  for (int u = 0; u < m; ++u) trip.emplace_back(u, u, diag[u]);
  op.stiffness.resize(m, m);
  op.stiffness.setFromTriplets(trip.begin(), trip.end());
  op.stiffness.makeCompressed();
  return op;
}

SparseMatrix symmetric_form(const CutCellOperator& op) {
  const Eigen::VectorXd s = op.mass.cwiseSqrt().cwiseInverse();
  SparseMatrix a = s.asDiagonal() * op.stiffness * s.asDiagonal();
  a.makeCompressed();
  return a;
}

Position spectral_position(double lambda, const std::vector<double>& eig, double matching_tol, double cluster_tol) {
  Position p;
  if (lambda == 0.0) {
    p.pos = 0;
    p.matched = eig.empty() ? 0.0 : eig.front();
    return p;
  }
  if (eig.empty()) throw Error(ErrorCode::NoMatchingEigenvalue, "empty spectrum");
  std::size_t best = 0;
  for (std::size_t i = 1; i < eig.size(); ++i)
    if (std::abs(eig[i] - lambda) < std::abs(eig[best] - lambda)) best = i;
  p.lower = -std::numeric_limits<double>::infinity();
  p.upper = std::numeric_limits<double>::infinity();
  for (double e : eig) {
    if (e <= lambda) p.lower = std::max(p.lower, e);
    if (e >= lambda) p.upper = std::min(p.upper, e);
  }
  if (std::abs(eig[best] - lambda) > matching_tol) {
    std::ostringstream os;
    os << "no eigenvalue within " << matching_tol << " of " << lambda << "; bracketing eigenvalues " << p.lower
       << " and " << p.upper;
    throw Error(ErrorCode::NoMatchingEigenvalue, os.str());
  }
  p.matched = eig[best];
  const double ct = cluster_tol * std::max(1.0, std::abs(eig[best]));
  p.multiplicity = 0;
  for (std::size_t i = 0; i < eig.size(); ++i) {
    if (std::abs(eig[i] - eig[best]) <= ct) {
      ++p.multiplicity;
      p.pos = static_cast<int>(i);
    }
  }
  return p;
}

int eigen_count_for(double lambda, double area, double perimeter) {
  const double weyl = area * lambda / (4 * kPi) + perimeter * std::sqrt(lambda) / (4 * kPi);
  return static_cast<int>(std::ceil(1.5 * weyl)) + 8;
}

double rayleigh_quotient(const SparseMatrix& a, const Eigen::VectorXd& v) { return v.dot(a * v) / v.squaredNorm(); }

std::vector<double> rectangle_neumann_spectrum(double a, double b, int k) {
  std::vector<double> out;
  const int lim = k + 2;
  for (int m = 0; m <= lim; ++m)
    for (int n = 0; n <= lim; ++n) out.push_back(kPi * kPi * (m * m / (a * a) + n * n / (b * b)));
  std::sort(out.begin(), out.end());
  out.resize(static_cast<std::size_t>(k));
  return out;
}

int match_domain(const Partition& coarse, const std::vector<DomainGeometry>& coarse_geo, const Partition& fine,
                 const std::vector<DomainGeometry>& fine_geo, int domain) {
  const NeumannDomain& cd = coarse.domains.at(domain);
  const DomainSpec& d = coarse.grid.domain;
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& fd : fine.domains) {
    if (fd.p != cd.p || fd.q != cd.q || fd.kind != cd.kind) continue;
    const double dist = d.distance(fine_geo[fd.id].centroid, coarse_geo[domain].centroid);
    if (dist < best_d) best_d = dist, best = fd.id;
  }
  return best;
}

namespace {

Spectrum covering_spectrum(const SparseMatrix& a, double lambda, double area, double perimeter, double margin,
                           const EigenOptions& opts) {
  int k = eigen_count_for(lambda, area, perimeter);
  while (true) {
    Spectrum s = lowest_eigenvalues(a, k, opts);
    if (s.eigenvalues.back() > lambda + margin || k >= a.rows()) return s;
    k = std::min(static_cast<int>(a.rows()), 2 * k);
  }
}

}  // namespace

DomainSpectrum domain_spectrum(const Partition& coarse, const std::vector<DomainGeometry>& coarse_geo,
                               const Partition& fine, const std::vector<DomainGeometry>& fine_geo, int domain,
                               const EigenOptions& opts) {
  return domain_spectrum(coarse, coarse_geo, domain, [&] { return LabeledLevel{&fine, &fine_geo}; }, opts);
}

DomainSpectrum domain_spectrum(const Partition& coarse, const std::vector<DomainGeometry>& coarse_geo, int domain,
                               const FineLevel& fine_level, const EigenOptions& opts) {
  DomainSpectrum ds;
  ds.domain = domain;
  const NeumannDomain& cd = coarse.domains.at(domain);
  ds.kind = cd.kind;
  const double lambda = coarse.field->lambda();
  const double margin = 0.1 * lambda;

  const std::vector<Point> poly = domain_polygon(coarse, cd, coarse_geo[domain].centroid);
  Eigen::VectorXd v;
  if (!poly.empty()) {
    ds.cut_cell = true;
    const CutCellOperator oc = build_cut_cell_operator(poly, coarse.grid.hx(), coarse.grid.hy());
    const CutCellOperator of = build_cut_cell_operator(poly, 0.5 * coarse.grid.hx(), 0.5 * coarse.grid.hy());
    ds.area = of.area;
    ds.eigs = covering_spectrum(symmetric_form(oc), lambda, oc.area, oc.perimeter, margin, opts).eigenvalues;
    ds.eigs_fine = covering_spectrum(symmetric_form(of), lambda, of.area, of.perimeter, margin, opts).eigenvalues;
    v.resize(static_cast<Eigen::Index>(of.centroids.size()));
    for (std::size_t k = 0; k < of.centroids.size(); ++k) v(k) = coarse.field->value_unchecked(of.centroids[k]);
    ds.rayleigh = v.dot(of.stiffness * v) / v.dot(of.mass.asDiagonal() * v);
  } else {
    const LabeledLevel lv = fine_level();
    const Partition& fine = *lv.partition;
    ds.fine_domain = match_domain(coarse, coarse_geo, fine, *lv.geometry, domain);
    if (ds.fine_domain < 0) {
      ds.failure = "no domain with the same extrema at the finer resolution";
      return ds;
    }
    const NeumannDomain& fd = fine.domains[ds.fine_domain];
    const auto& ccells = cd.footprint.empty() ? cd.cells : cd.footprint;
    const auto& fcells = fd.footprint.empty() ? fd.cells : fd.footprint;
    const SparseMatrix ac = build_operator(coarse.grid, ccells);
    const SparseMatrix af = build_operator(fine.grid, fcells);
    ds.area = static_cast<double>(fcells.size()) * fine.grid.cell_area();
    const double perim = boundary_cells(coarse.grid, ccells).size() * std::max(coarse.grid.hx(), coarse.grid.hy());
    ds.eigs = covering_spectrum(ac, lambda, ds.area, perim, margin, opts).eigenvalues;
    ds.eigs_fine = covering_spectrum(af, lambda, ds.area, perim, margin, opts).eigenvalues;
    v.resize(static_cast<Eigen::Index>(fcells.size()));
    for (std::size_t k = 0; k < fcells.size(); ++k) v(k) = fine.field->value_unchecked(fine.grid.center(fcells[k]));
    ds.rayleigh = rayleigh_quotient(af, v);
  }

  std::size_t j = 0;
  for (std::size_t i = 1; i < ds.eigs_fine.size(); ++i)
    if (std::abs(ds.eigs_fine[i] - lambda) < std::abs(ds.eigs_fine[j] - lambda)) j = i;
  ds.error_estimate = j < ds.eigs.size() ? std::abs(ds.eigs[j] - ds.eigs_fine[j]) : 0.0;
  ds.matching_tol = std::max(3.0 * ds.error_estimate, 0.02 * lambda);
  try {
    ds.position = spectral_position(lambda, ds.eigs_fine, ds.matching_tol);
    ds.position_coarse = spectral_position(lambda, ds.eigs, ds.matching_tol);
    ds.stable = ds.position.pos == ds.position_coarse.pos;
    ds.kroger_ok = lambda <= 8 * kPi * ds.position.pos / ds.area;
  } catch (const Error& e) {
    ds.failure = e.what();
  }
  return ds;
}

Position nodal_dirichlet_position(const Partition& part, int nodal_domain, const EigenOptions& opts) {
  const auto& cells = part.nodal.domains.at(nodal_domain).cells;
  const SparseMatrix a = build_operator(part.grid, cells, BoundaryCondition::Dirichlet);
  const Spectrum s = lowest_eigenvalues(a, std::min<int>(3, static_cast<int>(cells.size())), opts);
  Position p = spectral_position(part.field->lambda(), s.eigenvalues, 0.05 * part.field->lambda());
  p.pos += 1;  // Dirichlet spectra are counted from 1
  return p;
}

nlohmann::json to_json(const DomainSpectrum& s) {
  nlohmann::json j = {{"domain", s.domain},
                      {"kind", to_string(s.kind)},
                      {"fine_domain", s.fine_domain},
                      {"area", s.area},
                      {"eigs", s.eigs},
                      {"eigs_fine", s.eigs_fine},
                      {"error_est", s.error_estimate},
                      {"matching_tol", s.matching_tol},
                      {"rayleigh_quotient", s.rayleigh},
                      {"discretisation", s.cut_cell ? "cut-cell" : "footprint"}};
  if (s.failure.empty()) {
    j["pos"] = s.position.pos;
    j["pos_coarse"] = s.position_coarse.pos;
    j["multiplicity"] = s.position.multiplicity;
    j["stable"] = s.stable;
    j["kroger_ok"] = s.kroger_ok;
  } else {
    j["pos"] = nullptr;
    j["failure"] = s.failure;
  }
  return j;
}

}  // namespace neumann
