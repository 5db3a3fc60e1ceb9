#include "neumann/morse.hpp"

#include "neumann/flow.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace neumann {

const char* to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::Minimum: return "min";
    case CriticalKind::Saddle: return "saddle";
    case CriticalKind::Maximum: return "max";
  }
  return "?";
}

std::vector<int> CriticalSet::extrema() const {
  std::vector<int> out(minima);
  out.insert(out.end(), maxima.begin(), maxima.end());
  return out;
}

void CriticalSet::reindex() {
  minima.clear();
  maxima.clear();
  saddles.clear();
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i].id = static_cast<int>(i);
    switch (points[i].kind) {
      case CriticalKind::Minimum: minima.push_back(static_cast<int>(i)); break;
      case CriticalKind::Maximum: maxima.push_back(static_cast<int>(i)); break;
      case CriticalKind::Saddle: saddles.push_back(static_cast<int>(i)); break;
    }
  }
}

CriticalPoint classify(const ScalarField& f, const Point& p, double degeneracy_tol) {
  const Jet j = f.jet_unchecked(p);
  const double ref = f.scale() * f.lambda();
  const double det = j.hessian.determinant();
  if (std::abs(det) < degeneracy_tol * ref * ref) {
    std::ostringstream os;
    os << "Hessian at (" << p.x() << ", " << p.y() << ") has |det| = " << std::abs(det) << " < "
       << degeneracy_tol << " * (scale*lambda)^2; the field is not Morse";
    throw Error(ErrorCode::DegenerateCriticalPoint, os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat2> es(j.hessian);
  CriticalPoint cp;
  cp.location = p;
  cp.value = j.value;
  cp.hessian_eigvals = {es.eigenvalues()(0), es.eigenvalues()(1)};
  cp.hessian_eigvecs = {es.eigenvectors().col(0).normalized(), es.eigenvectors().col(1).normalized()};
  cp.index = (cp.hessian_eigvals[0] < 0 ? 1 : 0) + (cp.hessian_eigvals[1] < 0 ? 1 : 0);
  cp.kind = cp.index == 0 ? CriticalKind::Minimum : cp.index == 1 ? CriticalKind::Saddle : CriticalKind::Maximum;
  return cp;
}

namespace {

struct NewtonResult {
  Point location;
  bool converged = false;
};

NewtonResult newton(const ScalarField& search, const DomainSpec& target, Point x, double max_step,
                    const MorseOptions& opts) {
  const DomainSpec& sd = search.domain();
  const double eig_floor = 1e-12 * search.scale() * search.lambda();
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const Jet j = search.jet_unchecked(x);
    if (j.gradient.norm() < opts.newton_tol) return {x, true};
    if (it == opts.max_iterations) break;
    Eigen::SelfAdjointEigenSolver<Mat2> es(j.hessian);
    Vec2 step = Vec2::Zero();
    for (int k = 0; k < 2; ++k) {
      const double ev = es.eigenvalues()(k);
      if (std::abs(ev) > eig_floor) {
        const Vec2 v = es.eigenvectors().col(k);
        step -= (v.dot(j.gradient) / ev) * v;
      }
    }
    const double n = step.norm();
    if (!std::isfinite(n) || n == 0.0) break;
    if (n > max_step) step *= max_step / n;
    x = target.periodic() ? sd.canonical(x + step) : Point(x + step);
    if (!target.periodic()) {
      const double m = 2 * max_step;
      if (x.x() < -m || x.x() > target.lx + m || x.y() < -m || x.y() > target.ly + m) break;
    }
  }
  return {x, false};
}

}  // namespace

CriticalSet find_critical_points(const ScalarField& f, const MorseOptions& opts) {
  const DomainSpec& d = f.domain();
  const auto search_ptr = f.periodic_extension();
  const ScalarField& search = *search_ptr;
  const int s = opts.seeds_per_axis > 0 ? opts.seeds_per_axis : 8 * f.max_frequency();
  const double max_step = 1.5 * d.min_extent() / s;
  const double dedupe = d.min_extent() / (8.0 * s);
  const double snap = 1e-7 * d.min_extent();

  std::vector<Point> seeds;
  if (d.periodic()) {
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) seeds.emplace_back((i + 0.5) * d.lx / s, (j + 0.5) * d.ly / s);
  } else {
    for (int i = 0; i <= s; ++i)
      for (int j = 0; j <= s; ++j) seeds.emplace_back(i * d.lx / s, j * d.ly / s);
  }

  // Local minima of |grad f| on a 4x denser scan are added as seeds.
  const int dense = 4 * s;
  const double dhx = d.lx / dense, dhy = d.ly / dense;
  std::vector<double> gnorm(static_cast<std::size_t>(dense) * dense);
  parallel_for(gnorm.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k) / dense, j = static_cast<int>(k) % dense;
    gnorm[k] = search.gradient_unchecked(Point((i + 0.5) * dhx, (j + 0.5) * dhy)).norm();
  });
  auto gat = [&](int i, int j) -> double {
    if (d.periodic()) {
      i = (i + dense) % dense;
      j = (j + dense) % dense;
    } else if (i < 0 || j < 0 || i >= dense || j >= dense) {
      return std::numeric_limits<double>::infinity();
    }
    return gnorm[static_cast<std::size_t>(i) * dense + j];
  };
  for (int i = 0; i < dense; ++i) {
    for (int j = 0; j < dense; ++j) {
      const double g = gat(i, j);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          if ((di || dj) && gat(i + di, j + dj) < g) {
            is_min = false;
            break;
          }
      if (is_min) seeds.emplace_back((i + 0.5) * dhx, (j + 0.5) * dhy);
    }
  }

  std::vector<NewtonResult> results(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) { results[k] = newton(search, d, seeds[k], max_step, opts); });

  CriticalSet cs;
  cs.domain = d;
  auto accept = [&](Point x) -> bool {
    if (!d.periodic()) {
      if (x.x() < -snap || x.x() > d.lx + snap || x.y() < -snap || x.y() > d.ly + snap) return false;
      x.x() = std::clamp(x.x(), 0.0, d.lx);
      x.y() = std::clamp(x.y(), 0.0, d.ly);
    }
    x = d.canonical(x);
    for (const auto& cp : cs.points)
      if (d.distance(cp.location, x) < dedupe) return false;
    bool bx = false, by = false;
    if (!d.periodic()) {
      if (std::abs(x.x()) < snap) x.x() = 0.0, bx = true;
      if (std::abs(x.x() - d.lx) < snap) x.x() = d.lx, bx = true;
      if (std::abs(x.y()) < snap) x.y() = 0.0, by = true;
      if (std::abs(x.y() - d.ly) < snap) x.y() = d.ly, by = true;
    }
    CriticalPoint cp = classify(search, x, opts.degeneracy_tol);
    cp.on_boundary = bx || by;
    cp.on_corner = bx && by;
    cs.points.push_back(cp);
    return true;
  };
  for (const auto& r : results)
    if (r.converged) accept(r.location);

  // Completeness scan: any small-gradient cell must have a critical point within two cells.
  const double thr = 0.1 * std::sqrt(f.lambda()) * std::min(dhx, dhy) * f.scale();
  for (int i = 0; i < dense; ++i) {
    for (int j = 0; j < dense; ++j) {
      if (gat(i, j) >= thr) continue;
      const Point c((i + 0.5) * dhx, (j + 0.5) * dhy);
      bool explained = false;
      for (const auto& cp : cs.points)
        if (d.distance(cp.location, c) <= 2.0 * std::hypot(dhx, dhy)) explained = true;
      if (explained) continue;
      // Newton from the cell itself must land on a critical point, known or new.
      auto r = newton(search, d, c, max_step, opts);
      if (!r.converged) {
        std::ostringstream os;
        os << "near-zero gradient at (" << c.x() << ", " << c.y() << ") not explained by any critical point";
        throw Error(ErrorCode::NewtonDivergence, os.str());
      }
      accept(r.location);
    }
  }

  // Deterministic order: minima, maxima, saddles; each by (x, y).
  std::sort(cs.points.begin(), cs.points.end(), [&](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    const double q = 1e-9 * d.min_extent();
    const double ax = std::round(a.location.x() / q), bx = std::round(b.location.x() / q);
    if (ax != bx) return ax < bx;
    return std::round(a.location.y() / q) < std::round(b.location.y() / q);
  });
  // The sort key puts Minimum(0), Saddle(1), Maximum(2); reorder to min, max, saddle.
  std::stable_partition(cs.points.begin(), cs.points.end(),
                        [](const CriticalPoint& c) { return c.kind != CriticalKind::Saddle; });
  cs.reindex();
  cs.is_morse = true;

  if (d.periodic()) {
    const long chi = static_cast<long>(cs.minima.size()) - static_cast<long>(cs.saddles.size()) +
                     static_cast<long>(cs.maxima.size());
    if (chi != 0) {
      std::ostringstream os;
      os << "#min - #saddle + #max = " << chi << " on the torus (expected 0); critical points were missed";
      throw Error(ErrorCode::NewtonDivergence, os.str());
    }
  }
  log_info("critical points: ", cs.minima.size(), " minima, ", cs.maxima.size(), " maxima, ", cs.saddles.size(),
           " saddles");
  return cs;
}

// ---------------------------------------------------------------- locator

CriticalPointLocator::CriticalPointLocator(const CriticalSet& cs, double bucket_size)
    : cs_(&cs), domain_(cs.domain), bucket_(bucket_size) {
  const double margin = domain_.periodic() ? 0.0 : bucket_;
  ox_ = -margin;
  oy_ = -margin;
  bx_ = std::max(1, static_cast<int>(std::ceil((domain_.lx + 2 * margin) / bucket_)));
  by_ = std::max(1, static_cast<int>(std::ceil((domain_.ly + 2 * margin) / bucket_)));
  if (domain_.periodic()) {
    bucket_ = std::max(domain_.lx / bx_, domain_.ly / by_);
  }
  buckets_.resize(static_cast<std::size_t>(bx_) * by_);
  for (const auto& cp : cs.points) {
    const Point p = domain_.canonical(cp.location);
    int i = std::clamp(static_cast<int>(std::floor((p.x() - ox_) / bucket_)), 0, bx_ - 1);
    int j = std::clamp(static_cast<int>(std::floor((p.y() - oy_) / bucket_)), 0, by_ - 1);
    buckets_[static_cast<std::size_t>(i) * by_ + j].push_back(cp.id);
  }
}

int CriticalPointLocator::nearest_within(const Point& q, double radius) const {
  const Point p = domain_.canonical(q);
  const int r = static_cast<int>(std::ceil(radius / bucket_));
  const int ci = static_cast<int>(std::floor((p.x() - ox_) / bucket_));
  const int cj = static_cast<int>(std::floor((p.y() - oy_) / bucket_));
  int best = -1;
  double best_d = radius;
  const int span_i = std::min(2 * r + 1, bx_), span_j = std::min(2 * r + 1, by_);
  for (int a = 0; a < span_i; ++a) {
    int i = ci - r + a;
    if (domain_.periodic()) {
      i = ((i % bx_) + bx_) % bx_;
    } else if (i < 0 || i >= bx_) {
      continue;
    }
    for (int b = 0; b < span_j; ++b) {
      int j = cj - r + b;
      if (domain_.periodic()) {
        j = ((j % by_) + by_) % by_;
      } else if (j < 0 || j >= by_) {
        continue;
      }
      for (int id : buckets_[static_cast<std::size_t>(i) * by_ + j]) {
        const double dd = domain_.distance((*cs_)[id].location, p);
        if (dd <= best_d) {
          best_d = dd;
          best = id;
        }
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------- Morse-Smale

bool morse_smale_check(const CriticalSet& cs, const NeumannLineSet& nls, double tol) {
  for (const auto& path : nls.paths) {
    if (path.terminus.kind == TerminusKind::Saddle && path.terminus.critical_id != path.origin_id) return false;
    const Point end = path.points.back();
    for (int s : cs.saddles) {
      if (s == path.origin_id) continue;
      if (cs.domain.distance(cs[s].location, end) <= tol) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- JSON

nlohmann::json to_json(const CriticalPoint& cp) {
  return {{"id", cp.id},
          {"x", cp.location.x()},
          {"y", cp.location.y()},
          {"value", cp.value},
          {"kind", to_string(cp.kind)},
          {"index", cp.index},
          {"on_boundary", cp.on_boundary}};
}

nlohmann::json to_json(const CriticalSet& cs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& cp : cs.points) arr.push_back(to_json(cp));
  return arr;
}

}  // namespace neumann
