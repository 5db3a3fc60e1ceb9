#include "neumann/flow.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <sstream>

namespace neumann {

namespace odeint = boost::numeric::odeint;

const char* to_string(Direction d) { return d == Direction::Descending ? "descending" : "ascending"; }

namespace {

using State = std::array<double, 2>;

const char* terminus_name(TerminusKind k) {
  switch (k) {
    case TerminusKind::Extremum: return "extremum";
    case TerminusKind::Saddle: return "saddle";
    case TerminusKind::Boundary: return "boundary";
  }
  return "?";
}

Vec2 sign_fixed(Vec2 v) {
  if (v.x() < 0 || (v.x() == 0 && v.y() < 0)) v = -v;
  return v;
}

}  // namespace

FlowTracer::FlowTracer(FieldPtr f, const CriticalSet& cs, FlowOptions opts)
    : field_(std::move(f)),
      search_(field_->periodic_extension()),
      cs_(&cs),
      opts_(opts),
      locator_(cs, std::max(opts.capture_radius * field_->domain().min_extent(),
                            field_->domain().min_extent() / (16.0 * std::max(1, field_->max_frequency())))) {
  const DomainSpec& d = field_->domain();
  const double L = d.min_extent();
  eps_ = opts_.launch_offset * L;
  capture_ = opts_.capture_radius * L;
  max_step_ = opts_.max_step * L;
  abs_tol_ = opts_.ode_tol * L;

  basins_.assign(cs.size(), Basin{-1, 0.0, 0.0});
  if (!opts_.use_basin_balls) return;
  for (int e : cs.extrema()) {
    const CriticalPoint& cp = cs[e];
    double nearest = 0.25 * L;
    for (const auto& other : cs.points)
      if (other.id != e) nearest = std::min(nearest, d.distance(cp.location, other.location));
    double r = 0.45 * nearest;
    if (!d.periodic()) {
      const Point& c = cp.location;
      r = std::min({r, 0.9 * c.x(), 0.9 * (d.lx - c.x()), 0.9 * c.y(), 0.9 * (d.ly - c.y())});
    }
    if (r <= capture_) continue;
    // Sup (max) or inf (min) of f on the circle. A point of the ball beyond that level lies in
    // a level-set component inside the ball whose only critical point is the extremum itself.
    const bool is_max = cp.kind == CriticalKind::Maximum;
    double rim = is_max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    const int n = 1024;
    for (int k = 0; k < n; ++k) {
      const double t = 2 * kPi * k / n;
      const double v = search_->value_unchecked(cp.location + r * Vec2(std::cos(t), std::sin(t)));
      rim = is_max ? std::max(rim, v) : std::min(rim, v);
    }
    const double gap = is_max ? cp.value - rim : rim - cp.value;
    if (gap <= 0) continue;
    const double thr = is_max ? rim + 0.05 * gap : rim - 0.05 * gap;
    basins_[e] = Basin{e, r, thr};
    basin_reach_ = std::max(basin_reach_, r);
  }
}

std::optional<int> FlowTracer::basin_hit(const Point& p, double value, Direction dir) const {
  if (basin_reach_ <= 0) return std::nullopt;
  const int id = locator_.nearest_within(p, basin_reach_);
  if (id < 0) return std::nullopt;
  const Basin& b = basins_[id];
  if (b.id < 0) return std::nullopt;
  const CriticalPoint& cp = (*cs_)[id];
  if (cs_->domain.distance(cp.location, p) > b.radius) return std::nullopt;
  if (dir == Direction::Ascending && cp.kind == CriticalKind::Maximum && value > b.threshold) return id;
  if (dir == Direction::Descending && cp.kind == CriticalKind::Minimum && value < b.threshold) return id;
  return std::nullopt;
}

FlowPath FlowTracer::integrate(const Point& start, Direction dir, int origin_id, bool record) const {
  const DomainSpec& d = field_->domain();
  const ScalarField& g = *search_;
  const double sign = dir == Direction::Descending ? -1.0 : 1.0;

  FlowPath path;
  path.direction = dir;
  path.origin_id = origin_id;
  double value = g.value_unchecked(start);
  if (record) {
    path.points.push_back(start);
    path.values.push_back(value);
  }

  auto finish_at = [&](int id, const Point& near) {
    const CriticalPoint& cp = (*cs_)[id];
    path.terminus.critical_id = id;
    path.terminus.location = cp.location;
    if (cp.kind == CriticalKind::Saddle) {
      path.terminus.kind = TerminusKind::Saddle;
      path.saddle_connection = origin_id >= 0;
    } else {
      path.terminus.kind = TerminusKind::Extremum;
    }
    const Point lifted = d.nearest_image(cp.location, near);
    path.arclength += (lifted - near).norm();
    if (record) {
      path.points.push_back(lifted);
      path.values.push_back(cp.value);
    }
  };

  // A descending flow cannot converge to a maximum, nor an ascending one to a minimum.
  auto capturing = [&](const Point& p) {
    const int id = captured_at(p);
    if (id < 0) return -1;
    const CriticalKind k = (*cs_)[id].kind;
    if (k == CriticalKind::Maximum && dir == Direction::Descending) return -1;
    if (k == CriticalKind::Minimum && dir == Direction::Ascending) return -1;
    return id;
  };

  if (origin_id < 0) {
    const int id = capturing(start);
    if (id >= 0) {
      finish_at(id, start);
      return path;
    }
  }

  auto system = [&](const State& x, State& dxdt, double) {
    const Vec2 grad = g.gradient_unchecked(Point(x[0], x[1]));
    const double n = grad.norm();
    if (n > 0) {
      dxdt[0] = sign * grad.x() / n;
      dxdt[1] = sign * grad.y() / n;
    } else {
      dxdt[0] = dxdt[1] = 0.0;
    }
  };

  auto stepper = odeint::make_controlled(abs_tol_, 0.0, max_step_, odeint::runge_kutta_dopri5<State>());
  State x{start.x(), start.y()};
  double t = 0.0;
  double dt = max_step_;
  bool left_origin = origin_id < 0;
  const double min_dt = 1e-12 * d.min_extent();

  for (int step = 1;; ++step) {
    if (step > opts_.max_steps) {
      std::ostringstream os;
      os << "flow from (" << start.x() << ", " << start.y() << ") not captured after " << opts_.max_steps
         << " steps";
      throw Error(ErrorCode::StepBudgetExceeded, os.str());
    }
    const Point prev(x[0], x[1]);
    while (stepper.try_step(system, x, t, dt) == odeint::fail) {
      if (dt < min_dt) {
        std::ostringstream os;
        os << "flow stalled at (" << x[0] << ", " << x[1] << ") away from every known critical point";
        throw Error(ErrorCode::StagnationWithoutCapture, os.str());
      }
    }
    Point p(x[0], x[1]);

    if (!d.periodic() && !d.contains(p)) {
      // Interpolate the wall crossing along the last step.
      double s = 1.0;
      const Vec2 dp = p - prev;
      auto clip = [&](double from, double delta, double lo, double hi) {
        if (delta < 0 && from + delta < lo) s = std::min(s, (lo - from) / delta);
        if (delta > 0 && from + delta > hi) s = std::min(s, (hi - from) / delta);
      };
      clip(prev.x(), dp.x(), 0.0, d.lx);
      clip(prev.y(), dp.y(), 0.0, d.ly);
      Point c = prev + std::clamp(s, 0.0, 1.0) * dp;
      c.x() = std::clamp(c.x(), 0.0, d.lx);
      c.y() = std::clamp(c.y(), 0.0, d.ly);
      path.arclength += (c - prev).norm();
      path.terminus.kind = TerminusKind::Boundary;
      path.terminus.location = c;
      if (record) {
        path.points.push_back(c);
        path.values.push_back(g.value_unchecked(c));
      }
      return path;
    }

    path.arclength += (p - prev).norm();
    if (record || opts_.use_basin_balls) value = g.value_unchecked(p);
    if (record) {
      path.points.push_back(p);
      path.values.push_back(value);
    }

    if (!left_origin && step >= opts_.capture_delay &&
        d.distance(p, (*cs_)[origin_id].location) > capture_)
      left_origin = true;
    const int id = capturing(p);
    if (id >= 0 && (id != origin_id || left_origin)) {
      finish_at(id, p);
      return path;
    }
    if (opts_.use_basin_balls) {
      if (auto hit = basin_hit(p, value, dir)) {
        path.terminus.kind = TerminusKind::Extremum;
        path.terminus.critical_id = *hit;
        path.terminus.location = (*cs_)[*hit].location;
        return path;
      }
    }
  }
}

std::vector<FlowPath> trace_saddle_separatrices(const FlowTracer& tracer, const CriticalPoint& saddle) {
  if (saddle.kind != CriticalKind::Saddle) throw std::invalid_argument("separatrices need a saddle");
  const DomainSpec& d = tracer.field().domain();
  const double eps = tracer.launch_offset();
  const Vec2 vneg = sign_fixed(saddle.hessian_eigvecs[0]);
  const Vec2 vpos = sign_fixed(saddle.hessian_eigvecs[1]);
  const std::array<std::pair<Direction, Vec2>, 4> launches{{{Direction::Descending, vneg},
                                                           {Direction::Descending, -vneg},
                                                           {Direction::Ascending, vpos},
                                                           {Direction::Ascending, -vpos}}};
  std::vector<FlowPath> out;
  for (const auto& [dir, v] : launches) {
    const Point start = saddle.location + eps * v;
    if (!d.periodic()) {
      const double m = 0.5 * eps;
      if (start.x() < m || start.x() > d.lx - m || start.y() < m || start.y() > d.ly - m) continue;
    }
    FlowPath p = tracer.integrate(start, dir, saddle.id, true);
    p.points.insert(p.points.begin(), saddle.location);
    p.values.insert(p.values.begin(), saddle.value);
    p.arclength += eps;
    out.push_back(std::move(p));
  }
  return out;
}

NeumannLineSet build_neumann_line_set(const FlowTracer& tracer) {
  const CriticalSet& cs = tracer.critical_set();
  if (cs.saddles.empty()) throw Error(ErrorCode::NoSaddles, "field has no saddle points; the Neumann line set is empty");
  std::vector<std::vector<FlowPath>> per(cs.saddles.size());
  parallel_for(per.size(), [&](std::size_t k) { per[k] = trace_saddle_separatrices(tracer, cs[cs.saddles[k]]); });

  NeumannLineSet nls;
  for (std::size_t k = 0; k < per.size(); ++k) {
    auto& idx = nls.by_saddle[cs.saddles[k]];
    for (auto& p : per[k]) {
      if (p.saddle_connection) nls.morse_smale = false;
      if (p.terminus.kind == TerminusKind::Boundary) nls.boundary_crossings.push_back(p.terminus.location);
      idx.push_back(static_cast<int>(nls.paths.size()));
      nls.paths.push_back(std::move(p));
    }
  }
  nls.extrema = cs.extrema();
  if (nls.morse_smale) nls.morse_smale = morse_smale_check(cs, nls, tracer.capture_radius());
  std::size_t total = nls.paths.size();
  log_info("separatrices: ", total, " paths from ", cs.saddles.size(), " saddles",
           nls.morse_smale ? "" : " (saddle connection found)");
  return nls;
}

double right_angle_defect(const FlowTracer& tracer, const NeumannLineSet& nls, int saddle_id) {
  (void)tracer;
  auto it = nls.by_saddle.find(saddle_id);
  if (it == nls.by_saddle.end() || it->second.size() < 2) return 0.0;
  std::vector<double> angles;
  for (int pi : it->second) {
    const auto& pts = nls.paths[pi].points;
    const Vec2 v = pts[1] - pts[0];
    angles.push_back(std::atan2(v.y(), v.x()));
  }
  std::sort(angles.begin(), angles.end());
  double worst = 0.0;
  const std::size_t n = angles.size();
  const std::size_t gaps = n == 4 ? 4 : n - 1;
  for (std::size_t i = 0; i < gaps; ++i) {
    double gap = angles[(i + 1) % n] - angles[i];
    if (gap < 0) gap += 2 * kPi;
    worst = std::max(worst, std::abs(gap - kPi / 2));
  }
  return worst;
}

InterlacingResult interlacing(const FlowTracer& tracer, const NeumannLineSet& nls, int saddle_id) {
  InterlacingResult res;
  const ScalarField& f = tracer.field();
  const CriticalPoint& r = tracer.critical_set()[saddle_id];
  if (std::abs(r.value) >= 1e-9 * f.scale() || r.on_boundary) return res;
  res.applicable = true;
  const auto g = f.periodic_extension();
  const double rho = tracer.capture_radius();

  // Label 0 for zero-level rays, 1 for separatrix rays.
  std::vector<std::pair<double, int>> rays;
  const int n = 4096;
  auto at = [&](int k) {
    const double t = 2 * kPi * k / n;
    return g->value_unchecked(r.location + rho * Vec2(std::cos(t), std::sin(t)));
  };
  double prev = at(0);
  for (int k = 1; k <= n; ++k) {
    const double cur = at(k % n);
    if ((prev > 0) != (cur > 0)) {
      rays.emplace_back(2 * kPi * (k - 0.5) / n, 0);
      ++res.zero_rays;
    }
    prev = cur;
  }
  auto it = nls.by_saddle.find(saddle_id);
  if (it != nls.by_saddle.end()) {
    for (int pi : it->second) {
      const auto& pts = nls.paths[pi].points;
      for (std::size_t k = 1; k < pts.size(); ++k) {
        const double a = (pts[k - 1] - r.location).norm(), b = (pts[k] - r.location).norm();
        if (a <= rho && b > rho) {
          const double s = (rho - a) / (b - a);
          const Vec2 c = pts[k - 1] + s * (pts[k] - pts[k - 1]) - r.location;
          double th = std::atan2(c.y(), c.x());
          if (th < 0) th += 2 * kPi;
          rays.emplace_back(th, 1);
          ++res.separatrix_rays;
          break;
        }
      }
    }
  }
  if (res.zero_rays != 4 || res.separatrix_rays != 4) return res;
  std::sort(rays.begin(), rays.end());
  res.interlaced = true;
  for (std::size_t k = 0; k < rays.size(); ++k)
    if (rays[k].second == rays[(k + 1) % rays.size()].second) res.interlaced = false;
  return res;
}

double monotonicity_violation(const FlowPath& path, double scale) {
  const double sign = path.direction == Direction::Descending ? 1.0 : -1.0;
  double worst = 0.0;
  for (std::size_t k = 1; k < path.values.size(); ++k)
    worst = std::max(worst, sign * (path.values[k] - path.values[k - 1]));
  return worst / scale;
}

nlohmann::json to_json(const FlowPath& path, const DomainSpec& d) {
  (void)d;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : path.points) pts.push_back({p.x(), p.y()});
  nlohmann::json term = {{"kind", terminus_name(path.terminus.kind)},
                         {"x", path.terminus.location.x()},
                         {"y", path.terminus.location.y()}};
  if (path.terminus.critical_id >= 0) term["id"] = path.terminus.critical_id;
  nlohmann::json j = {{"direction", to_string(path.direction)},
                      {"terminus", term},
                      {"arclength", path.arclength},
                      {"saddle_connection", path.saddle_connection},
                      {"points", pts}};
  j["origin"] = path.origin_id >= 0 ? nlohmann::json(path.origin_id) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const NeumannLineSet& nls, const DomainSpec& d) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : nls.paths) arr.push_back(to_json(p, d));
  return {{"morse_smale", nls.morse_smale}, {"paths", arr}};
}

}  // namespace neumann
