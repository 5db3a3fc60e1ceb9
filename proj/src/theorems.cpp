#include "neumann/theorems.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace neumann {

const std::vector<std::string>& claim_catalogue() {
  static const std::vector<std::string> claims{"thm1.i",   "thm1.ii",   "thm1.iii",       "thm1.iv",
                                               "thm1.v",   "thm1.vi",   "thm1.vii",       "thm2.ii'",
                                               "thm2.iii'", "thm2.iv'", "count.munu",     "count.degrees",
                                               "count.twosaddle"};
  return claims;
}

namespace {

CheckResult make(const std::string& claim, int domain, bool passed, nlohmann::json details = nlohmann::json::object()) {
  CheckResult r;
  r.claim = claim;
  r.domain = domain;
  r.passed = passed;
  r.details = std::move(details);
  return r;
}

CheckResult inapplicable(const std::string& claim, int domain, const std::string& why) {
  CheckResult r;
  r.claim = claim;
  r.domain = domain;
  r.applicable = false;
  r.passed = false;
  r.details = {{"reason", why}};
  return r;
}

// Euler number and single boundary loop of a mask.
std::pair<bool, nlohmann::json> simply_connected(const Partition& part, const NeumannDomain& dom) {
  const long chi = euler_characteristic(part.grid, dom.cells);
  const bool ok = chi == 1 && dom.boundary_loop_count == 1;
  return {ok, {{"euler", chi}, {"boundary_loops", dom.boundary_loop_count}}};
}

std::vector<int> sample_cells(const std::vector<int>& cells, int count) {
  std::vector<int> out;
  const int n = static_cast<int>(cells.size());
  for (int k = 0; k < std::min(count, n); ++k) out.push_back(cells[static_cast<std::size_t>(k) * n / std::min(count, n)]);
  return out;
}

}  // namespace

std::vector<CheckResult> verify_theorem1(const Partition& part) {
  const CriticalSet& cs = *part.cs;
  const NeumannLineSet& nls = *part.nls;
  const DomainSpec& d = part.grid.domain;
  const ScalarField& f = *part.field;
  std::vector<CheckResult> out;

  // (i) every critical point lies on the Neumann line set.
  {
    const double cap = part.options.flow.capture_radius * d.min_extent();
    double worst = 0.0;
    int worst_id = -1;
    for (const auto& cp : cs.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& path : nls.paths) {
        best = std::min(best, d.distance(path.points.front(), cp.location));
        best = std::min(best, d.distance(d.canonical(path.points.back()), cp.location));
      }
      if (best > worst) worst = best, worst_id = cp.id;
    }
    out.push_back(make("thm1.i", -1, worst <= cap,
                       {{"max_distance", worst}, {"capture_radius", cap}, {"worst_point", worst_id}}));
  }

  FlowOptions fo = part.options.flow;
  const FlowTracer tracer(part.field, cs, fo);
  const double grad_floor = 1e-6 * f.scale() * std::sqrt(f.lambda());
  std::vector<std::vector<CheckResult>> per(part.domains.size());
  parallel_for(part.domains.size(), [&](std::size_t k) {
    const NeumannDomain& dom = part.domains[k];
    auto& res = per[k];
    const int id = dom.id;
    if (dom.kind != NeumannDomainKind::Inner) return;

    // (ii) the only extrema at the domain are p and q.
    {
      std::vector<int> extra;
      for (int e : dom.nearby_extrema)
        if (e != dom.p && e != dom.q) extra.push_back(e);
      int confirmed = 0, sampled = 0;
      for (int c : sample_cells(dom.cells, 8)) {
        ++sampled;
        try {
          const Point x = part.grid.center(c);
          const FlowPath down = tracer.integrate(x, Direction::Descending, -1, false);
          const FlowPath up = tracer.integrate(x, Direction::Ascending, -1, false);
          if (down.terminus.critical_id == dom.p && up.terminus.critical_id == dom.q) ++confirmed;
        } catch (const Error&) {
        }
      }
      res.push_back(make("thm1.ii", id, extra.empty() && confirmed == sampled,
                         {{"p", dom.p}, {"q", dom.q}, {"other_extrema", extra}, {"flows_confirmed", confirmed},
                          {"flows_sampled", sampled}}));
    }
    // (iii) one or two saddles on the boundary.
    if (nls.morse_smale) {
      const int s = static_cast<int>(dom.saddles.size());
      res.push_back(make("thm1.iii", id, s == 1 || s == 2, {{"saddles", dom.saddles}, {"count", s}}));
    } else {
      res.push_back(inapplicable("thm1.iii", id, "field is not Morse-Smale"));
    }
    // (iv) simply connected.
    {
      auto [ok, det] = simply_connected(part, dom);
      res.push_back(make("thm1.iv", id, ok, det));
    }
    // (v) the nodal set meets the domain.
    {
      int pos = 0, neg = 0;
      for (int c : dom.cells) {
        if (part.nodal.sign[c] > 0) ++pos;
        if (part.nodal.sign[c] < 0) ++neg;
      }
      res.push_back(make("thm1.v", id, pos > 0 && neg > 0, {{"positive_cells", pos}, {"negative_cells", neg}}));
    }
    // (vi) no critical point inside, gradient bounded away from zero on mask and nodal arc.
    {
      std::set<int> mask(dom.cells.begin(), dom.cells.end());
      std::vector<int> inside;
      for (const auto& cp : cs.points)
        if (mask.count(part.grid.locate(cp.location))) inside.push_back(cp.id);
      double gmin = std::numeric_limits<double>::infinity();
      for (int c : dom.cells) gmin = std::min(gmin, f.gradient_unchecked(part.grid.center(c)).norm());
      double gnodal = std::numeric_limits<double>::infinity();
      for (const auto& p : dom.arc.endpoint_locations) gnodal = std::min(gnodal, f.gradient_unchecked(p).norm());
      const bool ok = inside.empty() && gmin > grad_floor && (dom.arc.endpoint_locations.empty() || gnodal > grad_floor);
      nlohmann::json det = {{"critical_points_inside", inside}, {"min_gradient", gmin}, {"floor", grad_floor}};
      if (std::isfinite(gnodal)) det["min_gradient_at_arc_ends"] = gnodal;
      res.push_back(make("thm1.vi", id, ok, det));
    }
    // (vii) the nodal set is one arc with ends on the two sides separated by p and q.
    {
      const NodalArc& a = dom.arc;
      res.push_back(make("thm1.vii", id, a.simple && a.components == 1 && a.endpoints == 2 && a.distinct_subarcs,
                         {{"segments", a.segments},
                          {"components", a.components},
                          {"endpoints", a.endpoints},
                          {"simple", a.simple},
                          {"ends_on_distinct_sides", a.distinct_subarcs},
                          {"saddle_stubs", a.stubs}}));
    }
  });
  for (auto& v : per)
    for (auto& r : v) out.push_back(std::move(r));
  return out;
}

std::vector<CheckResult> verify_theorem2(const Partition& part) {
  std::vector<CheckResult> out;
  if (part.grid.domain.periodic()) {
    for (const char* c : {"thm2.ii'", "thm2.iii'", "thm2.iv'"})
      out.push_back(inapplicable(c, -1, "no boundary domains on the torus"));
    return out;
  }
  for (const auto& dom : part.domains) {
    if (dom.kind == NeumannDomainKind::Inner) continue;
    const bool is_min = dom.kind == NeumannDomainKind::BoundaryMin;
    const int own = is_min ? dom.p : dom.q;
    std::vector<int> extra;
    for (int e : dom.nearby_extrema)
      if (e != own) extra.push_back(e);
    out.push_back(make("thm2.ii'", dom.id, extra.empty(), {{"extremum", own}, {"other_extrema", extra}}));
    auto [ok, det] = simply_connected(part, dom);
    out.push_back(make("thm2.iii'", dom.id, ok, det));
    int wrong = 0;
    for (int c : dom.cells)
      if (part.nodal.sign[c] != (is_min ? -1 : 1)) ++wrong;
    out.push_back(make("thm2.iv'", dom.id, wrong == 0 && dom.arc.segments == 0,
                       {{"expected_sign", is_min ? -1 : 1}, {"wrong_sign_cells", wrong},
                        {"interior_nodal_segments", dom.arc.segments}}));
  }
  return out;
}

std::vector<CheckResult> verify_counting(const Partition& part) {
  std::vector<CheckResult> out;
  const int mu = part.mu, nu = part.nu();
  out.push_back(make("count.munu", -1, mu >= 2 * nu, {{"mu", mu}, {"nu", nu}, {"equality", mu == 2 * nu}}));

  // Degrees from separatrix termini against the number of domains sharing each extremum.
  std::map<int, int> sharing;
  for (int e : part.cs->extrema()) sharing[e] = 0;
  int with_p = 0, with_q = 0;
  for (const auto& dom : part.domains) {
    if (dom.p >= 0) ++sharing[dom.p], ++with_p;
    if (dom.q >= 0) ++sharing[dom.q], ++with_q;
  }
  int sum_min = 0, sum_max = 0;
  std::vector<int> mismatched;
  for (const auto& [e, deg] : part.degrees) {
    ((*part.cs)[e].kind == CriticalKind::Minimum ? sum_min : sum_max) += deg;
    if (deg != sharing[e]) mismatched.push_back(e);
  }
  out.push_back(make("count.degrees", -1, mismatched.empty() && sum_min == with_p && sum_max == with_q,
                     {{"sum_deg_min", sum_min},
                      {"sum_deg_max", sum_max},
                      {"domains_with_min", with_p},
                      {"domains_with_max", with_q},
                      {"mismatched_extrema", mismatched}}));

  const int saddles = static_cast<int>(part.cs->saddles.size());
  if (!part.grid.domain.periodic()) {
    out.push_back(inapplicable("count.twosaddle", -1, "boundary domains present"));
  } else {
    bool unanimous = true;
    for (const auto& dom : part.domains)
      if (dom.saddles.size() != 2) unanimous = false;
    if (!unanimous) {
      out.push_back(inapplicable("count.twosaddle", -1, "not every domain has exactly two saddles"));
    } else {
      out.push_back(make("count.twosaddle", -1, mu == 2 * saddles, {{"mu", mu}, {"saddles", saddles}}));
    }
  }
  return out;
}

std::vector<CheckResult> verify_all(const Partition& part) {
  std::vector<CheckResult> all = verify_theorem1(part);
  for (auto* suite : {verify_theorem2, verify_counting})
    for (auto& r : suite(part)) all.push_back(std::move(r));
  const auto& cat = claim_catalogue();
  for (const auto& claim : cat) {
    bool present = false;
    for (const auto& r : all)
      if (r.claim == claim) present = true;
    if (!present) all.push_back(inapplicable(claim, -1, "no domain of the required kind"));
  }
  auto rank = [&](const std::string& c) { return std::find(cat.begin(), cat.end(), c) - cat.begin(); };
  std::stable_sort(all.begin(), all.end(), [&](const CheckResult& a, const CheckResult& b) {
    if (a.claim != b.claim) return rank(a.claim) < rank(b.claim);
    return a.domain < b.domain;
  });
  return all;
}

bool all_applicable_passed(const std::vector<CheckResult>& checks) {
  for (const auto& r : checks)
    if (r.applicable && !r.passed) return false;
  return true;
}

nlohmann::json to_json(const CheckResult& r) {
  return {{"claim", r.claim},
          {"scope", r.scope()},
          {"applicable", r.applicable},
          {"passed", r.passed},
          {"details", r.details}};
}

nlohmann::json ledger_json(const std::vector<CheckResult>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  int applicable = 0, passed = 0;
  for (const auto& r : checks) {
    arr.push_back(to_json(r));
    if (r.applicable) {
      ++applicable;
      if (r.passed) ++passed;
    }
  }
  return {{"checks", arr},
          {"summary", {{"applicable", applicable}, {"passed", passed}, {"failed", applicable - passed}}}};
}

std::string ledger_table(const std::vector<CheckResult>& checks) {
  // One row per claim: scopes passed / applicable.
  std::ostringstream os;
  os << std::left << std::setw(18) << "claim" << std::setw(12) << "applicable" << std::setw(10) << "passed"
     << "status\n";
  for (const auto& claim : claim_catalogue()) {
    int app = 0, ok = 0;
    std::vector<std::string> failing;
    for (const auto& r : checks) {
      if (r.claim != claim || !r.applicable) continue;
      ++app;
      if (r.passed) ++ok;
      else failing.push_back(r.scope());
    }
    os << std::setw(18) << claim << std::setw(12) << app << std::setw(10) << ok;
    if (app == 0) os << "n/a";
    else if (ok == app) os << "PASS";
    else {
      os << "FAIL";
      for (std::size_t k = 0; k < failing.size() && k < 5; ++k) os << ' ' << failing[k];
      if (failing.size() > 5) os << " ...";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace neumann
