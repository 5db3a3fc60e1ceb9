// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "neumann/report.hpp"
#include "neumann/svg.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>

using namespace neumann;

namespace {

// Tolerances and pinned values.
constexpr int kResolution = 256;
constexpr int kFineResolution = 512;
constexpr double kRuntimeLimitSeconds = 30.0;
constexpr double kEigenOracleRelTol = 0.01;
constexpr double kConvergenceRatioLow = 3.5;
constexpr double kConvergenceRatioHigh = 4.5;
constexpr double kDiameterCells = 2.0;
constexpr double kMecTol = 1e-12;
constexpr int kMecInstances = 1000;
constexpr double kSternRatioLow = 1.8;
constexpr double kSternRatioHigh = 2.8;
constexpr double kSternCoefficient = 0.98;
constexpr int kSternMuR2 = 19;  // regression constants from the first computation at 256
constexpr int kSternMuR3 = 39;
constexpr double kRightAngleTol = 1e-6;

struct Outcome {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note << " [" << what << "]";
    }
  }
};

int failures = 0;

void report(int criterion, const std::string& title, Outcome& o) {
  std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << criterion << ": " << title << o.note.str() << std::endl;
  if (!o.ok) ++failures;
}

struct Case {
  std::string name;
  FieldPtr field;
};

Analysis timed_analyze(const FieldPtr& f, int resolution, double& seconds) {
  AnalysisOptions o;
  o.resolution = resolution;
  const auto t0 = std::chrono::steady_clock::now();
  Analysis a = analyze(f, o);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return a;
}

std::string tag(const std::string& name, const std::string& what) { return name + ": " + what; }

std::vector<CheckResult> failing(const std::vector<CheckResult>& checks) {
  std::vector<CheckResult> out;
  for (const auto& c : checks)
    if (c.applicable && !c.passed) out.push_back(c);
  return out;
}

int count_of(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + needle.size())) ++n;
  return n;
}

bool encloses(const Point& c, double r, const std::vector<Point>& pts) {
  for (const auto& p : pts)
    if ((p - c).norm() > r * (1 + 1e-12) + 1e-12) return false;
  return true;
}

// O(n^3) candidate circles through two or three points, each checked against all points.
double brute_force_radius(const std::vector<Point>& pts) {
  if (pts.size() == 1) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Point c = 0.5 * (pts[i] + pts[j]);
      const double r = 0.5 * (pts[i] - pts[j]).norm();
      if (r < best && encloses(c, r, pts)) best = r;
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        const Point a = pts[i], b = pts[j], e = pts[k];
        const double d = 2 * (a.x() * (b.y() - e.y()) + b.x() * (e.y() - a.y()) + e.x() * (a.y() - b.y()));
        if (std::abs(d) < 1e-14) continue;
        const Point cc((a.squaredNorm() * (b.y() - e.y()) + b.squaredNorm() * (e.y() - a.y()) +
                        e.squaredNorm() * (a.y() - b.y())) / d,
                       (a.squaredNorm() * (e.x() - b.x()) + b.squaredNorm() * (a.x() - e.x()) +
                        e.squaredNorm() * (b.x() - a.x())) / d);
        const double rr = (a - cc).norm();
        if (rr < best && encloses(cc, rr, pts)) best = rr;
      }
    }
  return best;
}

std::vector<double> unit_square_neumann(int k) {
  std::vector<double> v;
  for (int m = 0; m <= k; ++m)
    for (int n = 0; n <= k; ++n) v.push_back(kPi * kPi * (m * m + n * n));
  std::sort(v.begin(), v.end());
  v.resize(k);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, int>> torus_modes{{1, 1}, {1, 2}, {2, 2}, {2, 3}, {1, 3}};
  const std::vector<std::pair<int, int>> rect_modes{{1, 1}, {2, 1}, {2, 2}};

  std::map<std::string, Analysis> coarse;
  std::vector<std::string> torus_names, rect_names;

  // 1. Separable torus counts.
  {
    Outcome o;
    for (auto [n, m] : torus_modes) {
      const std::string name = "torus(" + std::to_string(n) + "," + std::to_string(m) + ")";
      double secs = 0.0;
      Analysis a = timed_analyze(torus_cos_cos(n, m), kResolution, secs);
      const int nm = n * m;
      o.require(a.partition.mu == 8 * nm, tag(name, "mu=" + std::to_string(a.partition.mu)));
      o.require(a.partition.nu() == 4 * nm, tag(name, "nu=" + std::to_string(a.partition.nu())));
      o.require(static_cast<int>(a.cs->minima.size()) == 2 * nm && static_cast<int>(a.cs->maxima.size()) == 2 * nm &&
                    static_cast<int>(a.cs->saddles.size()) == 4 * nm,
                tag(name, "critical counts"));
      bool degrees = a.partition.degrees.size() == 4 * static_cast<std::size_t>(nm);
      for (const auto& [id, deg] : a.partition.degrees) degrees = degrees && deg == 4;
      o.require(degrees, tag(name, "degrees"));
      o.require(secs < kRuntimeLimitSeconds, tag(name, "runtime " + std::to_string(secs) + " s"));
      std::cout << "  " << name << " mu=" << a.partition.mu << " nu=" << a.partition.nu() << " in " << secs << " s"
                << std::endl;
      torus_names.push_back(name);
      coarse.emplace(name, std::move(a));
    }
    report(1, "separable torus counts at 256", o);
  }

  // 2. Theorem ledgers at 256 and 512.
  {
    Outcome o;
    for (auto [n, m] : rect_modes) {
      const std::string name = "rect(" + std::to_string(n) + "," + std::to_string(m) + ")";
      double secs = 0.0;
      coarse.emplace(name, timed_analyze(rectangle_sin_sin(n, m), kResolution, secs));
      rect_names.push_back(name);
    }
    for (const auto& [name, a] : coarse) {
      for (int res : {kResolution, kFineResolution}) {
        const Analysis level = res == kResolution ? a : relabel(a, res);
        const auto checks = verify_all(level.partition);
        const auto bad = failing(checks);
        int theorem2 = 0;
        for (const auto& c : checks)
          if (c.applicable && c.claim.rfind("thm2", 0) == 0) ++theorem2;
        std::string first;
        if (!bad.empty()) first = " first " + bad.front().claim + " " + bad.front().scope();
        o.require(bad.empty(), tag(name, std::to_string(bad.size()) + " failures at " + std::to_string(res) + first));
        if (name.rfind("rect", 0) == 0) o.require(theorem2 > 0, tag(name, "no boundary claims checked"));
        std::cout << "  " << name << " @" << res << ": " << checks.size() << " checks, " << bad.size() << " failures"
                  << std::endl;
      }
    }
    report(2, "theorem ledgers at 256 and 512", o);
  }

  // 6 runs before 3 so its fields join the counting census.
  std::map<int, Analysis> stern;
  {
    Outcome o;
    for (int r : {2, 3}) {
      double secs = 0.0;
      stern.emplace(r, timed_analyze(stern_field(r, kSternCoefficient), kResolution, secs));
    }
    const Partition& p2 = stern.at(2).partition;
    const Partition& p3 = stern.at(3).partition;
    const double ratio = static_cast<double>(p3.mu) / p2.mu;
    o.require(p3.nu() == 2, "nu(r=3)=" + std::to_string(p3.nu()));
    o.require(p3.mu > 2 * p3.nu(), "mu(r=3) not above 2 nu");
    o.require(ratio >= kSternRatioLow && ratio <= kSternRatioHigh, "ratio " + std::to_string(ratio));
    o.require(p2.mu == kSternMuR2, "mu(r=2)=" + std::to_string(p2.mu));
    o.require(p3.mu == kSternMuR3, "mu(r=3)=" + std::to_string(p3.mu));
    std::cout << "  stern r=2 mu=" << p2.mu << " nu=" << p2.nu() << "; r=3 mu=" << p3.mu << " nu=" << p3.nu()
              << "; ratio " << ratio << std::endl;
    report(6, "Stern-type field", o);
  }

  // 3. Counting inequality.
  {
    Outcome o;
    auto census = [&](const std::string& name, const Analysis& a, bool torus) {
      const Partition& p = a.partition;
      o.require(p.mu >= 2 * p.nu(), tag(name, "mu < 2 nu"));
      if (torus) o.require(p.mu == 2 * p.nu(), tag(name, "mu != 2 nu"));
      for (const auto& c : verify_counting(p)) {
        if (c.claim != "count.twosaddle" || !c.applicable) continue;
        o.require(c.passed && p.mu == 2 * static_cast<int>(a.cs->saddles.size()), tag(name, "mu != 2|S|"));
      }
    };
    for (const auto& name : torus_names) census(name, coarse.at(name), true);
    for (const auto& name : rect_names) census(name, coarse.at(name), false);
    for (const auto& [r, a] : stern) census("stern r=" + std::to_string(r), a, false);
    report(3, "counting inequality", o);
  }

  // 4. Lens spectral position and the eigensolver oracle.
  {
    Outcome o;
    std::map<int, std::pair<int, bool>> sweep;  // n_y -> (pos, pos > 1 and stable)
    for (int ny = 2; ny <= 8; ++ny) {
      const std::string name = "lens n_y=" + std::to_string(ny);
      try {
        AnalysisOptions opts;
        opts.resolution = kResolution;
        const Analysis a = analyze(torus_cos_cos(1, ny), opts);
        const auto lens = lens_domains(a.partition, a.geometry);
        if (lens.empty()) {
          o.require(false, tag(name, "no lens domain"));
          sweep[ny] = {-1, false};
          continue;
        }
        std::optional<Analysis> fine;
        const FineLevel fine_level = [&]() {
          if (!fine) fine = relabel(a, 2 * kResolution);
          return LabeledLevel{&fine->partition, &fine->geometry};
        };
        const DomainSpectrum ds = domain_spectrum(a.partition, a.geometry, lens.front(), fine_level);
        if (!ds.failure.empty()) {
          sweep[ny] = {-1, false};
          std::cout << "  " << name << ": " << ds.failure << std::endl;
          continue;
        }
        sweep[ny] = {ds.position.pos, ds.position.pos > 1 && ds.stable};
        std::cout << "  " << name << ": pos=" << ds.position.pos << " (h: " << ds.position_coarse.pos
                  << ") stable=" << ds.stable << " rayleigh=" << ds.rayleigh << " lambda=" << a.field->lambda()
                  << std::endl;
      } catch (const Error& e) {
        sweep[ny] = {-1, false};
        std::cout << "  " << name << ": " << e.what() << std::endl;
      }
    }
    int threshold = -1;
    for (int start = 2; start <= 8 && threshold < 0; ++start) {
      bool all = true;
      for (int ny = start; ny <= 8; ++ny) all = all && sweep[ny].second;
      if (all) threshold = start;
    }
    o.require(threshold > 0, "no threshold in the sweep");
    if (threshold > 0) std::cout << "  n_y* = " << threshold << std::endl;

    const int k = 10;
    const auto exact = unit_square_neumann(k);
    std::vector<std::vector<double>> levels;
    for (int n : {128, 256}) {
      const CellGrid g(DomainSpec::rectangle(1, 1), n, n);
      std::vector<int> cells(g.size());
      for (int c = 0; c < g.size(); ++c) cells[c] = c;
      levels.push_back(lowest_eigenvalues(build_operator(g, cells), k).eigenvalues);
    }
    for (int i = 1; i < k; ++i) {
      const double e0 = std::abs(levels[0][i] - exact[i]), e1 = std::abs(levels[1][i] - exact[i]);
      o.require(e0 / exact[i] < kEigenOracleRelTol, "square eigenvalue " + std::to_string(i) + " off by " +
                                                        std::to_string(e0 / exact[i]));
      o.require(e0 / e1 >= kConvergenceRatioLow && e0 / e1 <= kConvergenceRatioHigh,
                "convergence ratio " + std::to_string(e0 / e1) + " at index " + std::to_string(i));
    }
    report(4, "lens spectral position and eigensolver oracle", o);
  }

  // 5. Geometry.
  {
    Outcome o;
    for (int n = 1; n <= 3; ++n) {
      const std::string name = "torus(1," + std::to_string(n) + ")";
      const Analysis& a = coarse.at(name);
      double dmax = 0.0;
      for (const auto& g : a.geometry) dmax = std::max(dmax, g.diameter);
      const double h = a.partition.grid.hx();
      o.require(std::abs(dmax - 0.5) <= kDiameterCells * h, tag(name, "max diameter " + std::to_string(dmax)));
      std::cout << "  " << name << " max diameter " << dmax << std::endl;
    }
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> size(1, 16);
    double worst = 0.0;
    for (int t = 0; t < kMecInstances; ++t) {
      std::vector<Point> pts(size(rng));
      for (auto& p : pts) p = Point(u(rng), u(rng));
      worst = std::max(worst, std::abs(minimal_enclosing_circle(pts).radius - brute_force_radius(pts)));
    }
    o.require(worst <= kMecTol, "MEC deviation " + std::to_string(worst));
    for (const auto& [name, a] : coarse)
      for (const auto& g : a.geometry)
        if (std::isfinite(g.dpq)) o.require(g.outer_radius >= 0.5 * g.dpq, tag(name, "R < d(p,q)/2"));
    report(5, "geometry", o);
  }

  // 7. Structural numerics.
  {
    Outcome o;
    auto check = [&](const std::string& name, const Analysis& a) {
      const StructureSummary s = structure_summary(a);
      o.require(s.max_right_angle_defect < kRightAngleTol, tag(name, "right angle " + std::to_string(s.max_right_angle_defect)));
      o.require(s.interlacing_passed == s.interlacing_applicable, tag(name, "interlacing"));
      o.require(s.max_monotonicity_violation <= a.options.flow.ode_tol, tag(name, "monotonicity"));
    };
    for (const auto& [name, a] : coarse) check(name, a);
    for (const auto& [r, a] : stern) check("stern r=" + std::to_string(r), a);
    report(7, "structural numerics", o);
  }

  // 8. Figure regression.
  {
    Outcome o;
    auto figure = [&](const std::string& name, const FieldPtr& f, int mu, int nu) {
      AnalysisOptions opts;
      opts.resolution = kResolution;
      const std::string first = render_svg(analyze(f, opts));
      const std::string second = render_svg(analyze(f, opts));
      o.require(first == second, tag(name, "output differs between runs"));
      o.require(count_of(first, "class=\"neumann-domain\"") == mu, tag(name, "neumann domain fills"));
      o.require(count_of(first, "class=\"nodal-domain ") == nu, tag(name, "nodal domain fills"));
    };
    figure("torus(1,3)", torus_cos_cos(1, 3), 24, 12);
    figure("stern r=3", stern_field(3, kSternCoefficient), kSternMuR3, 2);
    report(8, "figure regression", o);
  }

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
