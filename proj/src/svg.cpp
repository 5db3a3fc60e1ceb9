#include "neumann/svg.hpp"

#include <cstdio>
#include <sstream>

namespace neumann {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

struct View {
  double scale, height;
  double x(double v) const { return v * scale; }
  double y(double v) const { return height - v * scale; }
};

// Row runs of a cell set as one path: a rectangle per maximal run along x.
std::string runs_path(const CellGrid& g, const std::vector<int>& cells, const View& v) {
  std::vector<std::vector<int>> rows(g.ny);
  for (int c : cells) rows[g.iy(c)].push_back(g.ix(c));
  std::ostringstream d;
  for (int j = 0; j < g.ny; ++j) {
    auto& r = rows[j];
    if (r.empty()) continue;
    std::sort(r.begin(), r.end());
    std::size_t k = 0;
    while (k < r.size()) {
      std::size_t e = k;
      while (e + 1 < r.size() && r[e + 1] == r[e] + 1) ++e;
      const double x0 = v.x(r[k] * g.hx()), x1 = v.x((r[e] + 1) * g.hx());
      const double y0 = v.y((j + 1) * g.hy()), y1 = v.y(j * g.hy());
      d << 'M' << num(x0) << ' ' << num(y0) << 'H' << num(x1) << 'V' << num(y1) << 'H' << num(x0) << 'Z';
      k = e + 1;
    }
  }
  return d.str();
}

// A lifted polyline drawn at every torus offset that meets the fundamental domain.
void polyline(std::ostringstream& os, const std::vector<Point>& pts, const DomainSpec& d, const View& v,
              const char* cls) {
  if (pts.size() < 2) return;
  double x0 = pts[0].x(), x1 = x0, y0 = pts[0].y(), y1 = y0;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  const int r = d.periodic() ? 1 : 0;
  for (int ox = -r; ox <= r; ++ox) {
    for (int oy = -r; oy <= r; ++oy) {
      const double sx = ox * d.lx, sy = oy * d.ly;
      if (x1 + sx < 0 || x0 + sx > d.lx || y1 + sy < 0 || y0 + sy > d.ly) continue;
      os << "<polyline class=\"" << cls << "\" points=\"";
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k) os << ' ';
        os << num(v.x(pts[k].x() + sx)) << ',' << num(v.y(pts[k].y() + sy));
      }
      os << "\"/>\n";
    }
  }
}

}  // namespace

std::string render_svg(const Analysis& a, const RenderOptions& opts) {
  const Partition& part = a.partition;
  const CellGrid& g = part.grid;
  const DomainSpec& d = g.domain;
  const double scale = opts.width / std::max(d.lx, d.ly);
  const View v{scale, d.ly * scale};
  const double w = d.lx * scale, h = d.ly * scale;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  os << "<defs><clipPath id=\"frame\"><rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\"/></clipPath></defs>\n";
  os << "<style>.nodal-domain{stroke:none}.pos{fill:#f2b8b5}.neg{fill:#b5c9f2}"
        ".neumann-domain{fill:#000;fill-opacity:0;stroke:none}"
        ".nodal-line{fill:none;stroke:#8c8c8c;stroke-width:1}"
        ".neumann-line{fill:none;stroke:#000;stroke-width:1.5}</style>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h) << "\" fill=\"#fff\"/>\n";
  os << "<g clip-path=\"url(#frame)\">\n";

  if (opts.show_nodal_domains) {
    os << "<g id=\"nodal-domains\">\n";
    for (const auto& nd : part.nodal.domains)
      os << "<path class=\"nodal-domain " << (nd.sign > 0 ? "pos" : "neg") << "\" data-id=\"" << nd.id << "\" d=\""
         << runs_path(g, nd.cells, v) << "\"/>\n";
    os << "</g>\n";
  }
  os << "<g id=\"neumann-domains\">\n";
  for (const auto& dom : part.domains)
    os << "<path class=\"neumann-domain\" data-id=\"" << dom.id << "\" data-kind=\"" << to_string(dom.kind)
       << "\" d=\"" << runs_path(g, dom.cells, v) << "\"/>\n";
  os << "</g>\n<g id=\"nodal-lines\">\n";
  for (const auto& line : part.nodal.lines) polyline(os, line.points, d, v, "nodal-line");
  os << "</g>\n<g id=\"neumann-lines\">\n";
  for (const auto& path : a.nls->paths) polyline(os, path.points, d, v, "neumann-line");
  os << "</g>\n</g>\n<g id=\"critical-points\">\n";
  const double r = 5.0;
  for (const auto& cp : a.cs->points) {
    const double x = v.x(cp.location.x()), y = v.y(cp.location.y());
    switch (cp.kind) {
      case CriticalKind::Maximum:
        os << "<circle class=\"maximum\" cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r)
           << "\" fill=\"#d62728\" stroke=\"#000\"/>\n";
        break;
      case CriticalKind::Minimum:
        os << "<circle class=\"minimum\" cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r)
           << "\" fill=\"#1f4fd6\" stroke=\"#000\"/>\n";
        break;
      case CriticalKind::Saddle:
        os << "<polygon class=\"saddle\" points=\"" << num(x) << ',' << num(y - r) << ' ' << num(x + r) << ','
           << num(y) << ' ' << num(x) << ',' << num(y + r) << ' ' << num(x - r) << ',' << num(y)
           << "\" fill=\"#8e44ad\" stroke=\"#000\"/>\n";
        break;
    }
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace neumann
