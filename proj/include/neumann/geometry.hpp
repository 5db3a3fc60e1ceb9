#pragma once

#include "neumann/partition.hpp"

#include <cstdint>
#include <json.hpp>
#include <vector>

namespace neumann {

struct Circle {
  Point center = Point::Zero();
  double radius = 0.0;
};

/// Smallest circle containing all points (randomised incremental construction; the shuffle
/// uses a fixed seed so results are reproducible).
Circle minimal_enclosing_circle(std::vector<Point> points, std::uint64_t seed = 0x5eed);

/// Counter-clockwise hull without collinear points.
std::vector<Point> convex_hull(std::vector<Point> points);

/// Largest pairwise distance.
double point_set_diameter(const std::vector<Point>& points);

/// Signed area (counter-clockwise positive) and perimeter of a closed polygon given without repeating
/// its first vertex.
double polygon_area(const std::vector<Point>& poly);
double polygon_perimeter(const std::vector<Point>& poly);
/// Even-odd rule.
bool point_in_polygon(const std::vector<Point>& poly, const Point& p);

/// Planar lift of a torus mask: lifted cell offsets (i, j) per cell, in the order given.
/// Throws LiftFailure if the mask wraps around the torus.
std::vector<std::array<long, 2>> lift_cells(const CellGrid& g, const std::vector<int>& cells);

struct DomainGeometry {
  int domain = -1;
  double area = 0.0;            // mask cells * cell area
  double footprint_area = 0.0;
  double outer_radius = 0.0;
  Point outer_center = Point::Zero();
  double diameter = 0.0;
  double dpq = std::numeric_limits<double>::quiet_NaN();  // inner domains only
  Point centroid = Point::Zero();  // canonical
  double extent_x = 0.0;           // bounding box of the lifted footprint
  double extent_y = 0.0;
  bool lift_ok = true;
};

/// Area, outer radius and diameter of a domain. The measured point set is the lifted footprint
/// boundary together with the domain's extrema and saddles.
DomainGeometry measure(const Partition& part, const NeumannDomain& dom);
std::vector<DomainGeometry> measure_all(const Partition& part);

struct RadiusCensus {
  int rank = 0;  // floor(nu / 2), 1-based rank into the descending radii (0 means the largest)
  double radius = 0.0;
  double constant = 0.0;  // radius * sqrt(lambda)
  double min_ratio_to_half_dpq = std::numeric_limits<double>::infinity();
  int witness_violations = 0;  // inner domains with R < d(p, q) / 2
  std::vector<double> sorted_radii;
};

RadiusCensus outer_radius_census(const Partition& part, const std::vector<DomainGeometry>& geo);

/// Boundary of an inner domain traced along the separatrices that join its minimum and maximum through
/// two saddles, lifted near `anchor`. Among the candidate saddle pairs the one whose interior best
/// matches the labeled cells is taken. Empty for boundary domains or when no pair closes up.
std::vector<Point> domain_polygon(const Partition& part, const NeumannDomain& dom, const Point& anchor);

/// Lens-like inner domains: two corner saddles nearly a diameter apart, farther apart than the extrema.
std::vector<int> lens_domains(const Partition& part, const std::vector<DomainGeometry>& geo, double ratio = 0.9);

nlohmann::json to_json(const DomainGeometry& g);
nlohmann::json to_json(const RadiusCensus& c);

}  // namespace neumann
