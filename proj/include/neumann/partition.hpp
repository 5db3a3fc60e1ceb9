#pragma once

#include "neumann/flow.hpp"
#include "neumann/raster.hpp"

#include <map>
#include <memory>
#include <vector>

namespace neumann {

enum class NeumannDomainKind { Inner, BoundaryMin, BoundaryMax };

const char* to_string(NeumannDomainKind k);

/// Clipped nodal set inside one Neumann domain.
struct NodalArc {
  int segments = 0;
  int components = 0;
  int endpoints = 0;    // degree-1 vertices of the clipped segment graph
  int stubs = 0;        // components dropped as crossing stubs at a corner saddle
  bool simple = false;  // every vertex has degree <= 2 and no closed loop
  bool distinct_subarcs = false;  // endpoints separated by p and q along the boundary loop
  std::vector<Point> endpoint_locations;
};

struct NeumannDomain {
  int id = -1;
  NeumannDomainKind kind = NeumannDomainKind::Inner;
  int p = -1;  // minimum id, -1 for a boundary terminus
  int q = -1;  // maximum id, -1 for a boundary terminus
  std::vector<int> cells;      // 4-connected raster mask, sorted
  std::vector<int> footprint;  // mask plus the adjacent band cells that carry the same flow label
  std::vector<std::array<int, 2>> boundary_loop;  // of the mask, lattice corners
  int boundary_loop_count = 0;
  std::vector<int> saddles;          // saddles near the mask
  std::vector<int> nearby_extrema;   // extrema near the mask
  NodalArc arc;
};

struct NodalDomain {
  int id = -1;
  int sign = 0;
  std::vector<int> cells;
};

struct NodalLine {
  std::vector<Point> points;  // continuous lift on the torus
  bool closed = false;
};

struct NodalSegment {
  Point a, b;  // b lifted next to a
  long ea, eb;  // dual-grid edge ids of the endpoints
};

struct NodalSet {
  std::vector<int> sign;  // per cell: +1, -1, or 0 within nodal_tol
  std::vector<int> domain_of;
  std::vector<NodalDomain> domains;
  std::vector<NodalSegment> segments;
  std::vector<NodalLine> lines;
  int nu = 0;
};

struct LabelOptions {
  int resolution = 256;
  FlowOptions flow;             // separatrix settings; labeling derives a coarser max step
  double unresolved_limit = 0.01;
  double adjacency_cells = 2.5;  // radius for "near the mask", in cell widths
};

/// Cell label values besides critical point ids.
inline constexpr int kBoundaryLabel = -1;  // flow left through the rectangle wall
inline constexpr int kLineLabel = -2;      // flow captured by a saddle
inline constexpr int kUnresolved = -3;

struct Partition {
  FieldPtr field;
  std::shared_ptr<const CriticalSet> cs;
  std::shared_ptr<const NeumannLineSet> nls;
  CellGrid grid;
  LabelOptions options;

  std::vector<int> label_min;  // per cell
  std::vector<int> label_max;
  std::vector<char> band;      // Neumann-line raster band
  std::vector<int> domain_of;  // mask owner, -1 on the band
  std::vector<int> footprint_of;
  std::vector<NeumannDomain> domains;
  NodalSet nodal;

  int mu = 0;
  std::map<int, int> degrees;  // extremum id -> number of separatrices ending there
  int unresolved_initial = 0;
  int unresolved_final = 0;
  int band_cells = 0;

  int nu() const { return nodal.nu; }
};

/// Flow-labels every cell centre, builds the Neumann-line band and the domains.
/// Throws ResolutionTooCoarse when more than 1% of cells stay unresolved.
Partition label_by_flow(FieldPtr f, std::shared_ptr<const CriticalSet> cs,
                        std::shared_ptr<const NeumannLineSet> nls, const LabelOptions& opts);

/// Sign components at cell centres and marching-squares zero contours through the centres.
NodalSet extract_nodal(const ScalarField& f, const CellGrid& grid);

/// Clips the nodal segments to each domain footprint and fills NeumannDomain::arc.
void attach_nodal_arcs(Partition& part);

/// Lattice corner sequence of a closed loop converted to coordinates.
std::vector<Point> loop_points(const CellGrid& g, const std::vector<std::array<int, 2>>& loop);

}  // namespace neumann
