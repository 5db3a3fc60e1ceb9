#pragma once

#include "neumann/field.hpp"

#include <array>
#include <functional>
#include <vector>

namespace neumann {

/// Uniform cell raster over the domain. Cell (i, j) covers [i hx, (i+1) hx] x [j hy, (j+1) hy]
/// and has flat index i * ny + j. Torus rasters wrap in both axes.
struct CellGrid {
  DomainSpec domain;
  int nx = 0;
  int ny = 0;

  CellGrid() = default;
  CellGrid(DomainSpec d, int nx_, int ny_) : domain(d), nx(nx_), ny(ny_) {}
  /// Square-ish cells with `resolution` cells along the longer axis.
  static CellGrid for_resolution(const DomainSpec& d, int resolution);

  double hx() const { return domain.lx / nx; }
  double hy() const { return domain.ly / ny; }
  double cell_area() const { return hx() * hy(); }
  int size() const { return nx * ny; }
  int index(int i, int j) const { return i * ny + j; }
  int ix(int c) const { return c / ny; }
  int iy(int c) const { return c % ny; }
  Point center(int c) const { return {(ix(c) + 0.5) * hx(), (iy(c) + 0.5) * hy()}; }
  /// Cell containing p (wrapped on the torus, clamped on the rectangle).
  int locate(const Point& p) const;
  /// Wrapped or -1 if outside the rectangle.
  int wrap(int i, int j) const;
  /// 4-neighbours in the order -x, +x, -y, +y; -1 where the rectangle ends.
  std::array<int, 4> neighbors4(int c) const;
  std::array<int, 8> neighbors8(int c) const;
};

/// 4-connected components of cells sharing the same key; cells with key < 0 are skipped.
/// Components are numbered in order of their lowest cell index. Returns the count.
int label_components(const CellGrid& g, const std::vector<int>& key, std::vector<int>& comp);

/// Cells crossed by segment a-b (lifted coordinates allowed on the torus). Corner passages
/// add one side cell so the result is a 4-connected chain.
void supercover(const CellGrid& g, const Point& a, const Point& b, const std::function<void(int)>& visit);

/// V - E + F of the cell complex with one vertex per mask cell, one edge per 4-adjacent pair
/// and one face per fully occupied 2x2 block. Equals 1 for a simply connected mask.
long euler_characteristic(const CellGrid& g, const std::vector<int>& cells);

/// Closed boundary loops of a mask as lattice-corner sequences (lifted integer coordinates),
/// with diagonal pinch points resolved so the mask stays 4-connected.
std::vector<std::vector<std::array<int, 2>>> boundary_loops(const CellGrid& g, const std::vector<int>& cells);

/// Mask cells with a 4-neighbour outside the mask (or at a rectangle wall).
std::vector<int> boundary_cells(const CellGrid& g, const std::vector<int>& cells);

}  // namespace neumann
