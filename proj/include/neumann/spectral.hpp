#pragma once

#include "neumann/geometry.hpp"

#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <vector>

namespace neumann {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class BoundaryCondition { Neumann, Dirichlet };

/// Five-point finite-volume Laplacian on a cell mask, one unknown per cell in the given order.
/// Neumann: missing neighbours contribute nothing. Dirichlet: each missing neighbour adds 2/h^2
/// (ghost value -u on the far side of the face). Throws EmptyMask.
SparseMatrix build_operator(const CellGrid& g, const std::vector<int>& cells,
                            BoundaryCondition bc = BoundaryCondition::Neumann);

/// Cut-cell finite-volume discretisation of the Neumann Laplacian on a polygon: the unknowns are the
/// grid cells the polygon covers, weighted by covered area, and the fluxes are scaled by the covered
/// length of each face. Cells covering less than `min_fraction` of their area are dropped, and only
/// the face-connected piece with the largest area is kept. Eigenvalues solve K u = l M u.
struct CutCellOperator {
  SparseMatrix stiffness;
  Eigen::VectorXd mass;          // covered area per unknown
  std::vector<Point> centroids;  // centroid of the covered part of each cell
  double area = 0.0;             // polygon area
  double perimeter = 0.0;
};

CutCellOperator build_cut_cell_operator(const std::vector<Point>& polygon, double hx, double hy,
                                        double min_fraction = 1e-4);

/// Symmetric form M^-1/2 K M^-1/2 with the same eigenvalues.
SparseMatrix symmetric_form(const CutCellOperator& op);

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd vectors;          // columns, filled when requested
  double max_residual = 0.0;        // max ||A v - l v|| / ||v||
  int iterations = 0;
};

struct EigenOptions {
  int dense_limit = 1500;
  double tolerance = 1e-8;
  int max_iterations = 1000;
  std::uint64_t seed = 1;
  bool vectors = false;
};

/// k smallest eigenpairs of a symmetric positive semidefinite matrix. Small problems are solved
/// densely; larger ones by shift-invert block subspace iteration with Rayleigh-Ritz.
/// Throws ConvergenceFailure.
Spectrum lowest_eigenvalues(const SparseMatrix& a, int k, const EigenOptions& opts = {});

struct Position {
  int pos = 0;           // 0-based index, largest index of the matching cluster
  int multiplicity = 1;
  double matched = 0.0;  // eigenvalue matched to lambda
  double lower = 0.0;    // bracketing eigenvalues
  double upper = 0.0;
};

/// Index of lambda in the ascending spectrum (pos(0) = 0). Throws NoMatchingEigenvalue when no
/// eigenvalue lies within matching_tol.
Position spectral_position(double lambda, const std::vector<double>& eigenvalues, double matching_tol,
                           double cluster_tol = 1e-6);

/// Number of eigenvalues to request so that the spectrum reaches past lambda.
int eigen_count_for(double lambda, double area, double perimeter);

double rayleigh_quotient(const SparseMatrix& a, const Eigen::VectorXd& v);

/// Closed-form Neumann spectrum of an a x b rectangle, ascending, first k values.
std::vector<double> rectangle_neumann_spectrum(double a, double b, int k);

/// Result of the h, h/2 protocol for one domain.
struct DomainSpectrum {
  int domain = -1;
  int fine_domain = -1;
  NeumannDomainKind kind = NeumannDomainKind::Inner;
  double area = 0.0;
  std::vector<double> eigs;       // at h
  std::vector<double> eigs_fine;  // at h/2
  double error_estimate = 0.0;    // |lambda_h - lambda_{h/2}| at the matched index
  double matching_tol = 0.0;
  Position position;              // at h/2
  Position position_coarse;       // at h
  bool stable = false;            // same pos at both resolutions
  double rayleigh = 0.0;          // Rayleigh quotient of f restricted to the footprint (h/2)
  bool kroger_ok = false;         // lambda <= 8 pi pos / area
  std::string failure;            // set when no eigenvalue matched
  bool cut_cell = false;          // polygon discretisation (inner domains) instead of the cell footprint
};

/// The same field labeled at twice the resolution, produced on demand.
struct LabeledLevel {
  const Partition* partition = nullptr;
  const std::vector<DomainGeometry>* geometry = nullptr;
};
using FineLevel = std::function<LabeledLevel()>;

/// Solve the domain at h and h/2. Inner domains are discretised on their separatrix polygon when one
/// can be assembled; otherwise the cell footprints at both resolutions are used, and only then is
/// `fine` called.
DomainSpectrum domain_spectrum(const Partition& coarse, const std::vector<DomainGeometry>& coarse_geo, int domain,
                               const FineLevel& fine, const EigenOptions& opts = {});
DomainSpectrum domain_spectrum(const Partition& coarse, const std::vector<DomainGeometry>& coarse_geo,
                               const Partition& fine, const std::vector<DomainGeometry>& fine_geo, int domain,
                               const EigenOptions& opts = {});

/// Domain in `fine` with the same extrema labels whose centroid is closest to the given one.
int match_domain(const Partition& coarse, const std::vector<DomainGeometry>& coarse_geo, const Partition& fine,
                 const std::vector<DomainGeometry>& fine_geo, int domain);

/// First Dirichlet eigenvalue position (1-based) of lambda on a nodal domain; 1 expected.
Position nodal_dirichlet_position(const Partition& part, int nodal_domain, const EigenOptions& opts = {});

nlohmann::json to_json(const DomainSpectrum& s);

}  // namespace neumann
