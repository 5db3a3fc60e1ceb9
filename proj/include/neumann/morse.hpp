#pragma once

#include "neumann/field.hpp"

#include <array>
#include <json.hpp>
#include <optional>
#include <span>
#include <vector>

namespace neumann {

enum class CriticalKind { Minimum, Saddle, Maximum };

const char* to_string(CriticalKind k);

struct CriticalPoint {
  int id = -1;
  Point location = Point::Zero();
  double value = 0.0;
  int index = 0;  // number of negative Hessian eigenvalues
  CriticalKind kind = CriticalKind::Minimum;
  std::array<double, 2> hessian_eigvals{};  // ascending
  std::array<Vec2, 2> hessian_eigvecs{Vec2::Zero(), Vec2::Zero()};
  bool on_boundary = false;
  bool on_corner = false;

  bool is_extremum() const { return kind != CriticalKind::Saddle; }
};

/// C(f) with the index lists for M-(f), M+(f) and S(f). Ids equal positions in `points`.
struct CriticalSet {
  DomainSpec domain;
  std::vector<CriticalPoint> points;
  std::vector<int> minima;
  std::vector<int> maxima;
  std::vector<int> saddles;
  bool is_morse = false;

  const CriticalPoint& operator[](int id) const { return points.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return points.size(); }
  std::vector<int> extrema() const;

  /// Rebuild ids and the per-kind lists after editing `points`.
  void reindex();
};

struct MorseOptions {
  int seeds_per_axis = 0;  // 0: 8 * max wave number
  double newton_tol = 1e-9;
  double degeneracy_tol = 1e-6;
  int max_iterations = 60;
};

/// Newton search for all zeros of grad f from a seed grid, followed by a dense completeness
/// scan. For Dirichlet rectangles the periodic extension is searched and points on the walls
/// are flagged on_boundary.
/// Throws DegenerateCriticalPoint or NewtonDivergence.
CriticalSet find_critical_points(const ScalarField& f, const MorseOptions& opts = {});

/// Classify a located zero of the gradient from its Hessian.
/// Throws DegenerateCriticalPoint when |det H| < degeneracy_tol * (scale*lambda)^2.
CriticalPoint classify(const ScalarField& f, const Point& p, double degeneracy_tol);

/// Bucketed nearest-critical-point lookup, wrap-aware on the torus.
class CriticalPointLocator {
 public:
  CriticalPointLocator(const CriticalSet& cs, double bucket_size);
  /// Nearest critical point within radius, or -1.
  int nearest_within(const Point& p, double radius) const;

 private:
  const CriticalSet* cs_;
  DomainSpec domain_;
  double bucket_;
  int bx_, by_;
  double ox_, oy_;
  std::vector<std::vector<int>> buckets_;
};

struct NeumannLineSet;

/// True iff no separatrix terminates within the capture radius of another saddle.
bool morse_smale_check(const CriticalSet& cs, const NeumannLineSet& nls, double tol);

nlohmann::json to_json(const CriticalPoint& cp);
nlohmann::json to_json(const CriticalSet& cs);

}  // namespace neumann
