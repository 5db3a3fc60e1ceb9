#pragma once

#include "neumann/morse.hpp"

#include <map>
#include <optional>
#include <vector>

namespace neumann {

enum class Direction { Descending, Ascending };

const char* to_string(Direction d);

enum class TerminusKind { Extremum, Saddle, Boundary };

struct Terminus {
  TerminusKind kind = TerminusKind::Extremum;
  int critical_id = -1;  // set for Extremum and Saddle
  Point location = Point::Zero();
};

/// Tolerances are relative to min(Lx, Ly) unless stated.
struct FlowOptions {
  double launch_offset = 1e-4;
  double capture_radius = 1e-3;
  double max_step = 1.0 / 512;
  double ode_tol = 1e-9;
  int max_steps = 100000;
  int capture_delay = 10;  // steps before the origin saddle may capture the path
  /// Terminate early inside balls around extrema where the level set certifies the limit.
  /// Only used for labeling flows, which do not need the full polyline.
  bool use_basin_balls = false;
};

struct FlowPath {
  std::vector<Point> points;  // continuous lift on the torus
  std::vector<double> values;
  Direction direction = Direction::Descending;
  int origin_id = -1;  // saddle id, or -1 for a free start
  Terminus terminus;
  double arclength = 0.0;
  bool saddle_connection = false;
};

/// Integrates the arclength-parametrised flow of -grad f (descending) or +grad f (ascending)
/// with an embedded Dormand-Prince 5(4) pair.
class FlowTracer {
 public:
  FlowTracer(FieldPtr f, const CriticalSet& cs, FlowOptions opts = {});

  const ScalarField& field() const { return *field_; }
  const CriticalSet& critical_set() const { return *cs_; }
  const FlowOptions& options() const { return opts_; }
  double capture_radius() const { return capture_; }
  double launch_offset() const { return eps_; }
  double max_step() const { return max_step_; }

  /// Throws StepBudgetExceeded or StagnationWithoutCapture.
  /// With record = false only the terminus and arclength are filled in.
  FlowPath integrate(const Point& start, Direction dir, int origin_id = -1, bool record = true) const;

  /// Critical point whose capture ball contains p, or -1.
  int captured_at(const Point& p) const { return locator_.nearest_within(p, capture_); }

 private:
  struct Basin {
    int id;
    double radius;
    double threshold;  // certifying level: above it (max) or below it (min)
  };
  std::optional<int> basin_hit(const Point& p, double value, Direction dir) const;

  FieldPtr field_;   // user field
  FieldPtr search_;  // field evaluated during integration (periodic extension)
  const CriticalSet* cs_;
  FlowOptions opts_;
  CriticalPointLocator locator_;
  double eps_, capture_, max_step_, abs_tol_;
  std::vector<Basin> basins_;  // indexed by critical point id; radius 0 when unused
  double basin_reach_ = 0.0;
};

/// Separatrices of one saddle: descending along +-v_neg, then ascending along +-v_pos.
/// On a rectangle only launches that enter the open rectangle are traced.
std::vector<FlowPath> trace_saddle_separatrices(const FlowTracer& tracer, const CriticalPoint& saddle);

struct NeumannLineSet {
  std::vector<FlowPath> paths;
  std::map<int, std::vector<int>> by_saddle;  // saddle id -> indices into paths
  std::vector<int> extrema;                   // closure points
  std::vector<Point> boundary_crossings;      // non-saddle wall hits on rectangles
  bool morse_smale = true;
};

/// Throws NoSaddles when the field has no saddle points.
NeumannLineSet build_neumann_line_set(const FlowTracer& tracer);

/// Largest deviation from pi/2 (radians) between consecutive launch directions at a saddle.
double right_angle_defect(const FlowTracer& tracer, const NeumannLineSet& nls, int saddle_id);

struct InterlacingResult {
  bool applicable = false;  // saddle value is zero
  bool interlaced = false;
  int zero_rays = 0;
  int separatrix_rays = 0;
};

/// On a small circle around the saddle, the zero-level rays and separatrix rays must alternate.
InterlacingResult interlacing(const FlowTracer& tracer, const NeumannLineSet& nls, int saddle_id);

/// Largest increase of f along a descending path (or decrease along an ascending one),
/// in units of f's scale. Zero means strictly monotone.
double monotonicity_violation(const FlowPath& path, double scale);

nlohmann::json to_json(const FlowPath& path, const DomainSpec& d);
nlohmann::json to_json(const NeumannLineSet& nls, const DomainSpec& d);

}  // namespace neumann
