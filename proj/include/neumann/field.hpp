#pragma once

#include "neumann/common.hpp"

#include <memory>
#include <span>
#include <vector>

namespace neumann {

enum class DomainKind { Torus, RectangleDirichlet };

/// Flat torus [0,Lx)x[0,Ly) or Dirichlet rectangle [0,Lx]x[0,Ly].
struct DomainSpec {
  DomainKind kind = DomainKind::Torus;
  double lx = 1.0;
  double ly = 1.0;

  static DomainSpec torus(double lx, double ly);
  static DomainSpec rectangle(double lx, double ly);

  bool periodic() const { return kind == DomainKind::Torus; }
  double min_extent() const { return std::min(lx, ly); }
  double area() const { return lx * ly; }

  /// Torus: wrap into [0,Lx)x[0,Ly). Rectangle: identity.
  Point canonical(const Point& p) const;
  /// Minimal-image displacement b - a.
  Vec2 displacement(const Point& a, const Point& b) const;
  double distance(const Point& a, const Point& b) const;
  bool contains(const Point& p, double tol = 0.0) const;
  /// Image of p closest to reference (identity on the rectangle).
  Point nearest_image(const Point& p, const Point& reference) const;
};

/// Value, gradient and Hessian at one point.
struct Jet {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
  Mat2 hessian = Mat2::Zero();
};

/// Interface for eigenfunctions on a flat domain. Implementations are immutable and
/// evaluation is safe to call concurrently.
class ScalarField {
 public:
  virtual ~ScalarField() = default;

  virtual const DomainSpec& domain() const = 0;
  virtual double lambda() const = 0;
  /// Amplitude scale used to make tolerances relative (sum |amp| or max |sample|).
  virtual double scale() const = 0;
  /// Largest per-axis wave number, used to size seed grids.
  virtual int max_frequency() const = 0;

  /// Unchecked evaluation; the point may lie slightly outside a rectangle.
  virtual Jet jet_unchecked(const Point& p) const = 0;
  virtual double value_unchecked(const Point& p) const = 0;
  virtual Vec2 gradient_unchecked(const Point& p) const = 0;

  /// A torus field that agrees with this one on the domain. Identity for torus fields,
  /// odd reflection across the walls for Dirichlet rectangles.
  virtual std::shared_ptr<const ScalarField> periodic_extension() const = 0;

  double eval(const Point& p) const;
  Vec2 grad(const Point& p) const;
  Mat2 hessian(const Point& p) const;

 protected:
  void check_inside(const Point& p) const;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

enum class Parity { Cos, Sin };

struct SeparableMode {
  double amplitude = 1.0;
  int nx = 0;
  int ny = 0;
  Parity px = Parity::Cos;
  Parity py = Parity::Cos;
};

/// Finite sum of separable modes sharing one Laplacian eigenvalue.
class AnalyticEigenfunction final : public ScalarField,
                                    public std::enable_shared_from_this<AnalyticEigenfunction> {
 public:
  /// Throws Error(InvalidField) on empty or mixed-eigenvalue mode lists, or rectangle modes
  /// that are not sine-sine with n >= 1.
  AnalyticEigenfunction(DomainSpec domain, std::vector<SeparableMode> modes);

  const DomainSpec& domain() const override { return domain_; }
  double lambda() const override { return lambda_; }
  double scale() const override { return scale_; }
  int max_frequency() const override;
  const std::vector<SeparableMode>& modes() const { return modes_; }

  Jet jet_unchecked(const Point& p) const override;
  double value_unchecked(const Point& p) const override;
  Vec2 gradient_unchecked(const Point& p) const override;
  std::shared_ptr<const ScalarField> periodic_extension() const override;

  /// Wave numbers (kx, ky) of a mode on this domain.
  std::pair<double, double> wave_numbers(const SeparableMode& m) const;

 private:
  struct Term {
    double amp, kx, ky;
    Parity px, py;
  };
  DomainSpec domain_;
  std::vector<SeparableMode> modes_;
  std::vector<Term> terms_;
  double lambda_ = 0.0;
  double scale_ = 0.0;
};

/// Uniformly sampled field with tensor-product cubic B-spline interpolation (C2).
/// Torus samples sit at i*Lx/nx (periodic spline); rectangle samples at i*Lx/(nx-1)
/// (natural end conditions).
class GridField final : public ScalarField {
 public:
  /// values[i*ny + j] = f(x_i, y_j).
  GridField(DomainSpec domain, int nx, int ny, std::vector<double> values, double lambda);

  const DomainSpec& domain() const override { return domain_; }
  double lambda() const override { return lambda_; }
  double scale() const override { return scale_; }
  int max_frequency() const override;
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const std::vector<double>& values() const { return values_; }

  Jet jet_unchecked(const Point& p) const override;
  double value_unchecked(const Point& p) const override;
  Vec2 gradient_unchecked(const Point& p) const override;
  std::shared_ptr<const ScalarField> periodic_extension() const override;

 private:
  double hx() const;
  double hy() const;
  // Coefficient lookup with periodic wrap or natural-end ghost extrapolation.
  double coef(int i, int j) const;
  template <int Order>
  void eval_impl(const Point& p, double* out) const;

  DomainSpec domain_;
  int nx_, ny_;
  std::vector<double> values_;
  std::vector<double> coefs_;
  double lambda_;
  double scale_ = 0.0;
};

/// Continue a Dirichlet rectangle eigenfunction to the (2Lx, 2Ly) torus by odd
/// reflection. Torus inputs are returned unchanged.
std::shared_ptr<const AnalyticEigenfunction> extend(const AnalyticEigenfunction& f);

/// Exact samples of f on the grid used by GridField for this domain.
std::shared_ptr<const GridField> sample(const AnalyticEigenfunction& f, int nx, int ny);

/// Convenience constructors for the separable families.
std::shared_ptr<const AnalyticEigenfunction> torus_cos_cos(int nx, int ny, double lx = 1.0,
                                                           double ly = 1.0);
std::shared_ptr<const AnalyticEigenfunction> rectangle_sin_sin(int nx, int ny, double lx = 1.0,
                                                               double ly = 1.0);
/// sin(2r x) sin(y) + c sin(x) sin(2r y) on the Dirichlet square of edge pi.
std::shared_ptr<const AnalyticEigenfunction> stern_field(int r, double coefficient);

}  // namespace neumann
