#include "neumann/field.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>

namespace neumann {

namespace {

std::atomic<int> g_jobs{0};

double wrap(double v, double period) {
  double r = std::fmod(v, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

}  // namespace

void set_jobs(int jobs) { g_jobs = jobs; }

int jobs() {
  int j = g_jobs.load();
  if (j > 0) return j;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("NEUMANN_LOG");
    if (!env) return 0;
    std::string s(env);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return std::atoi(env);
  }();
  return level;
}

// ---------------------------------------------------------------- DomainSpec

DomainSpec DomainSpec::torus(double lx, double ly) {
  if (!(lx > 0) || !(ly > 0)) throw Error(ErrorCode::InvalidField, "domain extents must be positive");
  return {DomainKind::Torus, lx, ly};
}

DomainSpec DomainSpec::rectangle(double lx, double ly) {
  if (!(lx > 0) || !(ly > 0)) throw Error(ErrorCode::InvalidField, "domain extents must be positive");
  return {DomainKind::RectangleDirichlet, lx, ly};
}

Point DomainSpec::canonical(const Point& p) const {
  if (!periodic()) return p;
  return Point(wrap(p.x(), lx), wrap(p.y(), ly));
}

Vec2 DomainSpec::displacement(const Point& a, const Point& b) const {
  Vec2 d = b - a;
  if (periodic()) {
    d.x() -= lx * std::round(d.x() / lx);
    d.y() -= ly * std::round(d.y() / ly);
  }
  return d;
}

double DomainSpec::distance(const Point& a, const Point& b) const { return displacement(a, b).norm(); }

bool DomainSpec::contains(const Point& p, double tol) const {
  if (periodic()) return std::isfinite(p.x()) && std::isfinite(p.y());
  return p.x() >= -tol && p.x() <= lx + tol && p.y() >= -tol && p.y() <= ly + tol;
}

Point DomainSpec::nearest_image(const Point& p, const Point& reference) const {
  if (!periodic()) return p;
  return reference + displacement(reference, p);
}

// ---------------------------------------------------------------- ScalarField

void ScalarField::check_inside(const Point& p) const {
  const auto& d = domain();
  if (!d.periodic() && !d.contains(p, 1e-12 * d.min_extent())) {
    std::ostringstream os;
    os << "(" << p.x() << ", " << p.y() << ") is outside [0," << d.lx << "]x[0," << d.ly << "]";
    throw Error(ErrorCode::PointOutsideDomain, os.str());
  }
}

double ScalarField::eval(const Point& p) const {
  check_inside(p);
  return value_unchecked(domain().canonical(p));
}

Vec2 ScalarField::grad(const Point& p) const {
  check_inside(p);
  return gradient_unchecked(domain().canonical(p));
}

Mat2 ScalarField::hessian(const Point& p) const {
  check_inside(p);
  return jet_unchecked(domain().canonical(p)).hessian;
}

// ---------------------------------------------------------------- AnalyticEigenfunction

AnalyticEigenfunction::AnalyticEigenfunction(DomainSpec domain, std::vector<SeparableMode> modes)
    : domain_(domain), modes_(std::move(modes)) {
  if (!(domain_.lx > 0) || !(domain_.ly > 0))
    throw Error(ErrorCode::InvalidField, "domain extents must be positive");
  if (modes_.empty()) throw Error(ErrorCode::InvalidField, "mode list is empty");
  for (const auto& m : modes_) {
    if (m.nx < 0 || m.ny < 0) throw Error(ErrorCode::InvalidField, "mode numbers must be nonnegative");
    if (domain_.kind == DomainKind::RectangleDirichlet) {
      if (m.px != Parity::Sin || m.py != Parity::Sin || m.nx < 1 || m.ny < 1)
        throw Error(ErrorCode::InvalidField, "Dirichlet rectangle modes must be sine-sine with n >= 1");
    } else {
      if ((m.px == Parity::Sin && m.nx == 0) || (m.py == Parity::Sin && m.ny == 0))
        throw Error(ErrorCode::InvalidField, "sine mode with zero wave number vanishes identically");
    }
    auto [kx, ky] = wave_numbers(m);
    terms_.push_back({m.amplitude, kx, ky, m.px, m.py});
    scale_ += std::abs(m.amplitude);
  }
  lambda_ = terms_[0].kx * terms_[0].kx + terms_[0].ky * terms_[0].ky;
  for (const auto& t : terms_) {
    const double l = t.kx * t.kx + t.ky * t.ky;
    if (std::abs(l - lambda_) > 1e-9 * std::max(lambda_, l))
      throw Error(ErrorCode::InvalidField, "modes do not share a single Laplacian eigenvalue");
  }
  if (!(lambda_ > 0)) throw Error(ErrorCode::InvalidField, "constant mode has eigenvalue 0");
  if (!(scale_ > 0)) throw Error(ErrorCode::InvalidField, "all mode amplitudes are zero");
}

std::pair<double, double> AnalyticEigenfunction::wave_numbers(const SeparableMode& m) const {
  const double base = domain_.periodic() ? 2.0 * kPi : kPi;
  return {base * m.nx / domain_.lx, base * m.ny / domain_.ly};
}

int AnalyticEigenfunction::max_frequency() const {
  // Count oscillations per period of the searched (periodic) domain.
  int n = 1;
  for (const auto& m : modes_) n = std::max({n, m.nx, m.ny});
  return n;
}

namespace {

inline void trig(Parity p, double k, double x, double& v, double& d1, double& d2) {
  const double s = std::sin(k * x);
  const double c = std::cos(k * x);
  if (p == Parity::Cos) {
    v = c;
    d1 = -k * s;
    d2 = -k * k * c;
  } else {
    v = s;
    d1 = k * c;
    d2 = -k * k * s;
  }
}

}  // namespace

Jet AnalyticEigenfunction::jet_unchecked(const Point& p) const {
  Jet j;
  for (const auto& t : terms_) {
    double X, dX, ddX, Y, dY, ddY;
    trig(t.px, t.kx, p.x(), X, dX, ddX);
    trig(t.py, t.ky, p.y(), Y, dY, ddY);
    j.value += t.amp * X * Y;
    j.gradient.x() += t.amp * dX * Y;
    j.gradient.y() += t.amp * X * dY;
    j.hessian(0, 0) += t.amp * ddX * Y;
    j.hessian(0, 1) += t.amp * dX * dY;
    j.hessian(1, 1) += t.amp * X * ddY;
  }
  j.hessian(1, 0) = j.hessian(0, 1);
  return j;
}

double AnalyticEigenfunction::value_unchecked(const Point& p) const {
  double v = 0;
  for (const auto& t : terms_) {
    const double X = t.px == Parity::Cos ? std::cos(t.kx * p.x()) : std::sin(t.kx * p.x());
    const double Y = t.py == Parity::Cos ? std::cos(t.ky * p.y()) : std::sin(t.ky * p.y());
    v += t.amp * X * Y;
  }
  return v;
}

Vec2 AnalyticEigenfunction::gradient_unchecked(const Point& p) const {
  Vec2 g = Vec2::Zero();
  for (const auto& t : terms_) {
    const double sx = std::sin(t.kx * p.x()), cx = std::cos(t.kx * p.x());
    const double sy = std::sin(t.ky * p.y()), cy = std::cos(t.ky * p.y());
    const double X = t.px == Parity::Cos ? cx : sx;
    const double dX = t.px == Parity::Cos ? -t.kx * sx : t.kx * cx;
    const double Y = t.py == Parity::Cos ? cy : sy;
    const double dY = t.py == Parity::Cos ? -t.ky * sy : t.ky * cy;
    g.x() += t.amp * dX * Y;
    g.y() += t.amp * X * dY;
  }
  return g;
}

std::shared_ptr<const ScalarField> AnalyticEigenfunction::periodic_extension() const {
  if (domain_.periodic()) return shared_from_this();
  return extend(*this);
}

std::shared_ptr<const AnalyticEigenfunction> extend(const AnalyticEigenfunction& f) {
  if (f.domain().periodic()) return std::make_shared<AnalyticEigenfunction>(f.domain(), f.modes());
  // sin(pi n x / L) is odd about 0 and L, so it is already the 2L-periodic odd reflection.
  return std::make_shared<AnalyticEigenfunction>(DomainSpec::torus(2 * f.domain().lx, 2 * f.domain().ly),
                                                 f.modes());
}

std::shared_ptr<const AnalyticEigenfunction> torus_cos_cos(int nx, int ny, double lx, double ly) {
  return std::make_shared<AnalyticEigenfunction>(DomainSpec::torus(lx, ly),
                                                 std::vector<SeparableMode>{{1.0, nx, ny, Parity::Cos, Parity::Cos}});
}

std::shared_ptr<const AnalyticEigenfunction> rectangle_sin_sin(int nx, int ny, double lx, double ly) {
  return std::make_shared<AnalyticEigenfunction>(DomainSpec::rectangle(lx, ly),
                                                 std::vector<SeparableMode>{{1.0, nx, ny, Parity::Sin, Parity::Sin}});
}

std::shared_ptr<const AnalyticEigenfunction> stern_field(int r, double coefficient) {
  return std::make_shared<AnalyticEigenfunction>(
      DomainSpec::rectangle(kPi, kPi),
      std::vector<SeparableMode>{{1.0, 2 * r, 1, Parity::Sin, Parity::Sin},
                                 {coefficient, 1, 2 * r, Parity::Sin, Parity::Sin}});
}

// ---------------------------------------------------------------- GridField

namespace {

// Solve the periodic system (c[i-1] + 4 c[i] + c[i+1]) / 6 = f[i].
void solve_periodic_spline(std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  if (n == 1) return;
  if (n == 2) {
    // (c1 + 4 c0 + c1)/6 = f0, (c0 + 4 c1 + c0)/6 = f1
    const double f0 = v[0], f1 = v[1];
    // [4 2; 2 4]/6 c = f
    const double det = (16.0 - 4.0) / 36.0;
    v[0] = (4.0 / 6 * f0 - 2.0 / 6 * f1) / det;
    v[1] = (4.0 / 6 * f1 - 2.0 / 6 * f0) / det;
    return;
  }
  // Sherman-Morrison on the cyclic tridiagonal system with a = c = 1/6, b = 4/6.
  const double a = 1.0 / 6, b = 4.0 / 6, c = 1.0 / 6;
  const double gamma = -b;
  std::vector<double> diag(n, b), u(n, 0.0);
  diag[0] = b - gamma;
  diag[n - 1] = b - a * c / gamma;
  u[0] = gamma;
  u[n - 1] = c;
  auto thomas = [&](std::vector<double>& rhs) {
    std::vector<double> cp(n), dp(n);
    cp[0] = c / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (int i = 1; i < n; ++i) {
      const double m = diag[i] - a * cp[i - 1];
      cp[i] = c / m;
      dp[i] = (rhs[i] - a * dp[i - 1]) / m;
    }
    rhs[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = dp[i] - cp[i] * rhs[i + 1];
  };
  thomas(v);
  thomas(u);
  const double fact = (v[0] + a * v[n - 1] / gamma) / (1.0 + u[0] + a * u[n - 1] / gamma);
  for (int i = 0; i < n; ++i) v[i] -= fact * u[i];
}

// Natural spline: c[0] = f[0], c[n-1] = f[n-1], interior tridiagonal.
void solve_natural_spline(std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  if (n <= 2) return;
  const int m = n - 2;
  std::vector<double> rhs(m), cp(m), dp(m);
  for (int i = 0; i < m; ++i) rhs[i] = 6.0 * v[i + 1];
  rhs[0] -= v[0];
  rhs[m - 1] -= v[n - 1];
  cp[0] = 1.0 / 4.0;
  dp[0] = rhs[0] / 4.0;
  for (int i = 1; i < m; ++i) {
    const double den = 4.0 - cp[i - 1];
    cp[i] = 1.0 / den;
    dp[i] = (rhs[i] - dp[i - 1]) / den;
  }
  std::vector<double> x(m);
  x[m - 1] = dp[m - 1];
  for (int i = m - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
  for (int i = 0; i < m; ++i) v[i + 1] = x[i];
}

// Uniform cubic B-spline basis and derivatives at local parameter t in [0,1].
inline void bspline_basis(double t, double b[4], double db[4], double ddb[4]) {
  const double t2 = t * t, t3 = t2 * t, s = 1.0 - t;
  b[0] = s * s * s / 6.0;
  b[1] = (3 * t3 - 6 * t2 + 4) / 6.0;
  b[2] = (-3 * t3 + 3 * t2 + 3 * t + 1) / 6.0;
  b[3] = t3 / 6.0;
  db[0] = -s * s / 2.0;
  db[1] = (9 * t2 - 12 * t) / 6.0;
  db[2] = (-9 * t2 + 6 * t + 3) / 6.0;
  db[3] = t2 / 2.0;
  ddb[0] = s;
  ddb[1] = 3 * t - 2;
  ddb[2] = -3 * t + 1;
  ddb[3] = t;
}

}  // namespace

GridField::GridField(DomainSpec domain, int nx, int ny, std::vector<double> values, double lambda)
    : domain_(domain), nx_(nx), ny_(ny), values_(std::move(values)), lambda_(lambda) {
  const int min_n = domain_.periodic() ? 4 : 4;
  if (nx_ < min_n || ny_ < min_n) throw Error(ErrorCode::InvalidField, "grid needs at least 4 samples per axis");
  if (static_cast<long>(values_.size()) != static_cast<long>(nx_) * ny_)
    throw Error(ErrorCode::InvalidField, "grid value count does not match nx*ny");
  if (!(lambda_ > 0)) throw Error(ErrorCode::InvalidField, "grid field needs a positive lambda");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidField, "grid contains non-finite values");
    scale_ = std::max(scale_, std::abs(v));
  }
  if (!(scale_ > 0)) throw Error(ErrorCode::InvalidField, "grid field is identically zero");

  coefs_ = values_;
  auto solve = domain_.periodic() ? solve_periodic_spline : solve_natural_spline;
  std::vector<double> line;
  line.resize(nx_);
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) line[i] = coefs_[i * ny_ + j];
    solve(line);
    for (int i = 0; i < nx_; ++i) coefs_[i * ny_ + j] = line[i];
  }
  line.resize(ny_);
  for (int i = 0; i < nx_; ++i) {
    for (int j = 0; j < ny_; ++j) line[j] = coefs_[i * ny_ + j];
    solve(line);
    for (int j = 0; j < ny_; ++j) coefs_[i * ny_ + j] = line[j];
  }
}

double GridField::hx() const { return domain_.periodic() ? domain_.lx / nx_ : domain_.lx / (nx_ - 1); }
double GridField::hy() const { return domain_.periodic() ? domain_.ly / ny_ : domain_.ly / (ny_ - 1); }

int GridField::max_frequency() const {
  // Resolve oscillations at the rate implied by lambda.
  const double k = std::sqrt(lambda_);
  const double base = domain_.periodic() ? 2 * kPi : kPi;
  return std::max(1, static_cast<int>(std::ceil(k * std::max(domain_.lx, domain_.ly) / base)));
}

double GridField::coef(int i, int j) const {
  if (domain_.periodic()) {
    i = ((i % nx_) + nx_) % nx_;
    j = ((j % ny_) + ny_) % ny_;
    return coefs_[i * ny_ + j];
  }
  // Natural end conditions extend linearly: c[-1] = 2c[0]-c[1], c[n] = 2c[n-1]-c[n-2].
  auto along_j = [&](int ii, int jj) {
    if (jj < 0) return 2 * coefs_[ii * ny_] - coefs_[ii * ny_ + 1];
    if (jj >= ny_) return 2 * coefs_[ii * ny_ + ny_ - 1] - coefs_[ii * ny_ + ny_ - 2];
    return coefs_[ii * ny_ + jj];
  };
  if (i < 0) return 2 * along_j(0, j) - along_j(1, j);
  if (i >= nx_) return 2 * along_j(nx_ - 1, j) - along_j(nx_ - 2, j);
  return along_j(i, j);
}

template <int Order>
void GridField::eval_impl(const Point& p, double* out) const {
  const double u = p.x() / hx(), v = p.y() / hy();
  int i = static_cast<int>(std::floor(u));
  int j = static_cast<int>(std::floor(v));
  if (!domain_.periodic()) {
    i = std::clamp(i, 0, nx_ - 2);
    j = std::clamp(j, 0, ny_ - 2);
  }
  double bx[4], dbx[4], ddbx[4], by[4], dby[4], ddby[4];
  bspline_basis(u - i, bx, dbx, ddbx);
  bspline_basis(v - j, by, dby, ddby);
  double val = 0, gx = 0, gy = 0, hxx = 0, hxy = 0, hyy = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double c = coef(i - 1 + a, j - 1 + b);
      val += c * bx[a] * by[b];
      if constexpr (Order >= 1) {
        gx += c * dbx[a] * by[b];
        gy += c * bx[a] * dby[b];
      }
      if constexpr (Order >= 2) {
        hxx += c * ddbx[a] * by[b];
        hxy += c * dbx[a] * dby[b];
        hyy += c * bx[a] * ddby[b];
      }
    }
  }
  const double ihx = 1.0 / hx(), ihy = 1.0 / hy();
  out[0] = val;
  out[1] = gx * ihx;
  out[2] = gy * ihy;
  out[3] = hxx * ihx * ihx;
  out[4] = hxy * ihx * ihy;
  out[5] = hyy * ihy * ihy;
}

Jet GridField::jet_unchecked(const Point& p) const {
  double o[6];
  eval_impl<2>(domain_.canonical(p), o);
  Jet j;
  j.value = o[0];
  j.gradient = Vec2(o[1], o[2]);
  j.hessian << o[3], o[4], o[4], o[5];
  return j;
}

double GridField::value_unchecked(const Point& p) const {
  double o[6];
  eval_impl<0>(domain_.canonical(p), o);
  return o[0];
}

Vec2 GridField::gradient_unchecked(const Point& p) const {
  double o[6];
  eval_impl<1>(domain_.canonical(p), o);
  return Vec2(o[1], o[2]);
}

std::shared_ptr<const ScalarField> GridField::periodic_extension() const {
  if (domain_.periodic()) return std::make_shared<GridField>(*this);
  // Odd reflection: the rectangle samples 0..n-1 become a periodic grid of 2(n-1) samples.
  const int mx = 2 * (nx_ - 1), my = 2 * (ny_ - 1);
  std::vector<double> ext(static_cast<std::size_t>(mx) * my);
  for (int i = 0; i < mx; ++i) {
    const int si = i < nx_ ? i : mx - i;
    const double sx = i < nx_ ? 1.0 : -1.0;
    for (int j = 0; j < my; ++j) {
      const int sj = j < ny_ ? j : my - j;
      const double sy = j < ny_ ? 1.0 : -1.0;
      ext[static_cast<std::size_t>(i) * my + j] = sx * sy * values_[si * ny_ + sj];
    }
  }
  return std::make_shared<GridField>(DomainSpec::torus(2 * domain_.lx, 2 * domain_.ly), mx, my, std::move(ext),
                                     lambda_);
}

std::shared_ptr<const GridField> sample(const AnalyticEigenfunction& f, int nx, int ny) {
  const auto& d = f.domain();
  const double hx = d.periodic() ? d.lx / nx : d.lx / (nx - 1);
  const double hy = d.periodic() ? d.ly / ny : d.ly / (ny - 1);
  std::vector<double> v(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) v[static_cast<std::size_t>(i) * ny + j] = f.value_unchecked(Point(i * hx, j * hy));
  return std::make_shared<GridField>(d, nx, ny, std::move(v), f.lambda());
}

}  // namespace neumann
