#include "npcmaj/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "npcmaj/error.hpp"

namespace npcmaj {
namespace {

using Complex = std::complex<double>;

constexpr double kMinImaginary = 1e-12;
constexpr double kSymmetryTol = 1e-12;
constexpr double kEigenFloor = 1e-12;

std::string kind_name(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Euclidean: return "Euclidean";
    case SpaceKind::HalfPlane: return "HalfPlane";
    case SpaceKind::Spd: return "Spd";
    case SpaceKind::Product: return "Product";
    case SpaceKind::Wasserstein1D: return "Wasserstein1D";
  }
  return "?";
}

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

// ---------------------------------------------------------------------------
// Spd helpers

struct SqrtPair {
  Matrix sqrt;
  Matrix inv_sqrt;
};

SqrtPair sqrt_pair(const Matrix& b) {
  const SymmetricEigen eig = symmetric_eigen(b);
  return {spectral_apply(eig, [](double l) { return std::sqrt(l); }),
          spectral_apply(eig, [](double l) { return 1.0 / std::sqrt(l); })};
}

Matrix congruence(const Matrix& outer, const Matrix& inner) {
  return symmetrize(outer * inner * outer);
}

Matrix tangent_matrix(const TangentVector& v, std::size_t n) {
  Matrix m(n, n);
  std::copy(v.values.begin(), v.values.end(), m.data().begin());
  return m;
}

std::vector<double> matrix_values(const Matrix& m) { return {m.data().begin(), m.data().end()}; }

double spd_distance(const Matrix& a, const Matrix& b) {
  // Eigenvalues of A B^{-1} coincide with those of B^{-1/2} A B^{-1/2}.
  const Matrix b_inv_sqrt = sqrt_pair(b).inv_sqrt;
  const SymmetricEigen eig = symmetric_eigen(congruence(b_inv_sqrt, a));
  double sum = 0.0;
  for (double l : eig.values) {
    const double lg = std::log(l);
    sum += lg * lg;
  }
  return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// Half-plane helpers. The affine map z -> (z - re)/im sends the base point to
// i, and the Cayley transform (w - i)/(w + i) sends i to the disk centre where
// geodesics through the centre are rays.

Complex to_unit_frame(const HalfPlanePoint& base, const HalfPlanePoint& p) {
  return {(p.re - base.re) / base.im, p.im / base.im};
}

HalfPlanePoint from_unit_frame(const HalfPlanePoint& base, Complex w) {
  return {base.re + base.im * w.real(), base.im * w.imag()};
}

double half_plane_distance(const HalfPlanePoint& p, const HalfPlanePoint& q) {
  const double dx = p.re - q.re;
  const double dy = p.im - q.im;
  const double chord = std::sqrt(dx * dx + dy * dy);
  // arccosh(1 + |p-q|^2 / (2 Im p Im q)) written through asinh for accuracy.
  return 2.0 * std::asinh(chord / (2.0 * std::sqrt(p.im * q.im)));
}

std::vector<double> half_plane_log(const HalfPlanePoint& base, const HalfPlanePoint& p) {
  const Complex w = to_unit_frame(base, p);
  const Complex zeta = (w - Complex(0, 1)) / (w + Complex(0, 1));
  const double r = std::abs(zeta);
  if (r == 0.0) return {0.0, 0.0};
  const double d = half_plane_distance(base, p);
  const Complex u = Complex(0, 1) * zeta / r;
  return {base.im * d * u.real(), base.im * d * u.imag()};
}

HalfPlanePoint half_plane_exp(const HalfPlanePoint& base, double vx, double vy) {
  const double len = std::hypot(vx, vy);
  if (len == 0.0) return base;
  const double s = len / base.im;
  const Complex u(vx / len, vy / len);
  const Complex zeta = std::tanh(0.5 * s) * (Complex(0, -1) * u);
  const Complex w = Complex(0, 1) * (1.0 + zeta) / (1.0 - zeta);
  return from_unit_frame(base, w);
}

// ---------------------------------------------------------------------------
// Wasserstein1D helpers

std::vector<double> tangent_on(const TangentVector& v, std::span<const double> grid) {
  std::vector<double> out(grid.size() - 1);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double mid = 0.5 * (grid[k] + grid[k + 1]);
    auto it = std::lower_bound(v.grid.begin() + 1, v.grid.end(), mid);
    std::size_t cell = static_cast<std::size_t>(it - v.grid.begin()) - 1;
    cell = std::min(cell, v.values.size() - 1);
    out[k] = v.values[cell];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unchecked kernels: inputs already validated.

double distance_impl(const Space& space, const Point& p, const Point& q);

double distance_impl(const Space& space, const Point& p, const Point& q) {
  if (p == q) return 0.0;
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      const auto& a = p.coords();
      const auto& b = q.coords();
      double sum = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
      return std::sqrt(sum);
    }
    case SpaceKind::HalfPlane: return half_plane_distance(p.half_plane(), q.half_plane());
    case SpaceKind::Spd: {
      // Fixed operand order makes the result exactly symmetric.
      return canonical_less(p, q) ? spd_distance(p.matrix(), q.matrix())
                                  : spd_distance(q.matrix(), p.matrix());
    }
    case SpaceKind::Product: {
      double sum = 0.0;
      const auto factors = space.factors();
      for (std::size_t k = 0; k < factors.size(); ++k) {
        const double dk = distance_impl(factors[k], p.parts()[k], q.parts()[k]);
        sum += dk * dk;
      }
      return std::sqrt(sum);
    }
    case SpaceKind::Wasserstein1D: return std::sqrt(w2_squared_exact(p.measure(), q.measure()));
  }
  return 0.0;
}

TangentVector log_impl(const Space& space, const Point& base, const Point& p) {
  TangentVector v;
  v.base = base;
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      const auto& a = base.coords();
      const auto& b = p.coords();
      v.values.resize(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) v.values[k] = b[k] - a[k];
      break;
    }
    case SpaceKind::HalfPlane: v.values = half_plane_log(base.half_plane(), p.half_plane()); break;
    case SpaceKind::Spd: {
      const SqrtPair sp = sqrt_pair(base.matrix());
      const SymmetricEigen eig = symmetric_eigen(congruence(sp.inv_sqrt, p.matrix()));
      const Matrix log_s = spectral_apply(eig, [](double l) { return std::log(l); });
      v.values = matrix_values(congruence(sp.sqrt, log_s));
      break;
    }
    case SpaceKind::Product: {
      const auto factors = space.factors();
      for (std::size_t k = 0; k < factors.size(); ++k) {
        v.parts.push_back(log_impl(factors[k], base.parts()[k], p.parts()[k]));
      }
      break;
    }
    case SpaceKind::Wasserstein1D: {
      const Measure1D& b = base.measure();
      const Measure1D& m = p.measure();
      v.grid = merge_breaks(b.breaks(), m.breaks());
      const auto qb = quantile_on(b, v.grid);
      const auto qm = quantile_on(m, v.grid);
      v.values.resize(qb.size());
      for (std::size_t k = 0; k < qb.size(); ++k) v.values[k] = qm[k] - qb[k];
      break;
    }
  }
  return v;
}

Point exp_impl(const Space& space, const Point& base, const TangentVector& v) {
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      std::vector<double> out = base.coords();
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += v.values[k];
      return Point::euclidean(std::move(out));
    }
    case SpaceKind::HalfPlane: {
      const HalfPlanePoint q = half_plane_exp(base.half_plane(), v.values[0], v.values[1]);
      if (!(q.im > 0.0) || !std::isfinite(q.re)) {
        fail(ErrorCode::InvalidPoint, "exp_map left the half-plane (im ≤ 0)");
      }
      return Point::half_plane(q.re, q.im);
    }
    case SpaceKind::Spd: {
      const std::size_t n = space.param();
      const SqrtPair sp = sqrt_pair(base.matrix());
      const Matrix w = congruence(sp.inv_sqrt, tangent_matrix(v, n));
      const Matrix exp_w = spectral_apply(symmetric_eigen(w), [](double l) { return std::exp(l); });
      return Point::spd(congruence(sp.sqrt, exp_w));
    }
    case SpaceKind::Product: {
      std::vector<Point> parts;
      const auto factors = space.factors();
      for (std::size_t k = 0; k < factors.size(); ++k) {
        parts.push_back(exp_impl(factors[k], base.parts()[k], v.parts[k]));
      }
      return Point::product(std::move(parts));
    }
    case SpaceKind::Wasserstein1D: {
      const Measure1D& b = base.measure();
      const std::vector<double> grid = merge_breaks(b.breaks(), v.grid);
      std::vector<double> values = quantile_on(b, grid);
      const std::vector<double> shift = tangent_on(v, grid);
      double magnitude = 1.0;
      for (std::size_t k = 0; k < values.size(); ++k) {
        values[k] += shift[k];
        magnitude = std::max(magnitude, std::abs(values[k]));
      }
      for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] < values[k - 1] - 1e-12 * magnitude) {
          fail(ErrorCode::InvalidPoint, "exp_map: displaced quantile is not monotone");
        }
        values[k] = std::max(values[k], values[k - 1]);
      }
      return Point::measure(measure_from_quantile(grid, values));
    }
  }
  return base;
}

Point geodesic_impl(const Space& space, const Point& p, const Point& q, double t) {
  if (t == 0.0 || p == q) return p;
  if (t == 1.0) return q;
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      const auto& a = p.coords();
      const auto& b = q.coords();
      std::vector<double> out(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) out[k] = (1.0 - t) * a[k] + t * b[k];
      return Point::euclidean(std::move(out));
    }
    case SpaceKind::HalfPlane: {
      const HalfPlanePoint& base = p.half_plane();
      const Complex w = to_unit_frame(base, q.half_plane());
      const Complex zeta = (w - Complex(0, 1)) / (w + Complex(0, 1));
      const double r = std::abs(zeta);
      const Complex zt = std::tanh(t * std::atanh(r)) * (zeta / r);
      const HalfPlanePoint out = from_unit_frame(base, Complex(0, 1) * (1.0 + zt) / (1.0 - zt));
      return Point::half_plane(out.re, out.im);
    }
    case SpaceKind::Spd: {
      const SqrtPair sp = sqrt_pair(p.matrix());
      const SymmetricEigen eig = symmetric_eigen(congruence(sp.inv_sqrt, q.matrix()));
      const Matrix power = spectral_apply(eig, [t](double l) { return std::pow(l, t); });
      return Point::spd(congruence(sp.sqrt, power));
    }
    case SpaceKind::Product: {
      std::vector<Point> parts;
      const auto factors = space.factors();
      for (std::size_t k = 0; k < factors.size(); ++k) {
        parts.push_back(geodesic_impl(factors[k], p.parts()[k], q.parts()[k], t));
      }
      return Point::product(std::move(parts));
    }
    case SpaceKind::Wasserstein1D: {
      const Measure1D& a = p.measure();
      const Measure1D& b = q.measure();
      const std::vector<double> grid = merge_breaks(a.breaks(), b.breaks());
      const auto qa = quantile_on(a, grid);
      const auto qb = quantile_on(b, grid);
      std::vector<double> values(qa.size());
      for (std::size_t k = 0; k < qa.size(); ++k) values[k] = (1.0 - t) * qa[k] + t * qb[k];
      return Point::measure(measure_from_quantile(grid, values));
    }
  }
  return p;
}

double inner_impl(const Space& space, const TangentVector& u, const TangentVector& v) {
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      double s = 0.0;
      for (std::size_t k = 0; k < u.values.size(); ++k) s += u.values[k] * v.values[k];
      return s;
    }
    case SpaceKind::HalfPlane: {
      const double y = u.base.half_plane().im;
      return (u.values[0] * v.values[0] + u.values[1] * v.values[1]) / (y * y);
    }
    case SpaceKind::Spd: {
      const std::size_t n = space.param();
      const Matrix inv_sqrt = sqrt_pair(u.base.matrix()).inv_sqrt;
      const Matrix a = congruence(inv_sqrt, tangent_matrix(u, n));
      const Matrix b = congruence(inv_sqrt, tangent_matrix(v, n));
      double s = 0.0;
      for (std::size_t k = 0; k < n * n; ++k) s += a.data()[k] * b.data()[k];
      return s;
    }
    case SpaceKind::Product: {
      double s = 0.0;
      const auto factors = space.factors();
      for (std::size_t k = 0; k < factors.size(); ++k) s += inner_impl(factors[k], u.parts[k], v.parts[k]);
      return s;
    }
    case SpaceKind::Wasserstein1D: {
      const std::vector<double> grid = merge_breaks(u.grid, v.grid);
      const auto a = tangent_on(u, grid);
      const auto b = tangent_on(v, grid);
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += (grid[k + 1] - grid[k]) * a[k] * b[k];
      return s;
    }
  }
  return 0.0;
}

void axpy_impl(const Space& space, TangentVector& acc, double weight, const TangentVector& v) {
  switch (space.kind()) {
    case SpaceKind::Product: {
      const auto factors = space.factors();
      for (std::size_t k = 0; k < factors.size(); ++k) axpy_impl(factors[k], acc.parts[k], weight, v.parts[k]);
      return;
    }
    case SpaceKind::Wasserstein1D: {
      const std::vector<double> grid = merge_breaks(acc.grid, v.grid);
      std::vector<double> a = tangent_on(acc, grid);
      const auto b = tangent_on(v, grid);
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += weight * b[k];
      acc.grid = grid;
      acc.values = std::move(a);
      return;
    }
    default:
      for (std::size_t k = 0; k < acc.values.size(); ++k) acc.values[k] += weight * v.values[k];
  }
}

TangentVector zero_impl(const Space& space, const Point& base) {
  TangentVector v;
  v.base = base;
  switch (space.kind()) {
    case SpaceKind::Euclidean: v.values.assign(space.param(), 0.0); break;
    case SpaceKind::HalfPlane: v.values.assign(2, 0.0); break;
    case SpaceKind::Spd: v.values.assign(space.param() * space.param(), 0.0); break;
    case SpaceKind::Product: {
      const auto factors = space.factors();
      for (std::size_t k = 0; k < factors.size(); ++k) v.parts.push_back(zero_impl(factors[k], base.parts()[k]));
      break;
    }
    case SpaceKind::Wasserstein1D:
      v.grid = {0.0, 1.0};
      v.values = {0.0};
      break;
  }
  return v;
}

Validation validate_tangent(const Space& space, const TangentVector& v) {
  switch (space.kind()) {
    case SpaceKind::Product: {
      const auto factors = space.factors();
      if (v.parts.size() != factors.size()) return Validation::reject("tangent arity mismatch");
      for (std::size_t k = 0; k < factors.size(); ++k) {
        if (auto r = validate_tangent(factors[k], v.parts[k]); !r) return r;
      }
      return Validation::pass();
    }
    case SpaceKind::Wasserstein1D:
      if (v.values.empty() || v.grid.size() != v.values.size() + 1) {
        return Validation::reject("tangent grid/value size mismatch");
      }
      break;
    case SpaceKind::Euclidean:
      if (v.values.size() != space.param()) return Validation::reject("tangent length mismatch");
      break;
    case SpaceKind::HalfPlane:
      if (v.values.size() != 2) return Validation::reject("tangent length mismatch");
      break;
    case SpaceKind::Spd:
      if (v.values.size() != space.param() * space.param()) {
        return Validation::reject("tangent length mismatch");
      }
      break;
  }
  if (!all_finite(v.values)) return Validation::reject("non-finite tangent component");
  return Validation::pass();
}

void require_tangent(const Space& space, const Point& base, const TangentVector& v) {
  if (!(v.base == base)) fail(ErrorCode::BaseMismatch, "tangent vector is attached to a different base point");
  if (auto r = validate_tangent(space, v); !r) fail(ErrorCode::DimensionMismatch, r.diagnostic);
}

}  // namespace

Validation validate_point(const Space& space, const Point& p) {
  if (p.kind() != space.kind()) {
    return Validation::reject("expected a " + kind_name(space.kind()) + " point, got " + kind_name(p.kind()));
  }
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      const auto& c = p.coords();
      if (c.size() != space.param()) {
        return Validation::reject("expected " + std::to_string(space.param()) + " coordinates, got " +
                                  std::to_string(c.size()));
      }
      if (!all_finite(c)) return Validation::reject("non-finite coordinate");
      return Validation::pass();
    }
    case SpaceKind::HalfPlane: {
      const auto& h = p.half_plane();
      if (!std::isfinite(h.re) || !std::isfinite(h.im)) return Validation::reject("non-finite coordinate");
      if (h.im <= 0.0) return Validation::reject("im ≤ 0");
      if (h.im < kMinImaginary) return Validation::reject("im < 1e-12");
      return Validation::pass();
    }
    case SpaceKind::Spd: {
      const Matrix& m = p.matrix();
      const std::size_t n = space.param();
      if (m.rows() != n || m.cols() != n) {
        return Validation::reject("expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
      }
      if (!all_finite(m.data())) return Validation::reject("non-finite entry");
      if (p.input_asymmetry() > kSymmetryTol) return Validation::reject("not symmetric");
      const SymmetricEigen eig = symmetric_eigen(m);
      const double lo = eig.values.front();
      const double hi = eig.values.back();
      if (lo <= 0.0) return Validation::reject("eigenvalue ≤ 0");
      if (lo < kEigenFloor * hi) return Validation::reject("eigenvalue < 1e-12·λmax");
      return Validation::pass();
    }
    case SpaceKind::Product: {
      const auto factors = space.factors();
      const auto& parts = p.parts();
      if (parts.size() != factors.size()) {
        return Validation::reject("expected " + std::to_string(factors.size()) + " components, got " +
                                  std::to_string(parts.size()));
      }
      for (std::size_t k = 0; k < factors.size(); ++k) {
        if (auto r = validate_point(factors[k], parts[k]); !r) {
          return Validation::reject("component " + std::to_string(k) + ": " + r.diagnostic);
        }
      }
      return Validation::pass();
    }
    case SpaceKind::Wasserstein1D: {
      const Measure1D& m = p.measure();
      if (m.size() == 0) return Validation::reject("empty measure");
      return Validation::pass();
    }
  }
  return Validation::pass();
}

void require_point(const Space& space, const Point& p) {
  if (p.kind() != space.kind()) {
    fail(ErrorCode::SpaceMismatch,
         "point of kind " + kind_name(p.kind()) + " used in space " + space.describe());
  }
  if (auto r = validate_point(space, p); !r) fail(ErrorCode::InvalidPoint, r.diagnostic);
}

double distance(const Space& space, const Point& p, const Point& q) {
  require_point(space, p);
  require_point(space, q);
  return distance_impl(space, p, q);
}

Point geodesic_point(const Space& space, const Point& p, const Point& q, double t) {
  require_point(space, p);
  require_point(space, q);
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream msg;
    msg << "geodesic parameter " << t << " outside [0, 1]";
    fail(ErrorCode::ParameterOutOfRange, msg.str());
  }
  return geodesic_impl(space, p, q, t);
}

Point midpoint(const Space& space, const Point& p, const Point& q) {
  return geodesic_point(space, p, q, 0.5);
}

TangentVector log_map(const Space& space, const Point& base, const Point& p) {
  require_point(space, base);
  require_point(space, p);
  if (base == p) return zero_impl(space, base);
  return log_impl(space, base, p);
}

Point exp_map(const Space& space, const Point& base, const TangentVector& v) {
  require_point(space, base);
  require_tangent(space, base, v);
  Point out = exp_impl(space, base, v);
  if (auto r = validate_point(space, out); !r) fail(ErrorCode::InvalidPoint, "exp_map result: " + r.diagnostic);
  return out;
}

TangentVector zero_tangent(const Space& space, const Point& base) {
  require_point(space, base);
  return zero_impl(space, base);
}

double tangent_inner(const Space& space, const TangentVector& u, const TangentVector& v) {
  if (!(u.base == v.base)) fail(ErrorCode::BaseMismatch, "inner product of tangents at different bases");
  return inner_impl(space, u, v);
}

double tangent_norm(const Space& space, const TangentVector& v) {
  return std::sqrt(std::max(0.0, inner_impl(space, v, v)));
}

void tangent_axpy(const Space& space, TangentVector& acc, double weight, const TangentVector& v) {
  if (!(acc.base == v.base)) fail(ErrorCode::BaseMismatch, "adding tangents at different bases");
  axpy_impl(space, acc, weight, v);
}

TangentVector tangent_scaled(const Space& space, const TangentVector& v, double factor) {
  TangentVector out = zero_impl(space, v.base);
  axpy_impl(space, out, factor, v);
  return out;
}

double instance_scale(const Space& space, std::span<const Point> points) {
  double scale = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      scale = std::max(scale, distance(space, points[i], points[j]));
  return std::max(scale, 1e-12);
}

Point reference_point(const Space& space) {
  switch (space.kind()) {
    case SpaceKind::Euclidean: return Point::euclidean(std::vector<double>(space.param(), 0.0));
    case SpaceKind::HalfPlane: return Point::half_plane(0.0, 1.0);
    case SpaceKind::Spd: return Point::spd(Matrix::identity(space.param()));
    case SpaceKind::Wasserstein1D: return Point::measure(Measure1D::dirac(0.0));
    case SpaceKind::Product: {
      std::vector<Point> parts;
      for (const Space& f : space.factors()) parts.push_back(reference_point(f));
      return Point::product(std::move(parts));
    }
  }
  return {};
}

}  // namespace npcmaj
