#pragma once

#include <span>
#include <string>

#include "npcmaj/space.hpp"

namespace npcmaj {

struct Validation {
  bool ok = true;
  std::string diagnostic;

  explicit operator bool() const noexcept { return ok; }
  static Validation pass() { return {}; }
  static Validation reject(std::string why) { return {false, std::move(why)}; }
};

/// Reports the first violated invariant of `p` as an element of `space`
/// (for example "im ≤ 0" or "eigenvalue ≤ 0"). Never throws.
Validation validate_point(const Space& space, const Point& p);

/// Throws InvalidPoint / SpaceMismatch with the diagnostic from validate_point.
void require_point(const Space& space, const Point& p);

double distance(const Space& space, const Point& p, const Point& q);

/// Point at parameter t in [0, 1] on the geodesic from p to q.
Point geodesic_point(const Space& space, const Point& p, const Point& q, double t);
Point midpoint(const Space& space, const Point& p, const Point& q);

TangentVector log_map(const Space& space, const Point& base, const Point& p);
Point exp_map(const Space& space, const Point& base, const TangentVector& v);

TangentVector zero_tangent(const Space& space, const Point& base);
double tangent_inner(const Space& space, const TangentVector& u, const TangentVector& v);
double tangent_norm(const Space& space, const TangentVector& v);
/// acc += weight * v; both must share the same base point.
void tangent_axpy(const Space& space, TangentVector& acc, double weight, const TangentVector& v);
TangentVector tangent_scaled(const Space& space, const TangentVector& v, double factor);

/// Largest pairwise distance among `points`, floored at 1e-12.
double instance_scale(const Space& space, std::span<const Point> points);

/// Canonical base point: origin, i, identity, delta at 0, or the tuple of those.
Point reference_point(const Space& space);

}  // namespace npcmaj
