#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "npcmaj/linalg.hpp"
#include "npcmaj/measure1d.hpp"

namespace npcmaj {

enum class SpaceKind { Euclidean, HalfPlane, Spd, Product, Wasserstein1D };

// Descriptor of one of the supported global NPC spaces. Immutable value.
class Space {
 public:
  /// Euclidean(1).
  Space() = default;

  static Space euclidean(std::size_t dim);
  static Space half_plane();
  static Space spd(std::size_t order);
  static Space product(std::vector<Space> factors);
  /// `support_size` is the atom count used when sampling random points;
  /// points of any support size belong to the space.
  static Space wasserstein1d(std::size_t support_size);

  SpaceKind kind() const noexcept { return kind_; }
  /// Euclidean dimension, Spd order, or Wasserstein1D support size.
  std::size_t param() const noexcept { return param_; }
  std::span<const Space> factors() const noexcept { return factors_; }

  bool is_euclidean() const noexcept { return kind_ == SpaceKind::Euclidean; }

  /// Compact text form: "euclidean:2", "halfplane", "spd:2", "wasserstein1d:3",
  /// "product(euclidean:1,halfplane)".
  std::string describe() const;
  static Space parse(const std::string& text);

  friend bool operator==(const Space& a, const Space& b);

 private:
  Space(SpaceKind kind, std::size_t param, std::vector<Space> factors);

  SpaceKind kind_ = SpaceKind::Euclidean;
  std::size_t param_ = 1;
  std::vector<Space> factors_;
};

struct HalfPlanePoint {
  double re = 0.0;
  double im = 1.0;
  friend bool operator==(const HalfPlanePoint&, const HalfPlanePoint&) = default;
};

class Point;

struct ProductPoint {
  std::vector<Point> parts;
};

// Element of a Space. The payload kind must match the space it is used with;
// geometric validity (im > 0, positive definiteness, ...) is checked by the
// geometry operations, not at construction.
class Point {
 public:
  using Payload = std::variant<std::vector<double>, HalfPlanePoint, Matrix, ProductPoint, Measure1D>;

  Point() = default;

  static Point euclidean(std::vector<double> coords);
  static Point half_plane(double re, double im);
  /// Stores (S + S^T)/2; the raw asymmetry is kept for validation.
  static Point spd(const Matrix& s);
  static Point product(std::vector<Point> parts);
  static Point measure(Measure1D m);

  SpaceKind kind() const;

  const std::vector<double>& coords() const;
  const HalfPlanePoint& half_plane() const;
  const Matrix& matrix() const;
  const std::vector<Point>& parts() const;
  const Measure1D& measure() const;

  /// Asymmetry of the matrix handed to `spd()` before symmetrization.
  double input_asymmetry() const noexcept { return input_asymmetry_; }

  const Payload& payload() const noexcept { return payload_; }

  friend bool operator==(const Point& a, const Point& b);
  /// Strict total order on payloads of the same kind (lexicographic).
  friend bool canonical_less(const Point& a, const Point& b);

 private:
  explicit Point(Payload payload) : payload_(std::move(payload)) {}

  Payload payload_ = std::vector<double>{};
  double input_asymmetry_ = 0.0;
};

// Tangent vector at `base`, stored in ambient coordinates:
//   Euclidean      values = coordinates
//   HalfPlane      values = (dx, dy)
//   Spd            values = symmetric matrix, row-major
//   Wasserstein1D  values[k] = displacement of the quantile on (grid[k], grid[k+1]]
//   Product        parts = component tangents
struct TangentVector {
  Point base;
  std::vector<double> values;
  std::vector<double> grid;
  std::vector<TangentVector> parts;
};

}  // namespace npcmaj
