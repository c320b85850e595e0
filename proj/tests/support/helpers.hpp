#pragma once

#include <cmath>
#include <vector>

#include "npcmaj/geometry.hpp"
#include "npcmaj/linalg.hpp"
#include "npcmaj/space.hpp"

namespace npcmaj::test {

inline Point e1(double x) { return Point::euclidean({x}); }
inline Point e2(double x, double y) { return Point::euclidean({x, y}); }
inline Point hp(double re, double im) { return Point::half_plane(re, im); }
inline Point spd_diag(double a, double b) { return Point::spd(Matrix::diagonal(std::vector<double>{a, b})); }
inline Point spd_rows(std::vector<std::vector<double>> rows) { return Point::spd(Matrix::from_rows(rows)); }

inline std::vector<Point> e1s(std::initializer_list<double> xs) {
  std::vector<Point> out;
  for (double x : xs) out.push_back(e1(x));
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

/// The spaces exercised by property tests.
inline std::vector<Space> model_spaces() {
  return {Space::euclidean(2), Space::half_plane(), Space::spd(2),
          Space::product({Space::euclidean(1), Space::half_plane()})};
}

/// Composite Simpson rule.
template <class F>
double simpson(F f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Minimizer of a unimodal function on [a, b].
template <class F>
double golden_section(F f, double a, double b, double tol = 1e-12) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace npcmaj::test

#include <optional>

#include "npcmaj/error.hpp"

namespace npcmaj::test {

/// Error code thrown by `f`, or nullopt when it returns normally.
template <class F>
std::optional<ErrorCode> code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace npcmaj::test
