#include <cmath>
#include <numbers>

#include "doctest.h"
#include "npcmaj/geometry.hpp"
#include "npcmaj/sampling.hpp"
#include "support/helpers.hpp"

using namespace npcmaj;
using namespace npcmaj::test;

namespace {

// Trace-metric distance of 2x2 SPD matrices from the roots of det(A - t B) = 0.
double spd2_distance_oracle(const Matrix& a, const Matrix& b) {
  const double qa = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
  const double qb = -(a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - a(0, 1) * b(1, 0) - a(1, 0) * b(0, 1));
  const double qc = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double disc = std::sqrt(std::max(qb * qb - 4 * qa * qc, 0.0));
  const double t1 = (-qb + disc) / (2 * qa);
  const double t2 = qc / (qa * t1);
  return std::hypot(std::log(t1), std::log(t2));
}

double hp_distance_oracle(const HalfPlanePoint& p, const HalfPlanePoint& q) {
  const double d2 = (p.re - q.re) * (p.re - q.re) + (p.im - q.im) * (p.im - q.im);
  return std::acosh(1.0 + d2 / (2.0 * p.im * q.im));
}

}  // namespace

TEST_CASE("distance examples") {
  CHECK(distance(Space::euclidean(2), e2(0, 0), e2(3, 4)) == doctest::Approx(5.0).epsilon(1e-15));

  const double integral = simpson([](double y) { return 1.0 / y; }, 1.0, 4.0, 4000);
  const double dh = distance(Space::half_plane(), hp(0, 1), hp(0, 4));
  CHECK(std::abs(dh - integral) < 1e-10);
  CHECK(std::abs(dh - std::log(4.0)) < 1e-14);

  const double ds = distance(Space::spd(2), spd_diag(1, 1), spd_diag(4, 4));
  CHECK(std::abs(ds - spd2_distance_oracle(Matrix::identity(2), Matrix::diagonal(std::vector<double>{4, 4}))) < 1e-13);
  CHECK(std::abs(ds - 1.960516) < 1e-6);
}

TEST_CASE("distance agrees with independent closed forms on random points") {
  Rng rng(7);
  for (int k = 0; k < 200; ++k) {
    const Point p = random_point(Space::half_plane(), rng, 2.0);
    const Point q = random_point(Space::half_plane(), rng, 2.0);
    const double d = distance(Space::half_plane(), p, q);
    CHECK(std::abs(d - hp_distance_oracle(p.half_plane(), q.half_plane())) <= 1e-9 * std::max(1.0, d));

    const Point a = random_point(Space::spd(2), rng);
    const Point b = random_point(Space::spd(2), rng);
    const double ds = distance(Space::spd(2), a, b);
    CHECK(std::abs(ds - spd2_distance_oracle(a.matrix(), b.matrix())) <= 1e-9 * std::max(1.0, ds));
    CHECK(distance(Space::spd(2), a, b) == distance(Space::spd(2), b, a));
  }
}

TEST_CASE("product distance is the l2 combination of factor distances") {
  const Space s = Space::product({Space::euclidean(1), Space::half_plane(), Space::spd(2)});
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const Point p = random_point(s, rng);
    const Point q = random_point(s, rng);
    double sq = 0.0;
    for (std::size_t f = 0; f < 3; ++f) {
      const double d = distance(s.factors()[f], p.parts()[f], q.parts()[f]);
      sq += d * d;
    }
    CHECK(std::abs(distance(s, p, q) - std::sqrt(sq)) <= 1e-12 * std::sqrt(sq));
  }
}

TEST_CASE("geodesic and midpoint examples") {
  CHECK(geodesic_point(Space::euclidean(1), e1(0), e1(10), 0.3).coords()[0] == doctest::Approx(3.0).epsilon(1e-15));
  const Point m = geodesic_point(Space::spd(2), spd_diag(1, 1), spd_diag(4, 4), 0.5);
  CHECK(max_abs_diff(m.matrix(), Matrix::diagonal(std::vector<double>{2, 2})) < 1e-12);
  const Point h = geodesic_point(Space::half_plane(), hp(0, 1), hp(0, 4), 0.5);
  CHECK(std::abs(h.half_plane().re) < 1e-14);
  CHECK(std::abs(h.half_plane().im - 2.0) < 1e-12);

  const Point mid = midpoint(Space::euclidean(2), e2(0, 0), e2(2, 2));
  CHECK(mid.coords() == std::vector<double>{1.0, 1.0});

  const Point apex = midpoint(Space::half_plane(), hp(-1, 1), hp(1, 1));
  CHECK(std::abs(apex.half_plane().re) < 1e-12);
  CHECK(std::abs(apex.half_plane().im - std::sqrt(2.0)) < 1e-12);
  const double d0 = distance(Space::half_plane(), hp(-1, 1), apex);
  const double d1 = distance(Space::half_plane(), apex, hp(1, 1));
  CHECK(std::abs(d0 - d1) < 1e-9);
  CHECK(std::abs(d0 - 0.5 * distance(Space::half_plane(), hp(-1, 1), hp(1, 1))) < 1e-9);
}

TEST_CASE("geodesic endpoints are exact and t outside [0,1] is rejected") {
  Rng rng(3);
  for (const Space& s : model_spaces()) {
    const Point p = random_point(s, rng);
    const Point q = random_point(s, rng);
    CHECK(geodesic_point(s, p, q, 0.0) == p);
    CHECK(geodesic_point(s, p, q, 1.0) == q);
    CHECK(code_of([&] { geodesic_point(s, p, q, 1.5); }) == ErrorCode::ParameterOutOfRange);
    CHECK(code_of([&] { geodesic_point(s, p, q, -0.1); }) == ErrorCode::ParameterOutOfRange);
  }
}

TEST_CASE("geodesic speed") {
  Rng rng(5);
  for (const Space& s : model_spaces()) {
    for (int k = 0; k < 100; ++k) {
      const Point p = random_point(s, rng);
      const Point q = random_point(s, rng);
      double a = rng.uniform();
      double b = rng.uniform();
      if (a > b) std::swap(a, b);
      const double d = distance(s, p, q);
      const double dab = distance(s, geodesic_point(s, p, q, a), geodesic_point(s, p, q, b));
      CHECK(std::abs(dab - (b - a) * d) <= 1e-8 * std::max(d, 1e-12));
    }
  }
}

TEST_CASE("NPC inequality, its strengthened form and joint convexity") {
  Rng rng(17);
  for (const Space& s : model_spaces()) {
    for (int k = 0; k < 300; ++k) {
      const Point x0 = random_point(s, rng, 1.5);
      const Point x1 = random_point(s, rng, 1.5);
      const Point z = random_point(s, rng, 1.5);
      const Point w0 = random_point(s, rng, 1.5);
      const Point w1 = random_point(s, rng, 1.5);
      const std::vector<Point> pts{x0, x1, z, w0, w1};
      const double scale = instance_scale(s, pts);
      auto d = [&](const Point& a, const Point& b) { return distance(s, a, b); };

      const Point y = midpoint(s, x0, x1);
      const double lhs = d(z, y) * d(z, y);
      const double rhs = 0.5 * d(z, x0) * d(z, x0) + 0.5 * d(z, x1) * d(z, x1) - 0.25 * d(x0, x1) * d(x0, x1);
      CHECK(lhs <= rhs + 1e-9 * scale * scale);

      const double t = rng.uniform();
      const Point xt = geodesic_point(s, x0, x1, t);
      const double lt = d(z, xt) * d(z, xt);
      const double rt = (1 - t) * d(z, x0) * d(z, x0) + t * d(z, x1) * d(z, x1) - t * (1 - t) * d(x0, x1) * d(x0, x1);
      CHECK(lt <= rt + 1e-9 * scale * scale);

      const double joint = d(xt, geodesic_point(s, w0, w1, t));
      CHECK(joint <= (1 - t) * d(x0, w0) + t * d(x1, w1) + 1e-9 * scale);
    }
  }
}

TEST_CASE("log and exp examples") {
  const TangentVector v = log_map(Space::euclidean(2), e2(1, 1), e2(4, 5));
  CHECK(v.values == std::vector<double>{3.0, 4.0});
  CHECK(tangent_norm(Space::euclidean(2), v) == doctest::Approx(5.0));

  const Space s1 = Space::spd(1);
  const Point one = Point::spd(Matrix::identity(1));
  const TangentVector w = log_map(s1, one, Point::spd(Matrix(1, 1, std::exp(2.0))));
  CHECK(std::abs(w.values[0] - 2.0) < 1e-13);
  CHECK(std::abs(tangent_norm(s1, w) - 2.0) < 1e-13);

  TangentVector u = zero_tangent(s1, one);
  u.values[0] = std::log(9.0);
  CHECK(std::abs(exp_map(s1, one, u).matrix()(0, 0) - 9.0) < 1e-12);

  TangentVector e = zero_tangent(Space::euclidean(2), e2(0, 0));
  e.values = {1.0, 2.0};
  CHECK(exp_map(Space::euclidean(2), e2(0, 0), e).coords() == std::vector<double>{1.0, 2.0});

  Rng rng(9);
  for (const Space& s : model_spaces()) {
    const Point b = random_point(s, rng);
    CHECK(tangent_norm(s, log_map(s, b, b)) == 0.0);
    CHECK(distance(s, exp_map(s, b, zero_tangent(s, b)), b) <= 1e-12);
  }
}

TEST_CASE("log norm equals distance and exp inverts log") {
  Rng rng(21);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Point b = random_point(Space::half_plane(), rng, 2.0);
    const Point p = random_point(Space::half_plane(), rng, 2.0);
    const Point back = exp_map(Space::half_plane(), b, log_map(Space::half_plane(), b, p));
    const double scale = std::max(1.0, std::hypot(p.half_plane().re, p.half_plane().im));
    worst = std::max(worst, std::hypot(back.half_plane().re - p.half_plane().re, back.half_plane().im - p.half_plane().im) / scale);
  }
  CHECK(worst < 1e-8);

  for (const Space& s : model_spaces()) {
    for (int k = 0; k < 50; ++k) {
      const Point b = random_point(s, rng);
      const Point p = random_point(s, rng);
      const double d = distance(s, b, p);
      CHECK(std::abs(tangent_norm(s, log_map(s, b, p)) - d) <= 1e-9 * std::max(d, 1e-12));
      CHECK(distance(s, exp_map(s, b, log_map(s, b, p)), p) <= 1e-8 * std::max(d, 1.0));
    }
  }
}

TEST_CASE("exp checks its base point") {
  const TangentVector v = zero_tangent(Space::half_plane(), hp(0, 1));
  CHECK(code_of([&] { exp_map(Space::half_plane(), hp(0, 2), v); }) == ErrorCode::BaseMismatch);
}

TEST_CASE("validate_point diagnostics") {
  const Validation a = validate_point(Space::half_plane(), hp(0, -1));
  CHECK_FALSE(a.ok);
  CHECK(a.diagnostic.find("im ≤ 0") != std::string::npos);
  const Validation b = validate_point(Space::spd(2), spd_rows({{1, 2}, {2, 1}}));
  CHECK_FALSE(b.ok);
  CHECK(b.diagnostic.find("eigenvalue ≤ 0") != std::string::npos);
  CHECK(validate_point(Space::euclidean(3), Point::euclidean({1, 2, 3})).ok);
  CHECK_FALSE(validate_point(Space::euclidean(3), Point::euclidean({1, 2})).ok);
  CHECK_FALSE(validate_point(Space::half_plane(), hp(0, 1e-13)).ok);
  CHECK_FALSE(validate_point(Space::spd(2), spd_rows({{1, 0.5}, {0.4, 1}})).ok);
  CHECK(validate_point(Space::spd(2), spd_rows({{1, 0.5}, {0.5 + 1e-14, 1}})).ok);

  CHECK(code_of([] { distance(Space::half_plane(), hp(0, 1), hp(0, -1)); }) == ErrorCode::InvalidPoint);
  CHECK(code_of([] { distance(Space::half_plane(), hp(0, 1), e1(0)); }) == ErrorCode::SpaceMismatch);
  CHECK(code_of([] { Space::euclidean(0); }) == ErrorCode::ParameterOutOfRange);
}

TEST_CASE("space descriptors round-trip through text") {
  for (const char* text : {"euclidean:2", "halfplane", "spd:3", "wasserstein1d:4", "product(euclidean:1,halfplane)",
                           "product(product(spd:2),halfplane)"}) {
    CHECK(Space::parse(text).describe() == text);
  }
  CHECK(code_of([] { Space::parse("sphere:2"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { Space::parse("euclidean:"); }) == ErrorCode::ParseError);
}
