#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "npcmaj/sampling.hpp"
#include "npcmaj/stochastic.hpp"
#include "support/helpers.hpp"

using namespace npcmaj;
using namespace npcmaj::test;

namespace {

std::vector<double> values(const std::vector<Point>& pts) {
  std::vector<double> v;
  for (const Point& p : pts) v.push_back(p.coords()[0]);
  return v;
}

// All permutations of {0..n-1} in lexicographic order.
std::vector<Permutation> all_permutations(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Grid search with step 1/64 over 2x2 row-stochastic matrices.
bool brute_force_decide(const std::vector<double>& x, const std::vector<double>& lambda, const std::vector<double>& y,
                        const std::vector<double>& mu) {
  for (int p = 0; p <= 64; ++p) {
    for (int q = 0; q <= 64; ++q) {
      const double a[2][2] = {{p / 64.0, 1 - p / 64.0}, {q / 64.0, 1 - q / 64.0}};
      bool ok = true;
      for (int j = 0; j < 2; ++j) ok = ok && std::abs(lambda[0] * a[0][j] + lambda[1] * a[1][j] - mu[j]) < 1e-12;
      for (int i = 0; i < 2; ++i) ok = ok && std::abs(a[i][0] * y[0] + a[i][1] * y[1] - x[i]) < 1e-12;
      if (ok) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("classical majorization predicates") {
  const std::vector<double> a{1, 1, 1}, b{3, 0, 0};
  CHECK(hlp_majorizes(a, b));
  CHECK_FALSE(hlp_majorizes(std::vector<double>{2, 2}, std::vector<double>{3, 0}));
  CHECK(hlp_majorizes(std::vector<double>{2, 1, 1}, std::vector<double>{2, 2, 0}));
  CHECK(weakly_majorizes(std::vector<double>{1, 1}, std::vector<double>{3, 0}));
  CHECK_FALSE(weakly_majorizes(std::vector<double>{3, 0}, std::vector<double>{1, 1}));
  CHECK(weakly_majorizes(std::vector<double>{1, 1, 1}, std::vector<double>{1.5, 1, 0.6}));
  CHECK(code_of([] { hlp_majorizes(std::vector<double>{1}, std::vector<double>{1, 2}); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([] { weakly_majorizes(std::vector<double>{}, std::vector<double>{}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("pushforward weights") {
  const std::vector<double> l{0.3, 0.7};
  CHECK(pushforward_weights(Matrix::identity(2), l) == l);
  const auto u = pushforward_weights(Matrix(2, 2, 0.5), std::vector<double>{0.2, 0.8});
  CHECK(std::abs(u[0] - 0.5) < 1e-15);
  CHECK(std::abs(u[1] - 0.5) < 1e-15);
  const std::vector<double> mu{0.1, 0.6, 0.3};
  const auto r = pushforward_weights(Matrix::from_rows({mu}), std::vector<double>{1.0});
  CHECK(r == mu);
  CHECK(code_of([] { pushforward_weights(Matrix::identity(2), std::vector<double>{1.0}); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([] { pushforward_weights(Matrix::identity(2), std::vector<double>{0.5, 0.6}); }) ==
        ErrorCode::NotProbabilityVector);
  CHECK(code_of([] { pushforward_weights(Matrix::from_rows({{0.5, 0.6}, {0, 1}}), std::vector<double>{0.5, 0.5}); }) ==
        ErrorCode::NotRowStochastic);
}

TEST_CASE("verify_majorization examples") {
  const Space s = Space::euclidean(1);
  const auto y = e1s({0, 4});
  const std::vector<double> mu{0.5, 0.5};

  const auto single = verify_majorization(s, e1s({2}), std::vector<double>{1.0}, y, mu, Matrix::from_rows({mu}));
  CHECK(single.valid);

  const auto refl = verify_majorization(s, y, mu, y, mu, Matrix::identity(2));
  CHECK(refl.valid);

  const Matrix a = Matrix::from_rows({{0.25, 0.75}, {0.75, 0.25}});
  const auto c = verify_majorization(s, e1s({3, 1}), mu, y, mu, a);
  CHECK(c.valid);
  CHECK(c.max_residual() < 1e-15);

  const auto wrong = verify_majorization(s, e1s({3, 1.5}), mu, y, mu, a);
  CHECK_FALSE(wrong.valid);
  const auto bad_mu = verify_majorization(s, e1s({3, 1}), mu, y, std::vector<double>{0.4, 0.6}, a);
  CHECK_FALSE(bad_mu.valid);
}

TEST_CASE("zero-weight rows are constrained unless exempted") {
  const Space s = Space::euclidean(1);
  const auto y = e1s({0, 4});
  const Matrix a = Matrix::from_rows({{0.5, 0.5}, {1.0, 0.0}});
  const std::vector<double> lambda{1.0, 0.0};
  const std::vector<double> mu{0.5, 0.5};
  CHECK_FALSE(verify_majorization(s, e1s({2, 7}), lambda, y, mu, a).valid);
  VerifyOptions relaxed;
  relaxed.ignore_zero_weight_rows = true;
  const auto c = verify_majorization(s, e1s({2, 7}), lambda, y, mu, a, relaxed);
  CHECK(c.valid);
  CHECK(c.exempt_rows == std::vector<std::size_t>{1});
}

TEST_CASE("synthesize examples") {
  Rng rng(2);
  for (const Space& s : model_spaces()) {
    std::vector<Point> y{random_point(s, rng), random_point(s, rng), random_point(s, rng)};
    const std::vector<double> lambda{0.2, 0.3, 0.5};
    const auto c = synthesize_majorized(s, y, lambda, Matrix::identity(3));
    CHECK(c.valid);
    for (std::size_t i = 0; i < 3; ++i) CHECK(distance(s, c.x_atoms[i], y[i]) == 0.0);
    CHECK(c.mu == lambda);
  }
  const auto g = synthesize_majorized(Space::spd(2), std::vector<Point>{spd_diag(1, 1), spd_diag(4, 4)},
                                      std::vector<double>{1.0}, Matrix::from_rows({{0.5, 0.5}}));
  CHECK(max_abs_diff(g.x_atoms[0].matrix(), Matrix::diagonal(std::vector<double>{2, 2})) < 1e-12);

  for (const Space& s : model_spaces()) {
    for (int k = 0; k < 20; ++k) {
      const std::size_t m = 1 + rng.below(3), n = 2 + rng.below(3);
      std::vector<Point> ys;
      for (std::size_t j = 0; j < n; ++j) ys.push_back(random_point(s, rng));
      const auto c = synthesize_majorized(s, ys, random_probability(m, rng), random_row_stochastic(m, n, rng));
      CHECK(c.valid);
      const auto again = verify_majorization(s, c.x_atoms, c.lambda, c.y_atoms, c.mu, c.a);
      CHECK(again.valid);
    }
  }
}

TEST_CASE("decide_majorization_euclidean examples") {
  const Space s = Space::euclidean(1);
  const auto y = e1s({0, 4});
  const std::vector<double> mu{0.5, 0.5};

  const auto mean = decide_majorization_euclidean(s, e1s({2}), std::vector<double>{1.0}, y, mu);
  REQUIRE(mean.feasible);
  CHECK(max_abs_diff(mean.witness, Matrix::from_rows({{0.5, 0.5}})) < 1e-12);

  CHECK_FALSE(decide_majorization_euclidean(s, e1s({5}), std::vector<double>{1.0}, y, mu).feasible);

  const auto two = decide_majorization_euclidean(s, e1s({1, 3}), mu, y, mu);
  REQUIRE(two.feasible);
  CHECK(max_abs_diff(two.witness, Matrix::from_rows({{0.75, 0.25}, {0.25, 0.75}})) < 1e-12);
  REQUIRE(two.certificate.has_value());
  CHECK(two.certificate->valid);
  CHECK(brute_force_decide({1, 3}, mu, {0, 4}, mu));

  CHECK(code_of([&] { decide_majorization_euclidean(Space::half_plane(), std::vector<Point>{hp(0, 1)}, std::vector<double>{1.0},
                                                    std::vector<Point>{hp(0, 1)}, std::vector<double>{1.0}); }) ==
        ErrorCode::NotEuclidean);
}

TEST_CASE("decision agrees with a 1/64 grid search on 2x2 instances") {
  Rng rng(41);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> y{std::round(rng.uniform(-4, 4) * 4) / 4, std::round(rng.uniform(-4, 4) * 4) / 4};
    std::vector<double> lambda{0.5, 0.5};
    std::vector<double> x(2);
    const double p = static_cast<double>(rng.below(65)) / 64, q = static_cast<double>(rng.below(65)) / 64;
    x[0] = p * y[0] + (1 - p) * y[1];
    x[1] = q * y[0] + (1 - q) * y[1];
    std::vector<double> mu{0.5 * (p + q), 1 - 0.5 * (p + q)};
    if (rng.uniform() < 0.4) x[rng.below(2)] += rng.uniform() < 0.5 ? 0.5 : 9.0;
    const bool oracle = brute_force_decide(x, lambda, y, mu);
    const auto d = decide_majorization_euclidean(Space::euclidean(1), e1s({x[0], x[1]}), lambda, e1s({y[0], y[1]}), mu);
    // Distinct y-atoms pin A down uniquely, so the grid search is exhaustive.
    if (y[0] != y[1]) CHECK(d.feasible == oracle);
    if (oracle) CHECK(d.feasible);
    if (d.feasible) {
      REQUIRE(d.certificate.has_value());
      CHECK(d.certificate->valid);
    }
  }
}

TEST_CASE("Euclidean majorization is transitive") {
  Rng rng(43);
  const Space s = Space::euclidean(2);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 3;
    std::vector<Point> z;
    for (std::size_t j = 0; j < n; ++j) z.push_back(random_point(s, rng));
    // Uniform weights with doubly stochastic A keep every pushforward uniform, so the two steps chain.
    const std::vector<double> u(n, 1.0 / static_cast<double>(n));
    const auto yz = synthesize_majorized(s, z, u, random_doubly_stochastic(n, 3, rng));
    const auto xy = synthesize_majorized(s, yz.x_atoms, u, random_doubly_stochastic(n, 3, rng));
    const auto xz = decide_majorization_euclidean(s, xy.x_atoms, xy.lambda, z, yz.mu);
    CHECK(xz.feasible);
  }
}

TEST_CASE("doubly stochastic certificates agree with the partial-sum test") {
  Rng rng(47);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 2 + rng.below(4);
    std::vector<Point> y;
    for (std::size_t j = 0; j < n; ++j) y.push_back(e1(rng.normal()));
    const Matrix d = random_doubly_stochastic(n, 1 + rng.below(4), rng);
    const std::vector<double> w(n, 1.0 / static_cast<double>(n));
    const auto c = synthesize_majorized(Space::euclidean(1), y, w, d);
    CHECK(c.valid == hlp_majorizes(values(c.x_atoms), values(y)));
    // Moving one atom changes the total, which both tests must notice.
    std::vector<Point> x = c.x_atoms;
    x[0] = e1(x[0].coords()[0] + 10.0);
    CHECK_FALSE(verify_majorization(Space::euclidean(1), x, w, y, w, d).valid);
    CHECK_FALSE(hlp_majorizes(values(x), values(y)));
  }
}

TEST_CASE("Birkhoff decomposition examples") {
  const auto id = birkhoff_decompose(Matrix::identity(4));
  REQUIRE(id.terms.size() == 1);
  CHECK(id.terms[0].weight == 1.0);
  CHECK(id.terms[0].permutation == Permutation{0, 1, 2, 3});

  const Permutation p1{1, 0, 2}, p2{0, 2, 1};
  const Matrix half = permutation_matrix(p1) * 0.5 + permutation_matrix(p2) * 0.5;
  const auto h = birkhoff_decompose(half);
  REQUIRE(h.terms.size() == 2);
  CHECK(h.terms[0].permutation == p2);
  CHECK(h.terms[1].permutation == p1);
  CHECK(std::abs(h.terms[0].weight - 0.5) < 1e-15);

  const auto u = birkhoff_decompose(Matrix(3, 3, 1.0 / 3));
  REQUIRE(u.terms.size() == 3);
  CHECK(u.terms[0].permutation == Permutation{0, 1, 2});
  for (const auto& t : u.terms) CHECK(std::abs(t.weight - 1.0 / 3) < 1e-12);
  Matrix cover(3, 3);
  for (const auto& t : u.terms) cover += permutation_matrix(t.permutation);
  CHECK(max_abs_diff(cover, Matrix(3, 3, 1.0)) == 0.0);

  CHECK(code_of([] { birkhoff_decompose(Matrix::from_rows({{0.5, 0.5}, {0.6, 0.4}})); }) ==
        ErrorCode::NotDoublyStochastic);
  CHECK(code_of([] { birkhoff_decompose(Matrix(2, 3, 0.5)); }) == ErrorCode::NotDoublyStochastic);
}

TEST_CASE("Birkhoff decomposition bounds on random inputs") {
  Rng rng(53);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng.below(8);
    const Matrix d = random_doubly_stochastic(n, 1 + rng.below(3 * n), rng);
    const auto b = birkhoff_decompose(d);
    CHECK(b.terms.size() <= (n - 1) * (n - 1) + 1);
    CHECK(max_abs_diff(b.reconstruct(n), d) <= 1e-10);
    double total = 0.0;
    for (const auto& t : b.terms) {
      CHECK(t.weight > 0.0);
      total += t.weight;
    }
    CHECK(std::abs(total - 1.0) <= 1e-10);
  }
}

TEST_CASE("3x3 parameterization is recovered up to the parity direction") {
  const auto perms = all_permutations(3);
  const double parity[6] = {1, -1, -1, 1, 1, -1};
  Rng rng(59);
  for (int k = 0; k < 50; ++k) {
    const auto lambda = random_probability(6, rng);
    Matrix a(3, 3);
    for (std::size_t t = 0; t < 6; ++t) a += permutation_matrix(perms[t]) * lambda[t];

    // The displayed form indexes y by row; it is the transpose of the row-per-x matrix.
    const double* l = lambda.data();
    const Matrix shown = Matrix::from_rows({{l[0] + l[1], l[2] + l[4], l[3] + l[5]},
                                            {l[2] + l[3], l[0] + l[5], l[1] + l[4]},
                                            {l[4] + l[5], l[1] + l[3], l[0] + l[2]}});
    CHECK(max_abs_diff(shown.transpose(), a) < 1e-15);

    const auto b = birkhoff_decompose(a);
    std::vector<double> recovered(6, 0.0);
    for (const auto& t : b.terms) {
      const auto it = std::find(perms.begin(), perms.end(), t.permutation);
      REQUIRE(it != perms.end());
      recovered[static_cast<std::size_t>(it - perms.begin())] += t.weight;
    }
    double c = 0.0;
    for (std::size_t t = 0; t < 6; ++t) c += (recovered[t] - lambda[t]) * parity[t] / 6.0;
    for (std::size_t t = 0; t < 6; ++t) {
      CHECK(recovered[t] >= 0.0);
      CHECK(std::abs(recovered[t] - lambda[t] - c * parity[t]) < 1e-10);
    }
    CHECK(max_abs_diff(b.reconstruct(3), a) < 1e-10);
  }
}

TEST_CASE("Rado probe") {
  const Space s = Space::euclidean(1);
  const auto same = rado_probe(s, e1s({1, 5, 2}), e1s({1, 5, 2}), 1e-9);
  CHECK(same.necessity_holds);
  REQUIRE(same.lp_member.has_value());
  CHECK(*same.lp_member);
  REQUIRE(same.hull_coefficients.size() == 1);
  CHECK(same.hull_coefficients[0].permutation == Permutation{0, 1, 2});
  CHECK(same.hull_coefficients[0].weight == doctest::Approx(1.0));

  const auto r = rado_probe(s, e1s({1, 3}), e1s({0, 4}), 1e-9);
  CHECK(r.necessity_holds);
  REQUIRE(r.lp_member.has_value());
  CHECK(*r.lp_member);
  double swap_weight = 0.0, id_weight = 0.0;
  for (const auto& h : r.hull_coefficients) (h.permutation == Permutation{0, 1} ? id_weight : swap_weight) += h.weight;
  CHECK(std::abs(id_weight - 0.75) < 1e-12);
  CHECK(std::abs(swap_weight - 0.25) < 1e-12);

  CHECK(code_of([&] { rado_probe(s, e1s({9, 3}), e1s({0, 4}), 1e-9); }) == ErrorCode::NoCertificate);
  CHECK(code_of([&] { rado_probe(Space::half_plane(), std::vector<Point>{hp(0, 1), hp(0, 2)}, std::vector<Point>{hp(0, 1), hp(0, 2)}, 1e-9); }) ==
        ErrorCode::NoCertificate);
  CHECK(code_of([&] { rado_probe(s, e1s({1, 2, 3, 4, 5, 6, 7}), e1s({1, 2, 3, 4, 5, 6, 7}), 1e-9); }) ==
        ErrorCode::TooLarge);

  Rng rng(61);
  for (int k = 0; k < 10; ++k) {
    std::vector<Point> y{random_point(Space::half_plane(), rng), random_point(Space::half_plane(), rng),
                         random_point(Space::half_plane(), rng)};
    const Matrix d = random_doubly_stochastic(3, 3, rng);
    const auto c = synthesize_majorized(Space::half_plane(), y, std::vector<double>(3, 1.0 / 3), d);
    const auto p = rado_probe(Space::half_plane(), c.x_atoms, y, 1e-6, d);
    CHECK(p.necessity_holds);
    CHECK_FALSE(p.lp_member.has_value());
  }
}
