#include <cmath>

#include "doctest.h"
#include "npcmaj/sampling.hpp"
#include "npcmaj/wasserstein.hpp"
#include "support/helpers.hpp"

using namespace npcmaj;
using namespace npcmaj::test;

namespace {

Measure1D m(std::vector<double> atoms, std::vector<double> weights) {
  return Measure1D::make(std::move(atoms), std::move(weights));
}

Measure1D random_measure(Rng& rng, std::size_t max_atoms = 4) {
  return random_point(Space::wasserstein1d(1 + rng.below(max_atoms)), rng, 1.5).measure();
}

const ConvexFunctional& by_id(const std::vector<ConvexFunctional>& reg, const std::string& id) {
  for (const auto& f : reg)
    if (f.id == id) return f;
  throw std::runtime_error("missing " + id);
}

}  // namespace

TEST_CASE("canonical measures") {
  const Measure1D a = m({2, 0, 2}, {0.25, 0.5, 0.25});
  CHECK(std::vector<double>(a.atoms().begin(), a.atoms().end()) == std::vector<double>{0, 2});
  CHECK(std::vector<double>(a.weights().begin(), a.weights().end()) == std::vector<double>{0.5, 0.5});
  CHECK(m({1, 5}, {1.0, 0.0}).size() == 1);
  CHECK(code_of([] { m({0, 1}, {0.5, 0.6}); }) == ErrorCode::InvalidMeasure);
  CHECK(code_of([] { m({0, 1}, {1.5, -0.5}); }) == ErrorCode::InvalidMeasure);
}

TEST_CASE("W2 on the line") {
  CHECK(w2_quantile(Measure1D::dirac(0), Measure1D::dirac(1)) == 1.0);
  CHECK(w2_quantile(m({0, 2}, {0.5, 0.5}), m({1, 3}, {0.5, 0.5})) == 1.0);
  const Measure1D mu = m({-1, 0.5, 3}, {0.2, 0.5, 0.3});
  CHECK(w2_quantile(mu, mu) == 0.0);
  const auto lp = w2_lp(DiscreteMeasureN::from_1d(m({0, 2}, {0.5, 0.5})), DiscreteMeasureN::from_1d(m({1, 3}, {0.5, 0.5})));
  CHECK(std::abs(lp.distance - 1.0) < 1e-12);
}

TEST_CASE("quantile and LP distances agree") {
  Rng rng(1);
  for (int k = 0; k < 500; ++k) {
    const Measure1D a = random_measure(rng, 5), b = random_measure(rng, 5);
    const double q = w2_quantile(a, b);
    const auto lp = w2_lp(DiscreteMeasureN::from_1d(a), DiscreteMeasureN::from_1d(b));
    CHECK(std::abs(q - lp.distance) <= 1e-9);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(lp.coupling.row_marginals[i] - a.weights()[i]) <= 1e-9);
    for (std::size_t j = 0; j < b.size(); ++j) CHECK(std::abs(lp.coupling.col_marginals[j] - b.weights()[j]) <= 1e-9);
  }
}

TEST_CASE("LP transport in the plane") {
  DiscreteMeasureN a{{{0, 0}, {1, 0}}, {0.5, 0.5}};
  DiscreteMeasureN b{{{0, 1}, {1, 1}}, {0.5, 0.5}};
  CHECK(std::abs(w2_lp(a, b).distance - 1.0) < 1e-12);
  DiscreteMeasureN p{{{1, 2}}, {1.0}};
  DiscreteMeasureN q{{{4, 6}}, {1.0}};
  CHECK(std::abs(w2_lp(p, q).distance - 5.0) < 1e-12);

  DiscreteMeasureN big;
  for (int i = 0; i < 101; ++i) {
    big.atoms.push_back({double(i)});
    big.weights.push_back(1.0 / 101);
  }
  CHECK(code_of([&] { w2_lp(big, big); }) == ErrorCode::TooLarge);
}

TEST_CASE("metric axioms") {
  Rng rng(2);
  for (int k = 0; k < 300; ++k) {
    const Measure1D a = random_measure(rng), b = random_measure(rng), c = random_measure(rng);
    CHECK(w2_quantile(a, b) == w2_quantile(b, a));
    CHECK(w2_quantile(a, c) <= w2_quantile(a, b) + w2_quantile(b, c) + 1e-9);
  }
}

TEST_CASE("1-D barycenter") {
  const Measure1D nu = m({-1, 2}, {0.3, 0.7});
  const std::vector<Measure1D> one{nu};
  CHECK(w2_barycenter_1d(one, std::vector<double>{1.0}) == nu);
  const std::vector<Measure1D> copies{nu, nu, nu};
  CHECK(w2_barycenter_1d(copies, std::vector<double>{0.2, 0.3, 0.5}) == nu);
  const std::vector<Measure1D> ends{Measure1D::dirac(0), Measure1D::dirac(2)};
  CHECK(w2_barycenter_1d(ends, std::vector<double>{0.5, 0.5}) == Measure1D::dirac(1));

  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    std::vector<Measure1D> ms;
    for (int i = 0; i < 3; ++i) ms.push_back(random_measure(rng));
    const auto w = random_probability(3, rng);
    const Measure1D bar = w2_barycenter_1d(ms, w);
    const double j = w2_objective(ms, w, bar);
    for (const auto& mi : ms) CHECK(j <= w2_objective(ms, w, mi));
    // Perturb the barycenter's quantile function and the objective must not drop.
    std::vector<double> breaks = bar.breaks();
    for (int p = 0; p < 100; ++p) {
      std::vector<double> values(bar.atoms().begin(), bar.atoms().end());
      for (double& v : values) v += 1e-3 * rng.normal();
      std::sort(values.begin(), values.end());
      CHECK(j <= w2_objective(ms, w, measure_from_quantile(breaks, values)) + 1e-15);
    }
    // Translation equivariance.
    std::vector<Measure1D> shifted;
    for (const auto& mi : ms) shifted.push_back(mi.shifted(0.75));
    const Measure1D moved = w2_barycenter_1d(shifted, w);
    REQUIRE(moved.size() == bar.size());
    for (std::size_t i = 0; i < bar.size(); ++i) CHECK(std::abs(moved.atoms()[i] - (bar.atoms()[i] + 0.75)) < 1e-12);
  }
  CHECK(code_of([] { w2_barycenter_1d(std::vector<Measure1D>{}, std::vector<double>{}); }) == ErrorCode::InvalidMeasure);
}

TEST_CASE("functional registry") {
  const auto reg = w_functional_registry();
  const auto at = [&](const std::string& id, const Measure1D& mu) { return by_id(reg, id)(Point::measure(mu)); };
  CHECK(at("potential_t^2", Measure1D::dirac(3)) == 9.0);
  CHECK(at("potential_t^2", m({0, 2}, {0.5, 0.5})) == 2.0);
  CHECK(at("interaction_t^2", m({0, 2}, {0.5, 0.5})) == 2.0);
  CHECK(at("second_moment", m({0, 2}, {0.5, 0.5})) == 2.0);

  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    std::vector<Measure1D> ms;
    const std::size_t n = 2 + rng.below(3);
    for (std::size_t i = 0; i < n; ++i) ms.push_back(random_measure(rng));
    const auto w = random_probability(n, rng);
    for (const auto& f : reg) CHECK_MESSAGE(check_convexity_along_barycenters(f, ms, w).ok, f.id);
  }
}

TEST_CASE("majorization over measures") {
  const std::vector<Measure1D> ys{Measure1D::dirac(0), Measure1D::dirac(2)};
  const auto refl = w_majorization(ys, std::vector<double>{0.5, 0.5}, Matrix::identity(2));
  CHECK(refl.valid);
  CHECK(refl.x_atoms[0].measure() == ys[0]);

  const auto c = w_majorization(ys, std::vector<double>{1.0}, Matrix::from_rows({{0.5, 0.5}}));
  REQUIRE(c.valid);
  CHECK(c.x_atoms[0].measure() == Measure1D::dirac(1));
  const auto& second = by_id(w_functional_registry(), "second_moment");
  const auto t3 = check_theorem3(c, second);
  CHECK(std::abs(t3.slack - (1.0 - 2.0)) < 1e-12);

  const auto reports = w_fuzz_suite(5, 40);
  for (const auto& r : reports) CHECK_MESSAGE(r.violations == 0, r.check << "/" << r.functional);
}
