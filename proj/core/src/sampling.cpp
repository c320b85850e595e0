#include "npcmaj/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "npcmaj/geometry.hpp"

namespace npcmaj {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) noexcept : key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) noexcept {
  Rng r(seed);
  r.key_ = mix64(r.key_ ^ mix64(index + 0x3c6ef372fe94f82bULL));
  return r;
}

Rng Rng::split(std::uint64_t index) const noexcept {
  Rng r = *this;
  r.key_ = mix64(key_ ^ mix64(index + 0xa54ff53a5f1d36f1ULL));
  r.counter_ = 0;
  return r;
}

Rng::result_type Rng::operator()() noexcept {
  return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
}

double Rng::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::normal() noexcept {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::below(std::size_t n) noexcept {
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

namespace {

Matrix random_rotation(std::size_t n, Rng& rng) {
  Matrix q(n, n);
  for (double& v : q.data()) v = rng.normal();
  // Modified Gram-Schmidt on columns.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += q(i, j) * q(i, k);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
  return q;
}

}  // namespace

Point random_point(const Space& space, Rng& rng, double spread) {
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      std::vector<double> c(space.param());
      for (double& v : c) v = spread * rng.normal();
      return Point::euclidean(std::move(c));
    }
    case SpaceKind::HalfPlane: {
      const double re = 0.7 * spread * rng.normal();
      const double im = std::exp(0.5 * spread * rng.normal());
      return Point::half_plane(re, im);
    }
    case SpaceKind::Spd: {
      const std::size_t n = space.param();
      std::vector<double> eig(n);
      for (double& l : eig) l = std::exp(0.6 * spread * rng.normal());
      const Matrix q = random_rotation(n, rng);
      return Point::spd(q * Matrix::diagonal(eig) * q.transpose());
    }
    case SpaceKind::Wasserstein1D: {
      std::vector<double> atoms(space.param());
      for (double& a : atoms) a = spread * rng.normal();
      return Point::measure(Measure1D::make(std::move(atoms), random_probability(space.param(), rng)));
    }
    case SpaceKind::Product: {
      std::vector<Point> parts;
      for (const Space& f : space.factors()) parts.push_back(random_point(f, rng, spread));
      return Point::product(std::move(parts));
    }
  }
  return {};
}

std::vector<double> random_probability(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  for (double& v : w) v = -std::log(1.0 - rng.uniform()) + 1e-3;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  const double head = std::accumulate(w.begin(), w.end() - 1, 0.0);
  w.back() = 1.0 - head;
  return w;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

Matrix random_row_stochastic(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto w = random_probability(cols, rng);
    std::copy(w.begin(), w.end(), a.row(i).begin());
  }
  return a;
}

Matrix random_doubly_stochastic(std::size_t n, std::size_t terms, Rng& rng) {
  const auto w = random_probability(terms, rng);
  Matrix a(n, n);
  for (std::size_t k = 0; k < terms; ++k) {
    const auto perm = random_permutation(n, rng);
    for (std::size_t i = 0; i < n; ++i) a(i, perm[i]) += w[k];
  }
  return a;
}

Point random_point_near(const Space& space, const Point& center, double radius, Rng& rng) {
  const Point target = random_point(space, rng, 1.0);
  const double d = distance(space, center, target);
  const double r = radius * rng.uniform();
  if (d <= r || d == 0.0) return target;
  return geodesic_point(space, center, target, r / d);
}

}  // namespace npcmaj
