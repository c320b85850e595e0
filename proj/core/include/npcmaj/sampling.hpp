#pragma once

#include <cstddef>
#include <vector>

#include "npcmaj/linalg.hpp"
#include "npcmaj/rng.hpp"
#include "npcmaj/space.hpp"

namespace npcmaj {

/// Random valid point; `spread` sets the typical distance from reference_point.
Point random_point(const Space& space, Rng& rng, double spread = 1.0);

/// Strictly positive probability vector.
std::vector<double> random_probability(std::size_t n, Rng& rng);

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

Matrix random_row_stochastic(std::size_t rows, std::size_t cols, Rng& rng);

/// Convex combination of `terms` random permutation matrices.
Matrix random_doubly_stochastic(std::size_t n, std::size_t terms, Rng& rng);

/// Point on the geodesic from `center` towards a random point, at distance at
/// most `radius` from `center`.
Point random_point_near(const Space& space, const Point& center, double radius, Rng& rng);

}  // namespace npcmaj
