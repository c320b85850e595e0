#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "npcmaj/space.hpp"

namespace npcmaj {

// Finitely supported probability measure sum_i weights[i] * delta(atoms[i]).
struct DiscreteMeasure {
  std::vector<Point> atoms;
  std::vector<double> weights;
};

/// Throws InvalidMeasure (bad weights, empty, length mismatch) or the
/// geometry error of the first invalid atom.
void require_measure(const Space& space, const DiscreteMeasure& measure);

/// Uniform weights over `atoms`.
DiscreteMeasure uniform_measure(std::vector<Point> atoms);

struct BarycenterOptions {
  double tol = 1e-10;            ///< relative to the instance scale
  std::size_t max_iter = 10'000;
  bool force_iterative = false;  ///< bypass closed forms (testing)
};

struct BarycenterResult {
  Point point;
  double objective = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// J(z) = 1/2 * sum_i w_i d^2(z, x_i).
double objective(const Space& space, const DiscreteMeasure& measure, const Point& z);

/// sum_i w_i log_z(x_i), the negative Riemannian gradient of J at z.
TangentVector tangent_mean(const Space& space, const DiscreteMeasure& measure, const Point& z);

/// Minimizer of J. Closed forms for Euclidean spaces, degenerate measures and
/// two-atom measures; otherwise the fixed-point iteration
///   z <- exp_z(sum_i w_i log_z(x_i))
/// started from the heaviest atom. Exhausting max_iter is reported through
/// `converged`, not thrown; NaN/Inf during iteration throws NonFinite.
BarycenterResult barycenter(const Space& space, const DiscreteMeasure& measure,
                            const BarycenterOptions& options = {});

struct SlackOutcome {
  bool ok = true;
  double slack = 0.0;      ///< lhs - rhs; <= 0 when the inequality holds exactly
  double threshold = 0.0;  ///< numerical allowance the slack was compared to
};

/// d^2(bar, z) <= sum_i w_i d^2(x_i, z).
SlackOutcome variance_inequality_check(const Space& space, const DiscreteMeasure& measure,
                                       const Point& z, double tol,
                                       const BarycenterOptions& options = {});

/// d(bar(x), bar(y)) <= (1/n) sum_i d(x_i, y_i) for equal-weight barycenters.
SlackOutcome mean_contraction_check(const Space& space, std::span<const Point> x,
                                    std::span<const Point> y, double tol,
                                    const BarycenterOptions& options = {});

}  // namespace npcmaj
