#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "npcmaj/linalg.hpp"

namespace npcmaj {

// minimize c^T u  subject to  E u = e,  u >= 0.
struct LinearProgram {
  std::vector<double> objective;  ///< c; its length is the variable count
  Matrix constraints;             ///< E, rows x objective.size()
  std::vector<double> rhs;        ///< e
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> solution;  ///< set when Optimal
  double objective_value = 0.0;
  double phase1_residual = 0.0;  ///< sum of artificial variables after phase 1
  std::size_t iterations = 0;
};

inline constexpr double kPivotTol = 1e-10;
inline constexpr double kFeasibilityTol = 1e-8;

/// Dense two-phase primal simplex with Bland's rule.
/// Throws DimensionMismatch / NonFinite on malformed programs.
LpOutcome lp_solve(const LinearProgram& lp);

struct FeasibilityResult {
  bool feasible = false;
  std::vector<double> point;
  double residual = 0.0;  ///< phase-1 optimum (infeasibility certificate when > tolerance)
};

/// Some u >= 0 with E u = e, if one exists. `variables` is only consulted when
/// E has no rows.
FeasibilityResult feasibility(const Matrix& constraints, std::span<const double> rhs,
                              std::size_t variables = 0);

/// max_i |(E u - e)_i|.
double constraint_residual(const Matrix& constraints, std::span<const double> rhs,
                           std::span<const double> u);

/// Lexicographically smallest permutation p with D(i, p[i]) > threshold for
/// every row i, or nullopt when none exists. Throws NotSquare.
std::optional<std::vector<std::size_t>> positive_support_matching(const Matrix& d, double threshold);

}  // namespace npcmaj
