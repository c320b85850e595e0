#include "npcmaj/lp.hpp"

#include <algorithm>
#include <cmath>

#include "npcmaj/error.hpp"

namespace npcmaj {
namespace {

constexpr std::size_t kIterationCap = 1'000'000;

// Tableau rows 0..m-1 hold constraints, row m the reduced costs. Columns
// 0..n-1 are structural, n..n+m-1 artificial, n+m the right-hand side.
class Tableau {
 public:
  Tableau(const Matrix& e_mat, std::span<const double> rhs)
      : m_(e_mat.rows()), n_(e_mat.cols()), width_(n_ + m_ + 1), t_((m_ + 1) * width_, 0.0), basis_(m_) {
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * e_mat(i, j);
      at(i, n_ + i) = 1.0;
      at(i, rhs_col()) = sign * rhs[i];
      basis_[i] = n_ + i;
    }
  }

  double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * width_ + j]; }
  std::size_t rhs_col() const { return n_ + m_; }

  void set_costs(std::span<const double> cost) {
    // Reduced costs r_j = c_j - c_B^T B^{-1} A_j for the current basis.
    for (std::size_t j = 0; j <= rhs_col(); ++j) at(m_, j) = j < cost.size() ? cost[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = basis_[i] < cost.size() ? cost[basis_[i]] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= rhs_col(); ++j) at(m_, j) -= cb * at(i, j);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t j = 0; j < width_; ++j) at(row, j) /= p;
    at(row, col) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double f = at(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(row, j);
      at(i, col) = 0.0;
    }
    basis_[row] = col;
  }

  // Runs Bland-rule pivots over columns [0, allowed). Returns false on unboundedness.
  bool optimize(std::size_t allowed, std::size_t& iterations) {
    while (true) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (at(m_, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return true;

      std::size_t leave = m_;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = at(i, rhs_col()) / a;
        if (leave == m_ || ratio < best - 1e-12 * std::max(1.0, std::abs(best)) ||
            (std::abs(ratio - best) <= 1e-12 * std::max(1.0, std::abs(best)) && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
      if (++iterations >= kIterationCap) fail(ErrorCode::NotConverged, "simplex iteration cap reached");
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      std::size_t best = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::abs(at(i, j)) > kPivotTol && (best == n_ || std::abs(at(i, j)) > std::abs(at(i, best)))) {
          best = j;
        }
      }
      // A row without structural support is redundant; its artificial stays at zero.
      if (best != n_) pivot(i, best);
    }
  }

  double artificial_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= n_) s += std::abs(at(i, rhs_col()));
    return s;
  }

  std::vector<double> solution() const {
    std::vector<double> u(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) u[basis_[i]] = std::max(0.0, at(i, rhs_col()));
    }
    return u;
  }

  std::size_t structural() const { return n_; }

 private:
  std::size_t m_;
  std::size_t n_;
  std::size_t width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

bool augment(std::size_t row, const std::vector<std::vector<bool>>& allowed, std::vector<bool>& seen,
             std::vector<std::size_t>& owner, const std::vector<bool>& col_blocked) {
  const std::size_t n = allowed.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (!allowed[row][j] || seen[j] || col_blocked[j]) continue;
    seen[j] = true;
    if (owner[j] == n || augment(owner[j], allowed, seen, owner, col_blocked)) {
      owner[j] = row;
      return true;
    }
  }
  return false;
}

// Can rows [first, n) be matched into the columns not blocked?
bool completes(std::size_t first, const std::vector<std::vector<bool>>& allowed,
               const std::vector<bool>& col_blocked) {
  const std::size_t n = allowed.size();
  std::vector<std::size_t> owner(n, n);
  for (std::size_t i = first; i < n; ++i) {
    std::vector<bool> seen(n, false);
    if (!augment(i, allowed, seen, owner, col_blocked)) return false;
  }
  return true;
}

}  // namespace

LpOutcome lp_solve(const LinearProgram& lp) {
  const std::size_t n = lp.objective.size();
  const std::size_t m = lp.rhs.size();
  if (lp.constraints.rows() != m || (m > 0 && lp.constraints.cols() != n)) {
    fail(ErrorCode::DimensionMismatch, "constraint matrix does not match objective/rhs sizes");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(lp.objective.begin(), lp.objective.end(), finite) ||
      !std::all_of(lp.rhs.begin(), lp.rhs.end(), finite) ||
      !std::all_of(lp.constraints.data().begin(), lp.constraints.data().end(), finite)) {
    fail(ErrorCode::NonFinite, "linear program has non-finite entries");
  }

  LpOutcome out;
  Matrix e_mat = m > 0 ? lp.constraints : Matrix(0, n);
  Tableau tab(e_mat, lp.rhs);

  std::vector<double> phase1(n + m, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1[n + i] = 1.0;
  tab.set_costs(phase1);
  tab.optimize(n, out.iterations);

  double e_inf = 0.0;
  for (double v : lp.rhs) e_inf = std::max(e_inf, std::abs(v));
  out.phase1_residual = tab.artificial_sum();
  if (out.phase1_residual > std::max(kFeasibilityTol * e_inf, 1e-12)) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  tab.drive_out_artificials();

  tab.set_costs(lp.objective);
  if (!tab.optimize(n, out.iterations)) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.solution = tab.solution();
  out.objective_value = 0.0;
  for (std::size_t j = 0; j < n; ++j) out.objective_value += lp.objective[j] * out.solution[j];
  return out;
}

FeasibilityResult feasibility(const Matrix& constraints, std::span<const double> rhs, std::size_t variables) {
  LinearProgram lp;
  const std::size_t n = constraints.rows() > 0 ? constraints.cols() : std::max(variables, constraints.cols());
  lp.objective.assign(n, 0.0);
  lp.constraints = constraints.rows() > 0 ? constraints : Matrix(0, n);
  lp.rhs.assign(rhs.begin(), rhs.end());
  const LpOutcome r = lp_solve(lp);
  FeasibilityResult out;
  out.residual = r.phase1_residual;
  out.feasible = r.status == LpStatus::Optimal;
  if (out.feasible) out.point = r.solution;
  return out;
}

double constraint_residual(const Matrix& constraints, std::span<const double> rhs, std::span<const double> u) {
  double worst = 0.0;
  for (std::size_t i = 0; i < constraints.rows(); ++i) {
    double s = -rhs[i];
    for (std::size_t j = 0; j < constraints.cols(); ++j) s += constraints(i, j) * u[j];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

std::optional<std::vector<std::size_t>> positive_support_matching(const Matrix& d, double threshold) {
  if (!d.is_square()) fail(ErrorCode::NotSquare, "matching needs a square matrix");
  const std::size_t n = d.rows();
  std::vector<std::vector<bool>> allowed(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) allowed[i][j] = d(i, j) > threshold;

  std::vector<bool> used(n, false);
  if (!completes(0, allowed, used)) return std::nullopt;

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool placed = false;
    for (std::size_t j = 0; j < n && !placed; ++j) {
      if (!allowed[i][j] || used[j]) continue;
      used[j] = true;
      if (completes(i + 1, allowed, used)) {
        perm[i] = j;
        placed = true;
      } else {
        used[j] = false;
      }
    }
    if (!placed) return std::nullopt;
  }
  return perm;
}

}  // namespace npcmaj
