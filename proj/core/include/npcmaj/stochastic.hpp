#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npcmaj/barycenter.hpp"
#include "npcmaj/linalg.hpp"
#include "npcmaj/space.hpp"

namespace npcmaj {

// ---------------------------------------------------------------------------
// Classical (vector) majorization

/// x is majorized by y: descending partial sums of x never exceed those of y
/// and the totals agree (both within 1e-9 * max|entry|).
bool hlp_majorizes(std::span<const double> x, std::span<const double> y);

/// Partial-sum condition only.
bool weakly_majorizes(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Stochastic matrices

inline constexpr double kWeightTol = 1e-9;

/// Throws NotRowStochastic unless entries >= -1e-12 and rows sum to 1 within 1e-9.
void require_row_stochastic(const Matrix& a);
/// Throws NotDoublyStochastic (square, rows and columns sum to 1 within 1e-9).
void require_doubly_stochastic(const Matrix& a);
/// Throws NotProbabilityVector.
void require_probability(std::span<const double> w, const char* what);

/// mu_j = sum_i a_ij lambda_i.
std::vector<double> pushforward_weights(const Matrix& a, std::span<const double> lambda);

// ---------------------------------------------------------------------------
// Majorization of discrete measures in an NPC space

struct VerifyOptions {
  double tol = 1e-8;
  bool ignore_zero_weight_rows = false;
  BarycenterOptions barycenter{};
};

// Witness that sum lambda_i delta(x_i) is majorized by sum mu_j delta(y_j)
// through the row-stochastic matrix `a`.
struct MajorizationCertificate {
  Space space;
  Matrix a;
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<Point> x_atoms;
  std::vector<Point> y_atoms;
  /// residuals[i] = d(x_i, bar(sum_j a_ij delta(y_j)))
  std::vector<double> residuals;
  std::vector<Point> row_barycenters;
  std::vector<std::size_t> unconverged_rows;
  std::vector<std::size_t> exempt_rows;  ///< zero-weight rows skipped on request
  double pushforward_error = 0.0;        ///< max_j |mu_j - (A^T lambda)_j|
  double scale = 1.0;                    ///< largest pairwise distance among all atoms
  double tol = 1e-8;
  bool valid = false;
  std::string diagnostic;

  bool equal_weight() const;
  double max_residual() const;
};

MajorizationCertificate verify_majorization(const Space& space, std::span<const Point> x_atoms,
                                            std::span<const double> lambda, std::span<const Point> y_atoms,
                                            std::span<const double> mu, const Matrix& a,
                                            const VerifyOptions& options = {});

/// x_i := bar(sum_j a_ij delta(y_j)), mu := pushforward; the returned
/// certificate is re-verified. Throws NotConverged if a row fails to converge.
MajorizationCertificate synthesize_majorized(const Space& space, std::span<const Point> y_atoms,
                                             std::span<const double> lambda, const Matrix& a,
                                             const VerifyOptions& options = {});

struct EuclideanDecision {
  bool feasible = false;
  Matrix witness;
  double lp_residual = 0.0;
  std::optional<MajorizationCertificate> certificate;
};

/// LP feasibility of the row-sum, weighted column-sum and moment equations.
/// Throws NotEuclidean for other spaces.
EuclideanDecision decide_majorization_euclidean(const Space& space, std::span<const Point> x_atoms,
                                                std::span<const double> lambda,
                                                std::span<const Point> y_atoms,
                                                std::span<const double> mu,
                                                const VerifyOptions& options = {});

// ---------------------------------------------------------------------------
// Birkhoff decomposition

using Permutation = std::vector<std::size_t>;

struct BirkhoffTerm {
  double weight = 0.0;
  Permutation permutation;  ///< row i selects column permutation[i]
};

struct BirkhoffDecomposition {
  std::vector<BirkhoffTerm> terms;
  double reconstruction_error = 0.0;  ///< max_ij |sum_k w_k P_k - D|

  Matrix reconstruct(std::size_t n) const;
};

Matrix permutation_matrix(const Permutation& p);

/// Greedy extraction of positive-support matchings (lexicographically smallest
/// first), followed by a Caratheodory reduction whenever more than
/// (n-1)^2 + 1 terms were produced.
BirkhoffDecomposition birkhoff_decompose(const Matrix& d);

// ---------------------------------------------------------------------------
// Rado probe

inline constexpr std::size_t kRadoMaxN = 6;

struct HullCoefficient {
  Permutation permutation;
  double weight = 0.0;
};

struct RadoReport {
  bool necessity_holds = false;
  /// d((x_1..x_n), barycenter of the permuted y-tuples) in the power space.
  double reconstruction_residual = 0.0;
  double scale = 1.0;
  BirkhoffDecomposition decomposition;
  Matrix certificate_matrix;
  /// Euclidean spaces only: membership of (x_1..x_n) in the convex hull of
  /// the n! permutations of (y_1..y_n), with mixing weights when a member.
  std::optional<bool> lp_member;
  std::vector<HullCoefficient> hull_coefficients;
};

/// Checks the necessity direction of Rado's characterization for an
/// equal-weight majorization. `certificate` supplies the doubly stochastic
/// matrix; when absent it is decided by LP in Euclidean spaces and
/// NoCertificate is thrown otherwise (or when no certificate exists).
RadoReport rado_probe(const Space& space, std::span<const Point> x, std::span<const Point> y, double tol,
                      const std::optional<Matrix>& certificate = std::nullopt,
                      const BarycenterOptions& options = {});

}  // namespace npcmaj
