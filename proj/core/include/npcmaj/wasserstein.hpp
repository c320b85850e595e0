#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "npcmaj/inequalities.hpp"
#include "npcmaj/linalg.hpp"
#include "npcmaj/measure1d.hpp"
#include "npcmaj/stochastic.hpp"

namespace npcmaj {

// Finitely supported probability measure on R^N.
struct DiscreteMeasureN {
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;

  static DiscreteMeasureN from_1d(const Measure1D& m);
};

struct Coupling {
  Matrix plan;
  std::vector<double> row_marginals;
  std::vector<double> col_marginals;
};

struct TransportResult {
  double distance = 0.0;
  Coupling coupling;
};

inline constexpr std::size_t kMaxTransportCells = 10'000;

/// Exact W2 on the line from the merged quantile grid.
double w2_quantile(const Measure1D& mu, const Measure1D& nu);

/// W2 by solving the transportation LP. Throws TooLarge when m * n > 1e4.
TransportResult w2_lp(const DiscreteMeasureN& mu, const DiscreteMeasureN& nu);

/// Quantile function sum_i w_i F_i^{-1}, evaluated on the merged breakpoints.
Measure1D w2_barycenter_1d(std::span<const Measure1D> measures, std::span<const double> weights);

/// J(nu) = 1/2 sum_i w_i W2^2(nu_i, nu).
double w2_objective(std::span<const Measure1D> measures, std::span<const double> weights, const Measure1D& nu);

/// Potential energies for V in {t^2, |t|, max(t - 1/2, 0)}, the quadratic
/// interaction energy and the second moment.
std::vector<ConvexFunctional> w_functional_registry();

/// F(bar) - sum_i w_i F(nu_i), threshold tol * max|F(nu_i)|.
SlackOutcome check_convexity_along_barycenters(const ConvexFunctional& f, std::span<const Measure1D> measures,
                                               std::span<const double> weights, double tol = kViolationTol);

/// Space used for measure-valued points: sampling draws up to `support` atoms.
Space wasserstein_space(std::span<const Measure1D> measures);

MajorizationCertificate w_majorization(std::span<const Measure1D> measures_y, std::span<const double> lambda,
                                       const Matrix& a, double tol = 1e-8);

/// fuzz_suite over Wasserstein1D with the functional registry added to the unary checks.
std::vector<CheckReport> w_fuzz_suite(std::uint64_t seed, std::size_t trials, double tol = kViolationTol,
                                      FuzzOptions options = {});

}  // namespace npcmaj
