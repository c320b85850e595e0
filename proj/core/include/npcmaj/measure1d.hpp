#pragma once

#include <span>
#include <vector>

namespace npcmaj {

// Finitely supported probability measure on the real line in canonical form:
// atoms strictly ascending, weights strictly positive and summing to one.
class Measure1D {
 public:
  Measure1D() = default;

  /// Sorts atoms, merges atoms closer than 1e-12 * max(1, max|atom|), drops
  /// zero weights. Throws InvalidMeasure on negative/non-finite input or when
  /// the weights do not sum to one within 1e-12.
  static Measure1D make(std::vector<double> atoms, std::vector<double> weights);
  static Measure1D dirac(double atom);

  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// Cumulative weights 0 = c_0 < c_1 < ... < c_k = 1.
  std::vector<double> breaks() const;

  double mean() const;
  double second_moment() const;
  Measure1D shifted(double offset) const;

  friend bool operator==(const Measure1D&, const Measure1D&) = default;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

/// Union of two break grids on [0, 1]; breaks closer than 1e-14 are fused.
std::vector<double> merge_breaks(std::span<const double> a, std::span<const double> b);

/// Value of the (left-continuous) quantile function of `m` on each cell of `breaks`.
std::vector<double> quantile_on(const Measure1D& m, std::span<const double> breaks);

/// Measure whose quantile function takes `values[k]` on cell k of `breaks`.
Measure1D measure_from_quantile(std::span<const double> breaks, std::span<const double> values);

/// Squared 2-Wasserstein distance, exact on the merged break grid.
double w2_squared_exact(const Measure1D& a, const Measure1D& b);

}  // namespace npcmaj
