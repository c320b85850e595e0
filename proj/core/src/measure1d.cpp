#include "npcmaj/measure1d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "npcmaj/error.hpp"

namespace npcmaj {
namespace {

constexpr double kBreakFuse = 1e-14;

}  // namespace

Measure1D Measure1D::make(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty()) fail(ErrorCode::InvalidMeasure, "measure has no atoms");
  if (atoms.size() != weights.size()) {
    fail(ErrorCode::InvalidMeasure, "atom and weight counts differ");
  }
  double total = 0.0;
  double magnitude = 1.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (!std::isfinite(atoms[k]) || !std::isfinite(weights[k])) {
      fail(ErrorCode::InvalidMeasure, "non-finite atom or weight");
    }
    if (weights[k] < 0.0) fail(ErrorCode::InvalidMeasure, "negative weight");
    total += weights[k];
    magnitude = std::max(magnitude, std::abs(atoms[k]));
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "weights sum to " << total << ", not 1";
    fail(ErrorCode::InvalidMeasure, msg.str());
  }

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return atoms[i] < atoms[j]; });

  const double merge_tol = 1e-12 * magnitude;
  Measure1D m;
  for (std::size_t idx : order) {
    if (weights[idx] == 0.0) continue;
    if (!m.atoms_.empty() && atoms[idx] - m.atoms_.back() <= merge_tol) {
      m.weights_.back() += weights[idx];
      continue;
    }
    m.atoms_.push_back(atoms[idx]);
    m.weights_.push_back(weights[idx]);
  }
  return m;
}

Measure1D Measure1D::dirac(double atom) { return make({atom}, {1.0}); }

std::vector<double> Measure1D::breaks() const {
  std::vector<double> c(atoms_.size() + 1, 0.0);
  for (std::size_t k = 0; k < weights_.size(); ++k) c[k + 1] = c[k] + weights_[k];
  c.back() = 1.0;
  return c;
}

double Measure1D::mean() const {
  double s = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) s += weights_[k] * atoms_[k];
  return s;
}

double Measure1D::second_moment() const {
  double s = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) s += weights_[k] * atoms_[k] * atoms_[k];
  return s;
}

Measure1D Measure1D::shifted(double offset) const {
  Measure1D m = *this;
  for (double& a : m.atoms_) a += offset;
  return m;
}

std::vector<double> merge_breaks(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all;
  all.reserve(a.size() + b.size());
  all.insert(all.end(), a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  out.push_back(0.0);
  for (double c : all) {
    if (c - out.back() > kBreakFuse) out.push_back(c);
  }
  if (1.0 - out.back() <= kBreakFuse) out.back() = 1.0;
  else out.push_back(1.0);
  return out;
}

std::vector<double> quantile_on(const Measure1D& m, std::span<const double> breaks) {
  const std::vector<double> own = m.breaks();
  std::vector<double> values(breaks.size() - 1);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double mid = 0.5 * (breaks[k] + breaks[k + 1]);
    auto it = std::lower_bound(own.begin() + 1, own.end(), mid);
    std::size_t cell = static_cast<std::size_t>(it - own.begin()) - 1;
    cell = std::min(cell, m.size() - 1);
    values[k] = m.atoms()[cell];
  }
  return values;
}

Measure1D measure_from_quantile(std::span<const double> breaks, std::span<const double> values) {
  if (breaks.size() != values.size() + 1) {
    fail(ErrorCode::DimensionMismatch, "quantile grid and values disagree");
  }
  std::vector<double> atoms(values.begin(), values.end());
  std::vector<double> weights(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) weights[k] = breaks[k + 1] - breaks[k];
  return Measure1D::make(std::move(atoms), std::move(weights));
}

double w2_squared_exact(const Measure1D& a, const Measure1D& b) {
  const std::vector<double> grid = merge_breaks(a.breaks(), b.breaks());
  const std::vector<double> qa = quantile_on(a, grid);
  const std::vector<double> qb = quantile_on(b, grid);
  double sum = 0.0;
  for (std::size_t k = 0; k < qa.size(); ++k) {
    const double diff = qa[k] - qb[k];
    sum += (grid[k + 1] - grid[k]) * diff * diff;
  }
  return sum;
}

}  // namespace npcmaj
