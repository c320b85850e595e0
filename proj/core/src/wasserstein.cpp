#include "npcmaj/wasserstein.hpp"

#include <algorithm>
#include <cmath>

#include "npcmaj/error.hpp"
#include "npcmaj/geometry.hpp"
#include "npcmaj/lp.hpp"

namespace npcmaj {
namespace {

void require_discrete(const DiscreteMeasureN& m, const char* what) {
  if (m.atoms.empty() || m.atoms.size() != m.weights.size()) {
    fail(ErrorCode::InvalidMeasure, std::string(what) + ": atoms and weights must be nonempty and of equal length");
  }
  double total = 0.0;
  for (double w : m.weights) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorCode::InvalidMeasure, std::string(what) + ": bad weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::InvalidMeasure, std::string(what) + ": weights must sum to 1");
  for (const auto& a : m.atoms) {
    if (a.size() != m.atoms.front().size()) fail(ErrorCode::DimensionMismatch, std::string(what) + ": ragged atoms");
    for (double v : a)
      if (!std::isfinite(v)) fail(ErrorCode::NonFinite, std::string(what) + ": non-finite atom");
  }
}

ConvexFunctional measure_functional(std::string id, double (*f)(const Measure1D&)) {
  ConvexFunctional c;
  c.id = std::move(id);
  c.applies_to = "wasserstein1d";
  c.arity = Arity::Unary;
  c.convexity = ConvexityKind::Convex;
  c.evaluate = [f](std::span<const Point> pts) {
    if (pts.size() != 1) fail(ErrorCode::ArityMismatch, "measure functional evaluated on a tuple");
    return f(pts[0].measure());
  };
  return c;
}

template <class V>
double potential(const Measure1D& m, V v) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m.weights()[i] * v(m.atoms()[i]);
  return s;
}

}  // namespace

DiscreteMeasureN DiscreteMeasureN::from_1d(const Measure1D& m) {
  DiscreteMeasureN out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.atoms.push_back({m.atoms()[i]});
    out.weights.push_back(m.weights()[i]);
  }
  return out;
}

double w2_quantile(const Measure1D& mu, const Measure1D& nu) {
  if (mu.size() == 0 || nu.size() == 0) fail(ErrorCode::InvalidMeasure, "empty measure");
  return std::sqrt(w2_squared_exact(mu, nu));
}

TransportResult w2_lp(const DiscreteMeasureN& mu, const DiscreteMeasureN& nu) {
  require_discrete(mu, "mu");
  require_discrete(nu, "nu");
  const std::size_t m = mu.atoms.size();
  const std::size_t n = nu.atoms.size();
  if (mu.atoms.front().size() != nu.atoms.front().size()) {
    fail(ErrorCode::DimensionMismatch, "measures live in different dimensions");
  }
  if (m * n > kMaxTransportCells) fail(ErrorCode::TooLarge, "transport problem exceeds 1e4 plan entries");

  LinearProgram lp;
  lp.objective.resize(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < mu.atoms[i].size(); ++k) {
        const double d = mu.atoms[i][k] - nu.atoms[j][k];
        c += d * d;
      }
      lp.objective[i * n + j] = c;
    }
  lp.constraints = Matrix(m + n, m * n);
  lp.rhs.resize(m + n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) lp.constraints(i, i * n + j) = 1.0;
    lp.rhs[i] = mu.weights[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) lp.constraints(m + j, i * n + j) = 1.0;
    lp.rhs[m + j] = nu.weights[j];
  }
  const LpOutcome out = lp_solve(lp);
  if (out.status != LpStatus::Optimal) fail(ErrorCode::NotConverged, "transport LP did not reach an optimum");

  TransportResult r;
  r.coupling.plan = Matrix(m, n);
  r.coupling.row_marginals.assign(m, 0.0);
  r.coupling.col_marginals.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double p = std::max(out.solution[i * n + j], 0.0);
      r.coupling.plan(i, j) = p;
      r.coupling.row_marginals[i] += p;
      r.coupling.col_marginals[j] += p;
    }
  r.distance = std::sqrt(std::max(out.objective_value, 0.0));
  return r;
}

Measure1D w2_barycenter_1d(std::span<const Measure1D> measures, std::span<const double> weights) {
  if (measures.empty()) fail(ErrorCode::InvalidMeasure, "barycenter of no measures");
  if (measures.size() != weights.size()) fail(ErrorCode::LengthMismatch, "one weight per measure expected");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorCode::InvalidMeasure, "bad barycenter weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::InvalidMeasure, "barycenter weights must sum to 1");

  std::vector<double> grid{0.0, 1.0};
  for (const Measure1D& m : measures) {
    if (m.size() == 0) fail(ErrorCode::InvalidMeasure, "empty measure");
    grid = merge_breaks(grid, m.breaks());
  }
  std::vector<double> values(grid.size() - 1, 0.0);
  for (std::size_t i = 0; i < measures.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const auto q = quantile_on(measures[i], grid);
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += weights[i] * q[k];
  }
  return measure_from_quantile(grid, values);
}

double w2_objective(std::span<const Measure1D> measures, std::span<const double> weights, const Measure1D& nu) {
  if (measures.size() != weights.size()) fail(ErrorCode::LengthMismatch, "one weight per measure expected");
  double j = 0.0;
  for (std::size_t i = 0; i < measures.size(); ++i) j += 0.5 * weights[i] * w2_squared_exact(measures[i], nu);
  return j;
}

std::vector<ConvexFunctional> w_functional_registry() {
  std::vector<ConvexFunctional> out;
  out.push_back(measure_functional("potential_t^2", [](const Measure1D& m) {
    return potential(m, [](double t) { return t * t; });
  }));
  out.push_back(measure_functional("potential_|t|", [](const Measure1D& m) {
    return potential(m, [](double t) { return std::abs(t); });
  }));
  out.push_back(measure_functional("potential_hinge", [](const Measure1D& m) {
    return potential(m, [](double t) { return std::max(t - 0.5, 0.0); });
  }));
  out.push_back(measure_functional("interaction_t^2", [](const Measure1D& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j) {
        const double d = m.atoms()[i] - m.atoms()[j];
        s += m.weights()[i] * m.weights()[j] * d * d;
      }
    return s;
  }));
  out.push_back(measure_functional("second_moment", [](const Measure1D& m) { return m.second_moment(); }));
  return out;
}

SlackOutcome check_convexity_along_barycenters(const ConvexFunctional& f, std::span<const Measure1D> measures,
                                               std::span<const double> weights, double tol) {
  const Measure1D bar = w2_barycenter_1d(measures, weights);
  double mean = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    const double v = f(Point::measure(measures[i]));
    mean += weights[i] * v;
    scale = std::max(scale, std::abs(v));
  }
  SlackOutcome out;
  out.slack = f(Point::measure(bar)) - mean;
  out.threshold = tol * std::max(scale, 1e-12);
  out.ok = out.slack <= out.threshold;
  return out;
}

Space wasserstein_space(std::span<const Measure1D> measures) {
  std::size_t support = 1;
  for (const Measure1D& m : measures) support = std::max(support, m.size());
  return Space::wasserstein1d(support);
}

MajorizationCertificate w_majorization(std::span<const Measure1D> measures_y, std::span<const double> lambda,
                                       const Matrix& a, double tol) {
  std::vector<Point> ys;
  for (const Measure1D& m : measures_y) ys.push_back(Point::measure(m));
  VerifyOptions opts;
  opts.tol = tol;
  return synthesize_majorized(wasserstein_space(measures_y), ys, lambda, a, opts);
}

std::vector<CheckReport> w_fuzz_suite(std::uint64_t seed, std::size_t trials, double tol, FuzzOptions options) {
  for (ConvexFunctional& f : w_functional_registry()) options.extra_unary.push_back(std::move(f));
  return fuzz_suite(Space::wasserstein1d(3), seed, trials, tol, options);
}

}  // namespace npcmaj
